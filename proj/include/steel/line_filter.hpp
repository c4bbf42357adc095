#pragma once

// Hessian-eigenvalue line emphasis.
//
// Second derivatives come from sampled Gaussian-derivative kernels (radius ceil(4 sigma))
// whose moments are corrected so they differentiate polynomials up to degree two exactly.
// That keeps constant and affine images at an exactly zero response.

#include <Eigen/Core>

#include <cmath>
#include <utility>

#include "steel/imaging.hpp"

namespace steel {

template <typename Scalar>
struct HessianField {
  Raster<Scalar> xx;
  Raster<Scalar> xy;  ///< I_xy == I_yx; stored once
  Raster<Scalar> yy;
};

/// 1D Gaussian derivative kernels of order 0, 1 and 2 in convolution orientation.
struct GaussianKernels1D {
  Eigen::ArrayXd smooth;
  Eigen::ArrayXd first;
  Eigen::ArrayXd second;

  static GaussianKernels1D make(double sigma);
};

/// Kernel radius for a given scale.
inline int hessian_radius(double sigma) { return static_cast<int>(std::ceil(4.0 * sigma)); }

template <typename Derived>
HessianField<double> hessian(const Eigen::ArrayBase<Derived>& image, double sigma) {
  if (!(sigma >= 0.5)) throw PreconditionError("hessian: sigma must be >= 0.5 px");
  const GaussianKernels1D k = GaussianKernels1D::make(sigma);
  HessianField<double> h;
  h.xx = convolve_separable(image, k.second, k.smooth);
  h.xy = convolve_separable(image, k.first, k.first);
  h.yy = convolve_separable(image, k.smooth, k.second);
  return h;
}

/// Closed-form eigenvalues of [[a, b], [b, c]], returned as (larger, smaller).
template <typename Scalar>
std::pair<Scalar, Scalar> eigs2(Scalar a, Scalar b, Scalar c) {
  const Scalar mean = (a + c) / Scalar(2);
  const Scalar radius = std::hypot((a - c) / Scalar(2), b);
  return {mean + radius, mean - radius};
}

template <typename Scalar>
std::pair<Scalar, Scalar> eigs2(const Eigen::Matrix<Scalar, 2, 2>& m) {
  return eigs2(m(0, 0), m(0, 1), m(1, 1));
}

/// Line similarity for eigenvalues l1 >= l2 and 0 < mu <= 1. Large when l2 is strongly
/// negative and l1 is small; zero for flat or opposite-polarity configurations.
template <typename Scalar>
Scalar line_similarity(Scalar l1, Scalar l2, Scalar mu) {
  const Scalar mag2 = std::abs(l2);
  if (l2 <= l1 && l1 <= Scalar(0)) return mag2 + l1;
  if (l2 < Scalar(0) && Scalar(0) < l1 && l1 < mag2 / mu) return mag2 - mu * l1;
  return Scalar(0);
}

enum class Structure { line, blob, sheet, none };

const char* to_string(Structure s);

/// Eigenvalue-magnitude classification; "~0" means |v| < eps and "|a| ~ |b|" means
/// ||a| - |b|| <= eps.
Structure classify_structure(double l1, double l2, double eps);

/// sigma_i = sigma1 * factor^(i-1), i = 1..count
struct ScaleBank {
  double sigma1 = 1.0;
  double factor = std::sqrt(2.0);
  int count = 4;

  double sigma(int i) const { return sigma1 * std::pow(factor, i); }
  void validate() const;
};

/// Which factor multiplies lambda12 at scale i: sigma_i^2 (scale-normalized) or the
/// constant sigma_1^2.
enum class ScaleNormalization { per_scale, min_scale };

/// Dark ridges are intensity valleys; their eigenvalues are taken from -H.
enum class RidgePolarity { dark, bright };

struct LineFilterParams {
  ScaleBank bank;
  double mu = 1.0;
  ScaleNormalization normalization = ScaleNormalization::per_scale;
  RidgePolarity polarity = RidgePolarity::dark;

  void validate() const;
};

struct LineResponse {
  RealImage response;        ///< R >= 0
  Raster<int> winning_scale; ///< 0-based scale index; -1 where R == 0
};

/// lambda12 image at one scale (not yet scale-weighted).
RealImage single_scale_similarity(const RealImage& image, double sigma, double mu, RidgePolarity polarity);

LineResponse multiscale_response(const RealImage& image, const LineFilterParams& params);

template <typename Derived>
LineResponse multiscale_response(const Eigen::ArrayBase<Derived>& image, const LineFilterParams& params) {
  return multiscale_response(RealImage(image.template cast<double>()), params);
}

/// Per-pixel classification of a Hessian field with eps defaulting to 5% of the largest
/// eigenvalue magnitude present.
Raster<Structure> classify_field(const HessianField<double>& field, double eps = -1.0);
double default_structure_epsilon(const HessianField<double>& field);

}  // namespace steel
