#pragma once

// Raster types and the low-level raster operations shared by every vision stage.
//
// Rasters are row-major Eigen arrays indexed (row, col) == (y, x); rows() is the
// image height and cols() the width.

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "steel/errors.hpp"

namespace steel {

template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayImage = Raster<std::uint8_t>;
using BinaryMask = Raster<bool>;
using RealImage = Raster<double>;
using LabelImage = Raster<int>;

struct Pixel {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Square (2r+1)x(2r+1) kernel. Smoothing kernels are normalized to unit sum.
struct Kernel2 {
  int radius = 0;
  RealImage weights = RealImage::Ones(1, 1);

  static Kernel2 identity(int radius = 0);
  static Kernel2 gaussian(double sigma, int radius);
};

namespace detail {
inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }
}  // namespace detail

/// 2D convolution with replicated borders. Any scalar raster (or raster expression) is accepted.
template <typename Derived>
RealImage convolve(const Eigen::ArrayBase<Derived>& image, const Kernel2& kernel) {
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const int r = kernel.radius;
  if (r >= std::min(rows, cols)) {
    throw PreconditionError("convolve: kernel radius " + std::to_string(r) +
                            " must be smaller than the image's smaller side");
  }
  const RealImage src = image.template cast<double>();
  RealImage out = RealImage::Zero(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int ky = -r; ky <= r; ++ky) {
        const int sy = detail::clamp_index(y - ky, rows);
        for (int kx = -r; kx <= r; ++kx) {
          acc += kernel.weights(ky + r, kx + r) * src(sy, detail::clamp_index(x - kx, cols));
        }
      }
      out(y, x) = acc;
    }
  }
  return out;
}

/// Separable convolution: `along_x` runs over columns, then `along_y` over rows.
/// Both kernels have odd length and are indexed from -r..r.
template <typename Derived>
RealImage convolve_separable(const Eigen::ArrayBase<Derived>& image, const Eigen::ArrayXd& along_x,
                             const Eigen::ArrayXd& along_y) {
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const int rx = static_cast<int>(along_x.size()) / 2;
  const int ry = static_cast<int>(along_y.size()) / 2;
  if (std::max(rx, ry) >= std::min(rows, cols)) {
    throw PreconditionError("convolve: kernel radius " + std::to_string(std::max(rx, ry)) +
                            " must be smaller than the image's smaller side");
  }
  const RealImage src = image.template cast<double>();
  RealImage tmp(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int k = -rx; k <= rx; ++k) acc += along_x(k + rx) * src(y, detail::clamp_index(x - k, cols));
      tmp(y, x) = acc;
    }
  }
  RealImage out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int k = -ry; k <= ry; ++k) acc += along_y(k + ry) * tmp(detail::clamp_index(y - k, rows), x);
      out(y, x) = acc;
    }
  }
  return out;
}

/// Replaces pixels inside `region` with the median of their (2r+1)^2 neighbourhood
/// (replicated borders, read from the unmodified input). Pixels outside stay untouched.
GrayImage median_filter(const GrayImage& image, const BinaryMask& region, int radius);

/// 8-connected component labelling in raster order. Background is 0, labels start at 1.
LabelImage label_components(const BinaryMask& mask, int* count = nullptr);

int count_components(const BinaryMask& mask);

/// Removes pixels with no 8-neighbour (union of openings by the four 2-pixel line
/// segments) and then every 8-connected component smaller than `min_area`.
BinaryMask morphological_cleanup(const BinaryMask& mask, int min_area);

/// Rounds and saturates a real raster to 8 bits.
GrayImage to_gray(const RealImage& image);

}  // namespace steel
