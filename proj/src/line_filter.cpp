#include "steel/line_filter.hpp"

#include <string>

namespace steel {

GaussianKernels1D GaussianKernels1D::make(double sigma) {
  const int r = hessian_radius(sigma);
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(2 * r + 1, -r, r);
  const double s2 = sigma * sigma;
  GaussianKernels1D out;
  out.smooth = (-k.square() / (2.0 * s2)).exp();
  out.smooth /= out.smooth.sum();

  // Convolution orientation: (f * I)(x) = sum_k f(k) I(x - k), so the sampled first
  // derivative -k/s^2 g(k) must satisfy -sum k f(k) = 1.
  out.first = -k / s2 * out.smooth;
  out.first /= -(k * out.first).sum();

  // Zero sum, zero first moment (by symmetry) and second moment 2.
  out.second = (k.square() / (s2 * s2) - 1.0 / s2) * out.smooth;
  out.second -= out.second.sum() * out.smooth;
  out.second *= 2.0 / (k.square() * out.second).sum();
  return out;
}

const char* to_string(Structure s) {
  switch (s) {
    case Structure::line: return "line";
    case Structure::blob: return "blob";
    case Structure::sheet: return "sheet";
    case Structure::none: return "none";
  }
  return "none";
}

Structure classify_structure(double l1, double l2, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("classify_structure: eps must be > 0");
  const double a1 = std::abs(l1);
  const double a2 = std::abs(l2);
  if (a1 < eps && a2 < eps) return Structure::sheet;
  if (a1 >= a2 && a2 < eps && a1 >= eps) return Structure::line;
  if (std::abs(a1 - a2) <= eps && a1 >= eps && a2 >= eps) return Structure::blob;
  return Structure::none;
}

void ScaleBank::validate() const {
  if (!(sigma1 >= 0.5)) throw ConfigError("sigma1", "must be >= 0.5 px");
  if (!(factor > 1.0)) throw ConfigError("scale_factor", "must be > 1");
  if (count < 1) throw ConfigError("num_scales", "must be >= 1");
}

void LineFilterParams::validate() const {
  bank.validate();
  if (!(mu > 0.0 && mu <= 1.0)) throw ConfigError("mu", "must lie in (0, 1]");
}

RealImage single_scale_similarity(const RealImage& image, double sigma, double mu, RidgePolarity polarity) {
  const HessianField<double> h = hessian(image, sigma);
  const double sign = polarity == RidgePolarity::dark ? -1.0 : 1.0;
  RealImage out(image.rows(), image.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const auto [l1, l2] = eigs2(sign * h.xx.data()[i], sign * h.xy.data()[i], sign * h.yy.data()[i]);
    out.data()[i] = line_similarity(l1, l2, mu);
  }
  return out;
}

LineResponse multiscale_response(const RealImage& image, const LineFilterParams& params) {
  params.validate();
  LineResponse out;
  out.response = RealImage::Zero(image.rows(), image.cols());
  out.winning_scale = Raster<int>::Constant(image.rows(), image.cols(), -1);
  const double s1 = params.bank.sigma1;
  for (int i = 0; i < params.bank.count; ++i) {
    const double sigma = params.bank.sigma(i);
    const double weight = params.normalization == ScaleNormalization::per_scale ? sigma * sigma : s1 * s1;
    const RealImage r = weight * single_scale_similarity(image, sigma, params.mu, params.polarity);
    for (Eigen::Index p = 0; p < r.size(); ++p) {
      if (r.data()[p] > out.response.data()[p]) {
        out.response.data()[p] = r.data()[p];
        out.winning_scale.data()[p] = i;
      }
    }
  }
  return out;
}

double default_structure_epsilon(const HessianField<double>& field) {
  double peak = 0.0;
  for (Eigen::Index i = 0; i < field.xx.size(); ++i) {
    const auto [l1, l2] = eigs2(field.xx.data()[i], field.xy.data()[i], field.yy.data()[i]);
    peak = std::max({peak, std::abs(l1), std::abs(l2)});
  }
  return 0.05 * peak;
}

Raster<Structure> classify_field(const HessianField<double>& field, double eps) {
  if (eps <= 0.0) eps = default_structure_epsilon(field);
  if (eps <= 0.0) eps = std::numeric_limits<double>::min();
  Raster<Structure> out(field.xx.rows(), field.xx.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const auto [l1, l2] = eigs2(field.xx.data()[i], field.xy.data()[i], field.yy.data()[i]);
    out.data()[i] = classify_structure(l1, l2, eps);
  }
  return out;
}

}  // namespace steel
