#include "steel/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steel {

BinaryMask apply_threshold(const GrayImage& image, int t) {
  if (t < 0 || t > 255) throw PreconditionError("apply_threshold: t must lie in [0, 255]");
  return image.cast<int>() <= t;
}

OtsuResult valley_emphasis_otsu(const Histogram& h) {
  if (!(h.total > 0.0) || !(h.counts.sum() > 0.0)) throw PreconditionError("valley_emphasis_otsu: empty histogram");
  const Eigen::Index levels = h.counts.size();
  const Eigen::ArrayXd p = h.counts / h.counts.sum();
  const Eigen::ArrayXd g = Eigen::ArrayXd::LinSpaced(levels, 0.0, static_cast<double>(levels - 1));

  OtsuResult out;
  out.objective = Eigen::ArrayXd::Constant(levels, -std::numeric_limits<double>::infinity());
  out.omega1.resize(levels);
  out.omega2.resize(levels);
  out.mu1 = Eigen::ArrayXd::Zero(levels);
  out.mu2 = Eigen::ArrayXd::Zero(levels);

  const double mean_total = (g * p).sum();
  double w1 = 0.0;
  double m1 = 0.0;  // first moment of class 1
  int occupied = 0;
  int first_occupied = -1;
  for (Eigen::Index t = 0; t < levels; ++t) {
    w1 += p(t);
    m1 += g(t) * p(t);
    if (p(t) > 0.0) {
      ++occupied;
      if (first_occupied < 0) first_occupied = static_cast<int>(t);
    }
    out.omega1(t) = w1;
    out.omega2(t) = 1.0 - w1;
    const bool c1 = (h.counts.head(t + 1) > 0.0).any();
    const bool c2 = (h.counts.tail(levels - t - 1) > 0.0).any();
    if (c1) out.mu1(t) = m1 / w1;
    if (c2) out.mu2(t) = (mean_total - m1) / (1.0 - w1);
    if (c1 && c2) {
      out.objective(t) = (1.0 - p(t)) * (w1 * out.mu1(t) * out.mu1(t) + (1.0 - w1) * out.mu2(t) * out.mu2(t));
    }
  }
  if (occupied < 2) {
    out.t_star = first_occupied;
    out.degenerate = true;
    return out;
  }
  Eigen::Index best = 0;
  out.objective.maxCoeff(&best);  // first maximum on ties
  out.t_star = static_cast<int>(best);
  return out;
}

std::vector<Pixel> seed_points(const BinaryMask& mask) {
  std::vector<Pixel> seeds;
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());
  auto off = [&](int y, int x) { return y < 0 || x < 0 || y >= rows || x >= cols || !mask(y, x); };
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!mask(y, x)) continue;
      if (off(y - 1, x) || off(y + 1, x) || off(y, x - 1) || off(y, x + 1)) seeds.push_back({x, y});
    }
  }
  return seeds;
}

BinaryMask region_grow(const GrayImage& image, const std::vector<Pixel>& seeds, const BinaryMask& initial_mask,
                       double e_max) {
  if (!(e_max >= 0.0)) throw PreconditionError("region_grow: e_max must be >= 0");
  if (initial_mask.rows() != image.rows() || initial_mask.cols() != image.cols()) {
    throw PreconditionError("region_grow: mask and image sizes differ");
  }
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  BinaryMask region = initial_mask;
  for (const Pixel& s : seeds) {
    if (s.x < 0 || s.y < 0 || s.x >= cols || s.y >= rows) throw PreconditionError("region_grow: seed outside image");
    region(s.y, s.x) = true;
  }
  int count = 0;
  LabelImage labels = label_components(region, &count);
  std::vector<double> sum(static_cast<std::size_t>(count) + 1, 0.0);
  std::vector<double> size(static_cast<std::size_t>(count) + 1, 0.0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int l = labels.data()[i];
    if (l == 0) continue;
    sum[static_cast<std::size_t>(l)] += image.data()[i];
    size[static_cast<std::size_t>(l)] += 1.0;
  }

  std::vector<Pixel> frontier(seeds);
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  LabelImage pending = LabelImage::Zero(rows, cols);
  std::vector<double> mean(sum.size());
  while (!frontier.empty()) {
    for (std::size_t l = 1; l < sum.size(); ++l) mean[l] = sum[l] / size[l];
    std::vector<Pixel> admitted;
    for (const Pixel& p : frontier) {
      const int l = labels(p.y, p.x);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int y = p.y + dy;
          const int x = p.x + dx;
          if ((dx == 0 && dy == 0) || y < 0 || x < 0 || y >= rows || x >= cols || region(y, x)) continue;
          if (!(std::abs(mean[static_cast<std::size_t>(l)] - image(y, x)) < e_max)) continue;
          int& slot = pending(y, x);
          if (slot == 0) {
            slot = l;
            admitted.push_back({x, y});
          } else {
            slot = std::min(slot, l);
          }
        }
      }
    }
    for (const Pixel& q : admitted) {
      const int l = pending(q.y, q.x);
      pending(q.y, q.x) = 0;
      region(q.y, q.x) = true;
      labels(q.y, q.x) = l;
      sum[static_cast<std::size_t>(l)] += image(q.y, q.x);
      size[static_cast<std::size_t>(l)] += 1.0;
    }
    frontier = std::move(admitted);
  }
  return region;
}

double grow_threshold(const Histogram& h, const PeakSet& peaks, const OtsuResult& otsu) {
  (void)h;
  if (peaks.dominant.empty()) throw NoStructureError();
  if (peaks.dominant.size() == 1) {
    const double alpha = peaks.observing.front();
    if (!std::isfinite(alpha)) return 0.0;
    return std::abs(peaks.dominant.front() - alpha);
  }
  const double t = otsu.t_star;
  int below = -1;
  for (int g : peaks.dominant) {
    if (g <= t) below = g;
  }
  if (below >= 0) return std::abs(below - t);
  return std::abs(peaks.dominant.front() - t);
}

void SegmentationParams::validate() const {
  line.validate();
  if (!(gating_quantile >= 0.0 && gating_quantile <= 1.0)) throw ConfigError("gating_quantile", "must lie in [0, 1]");
  if (min_area < 0) throw ConfigError("min_area", "must be >= 0");
}

double masked_quantile(const RealImage& values, const BinaryMask& where, double q) {
  std::vector<double> picked;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (where.data()[i]) picked.push_back(values.data()[i]);
  }
  if (picked.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(picked.size() - 1)));
  std::nth_element(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(k), picked.end());
  return picked[k];
}

SegmentationResult segment_with_response(const GrayImage& image, const RealImage& response,
                                         const SegmentationParams& params) {
  params.validate();
  if (response.rows() != image.rows() || response.cols() != image.cols()) {
    throw PreconditionError("segment: response and image sizes differ");
  }
  SegmentationResult out;
  SegmentationReport& rep = out.report;
  const Histogram smoothed = smooth(compute_histogram(image));
  rep.peaks = detect_dominant_peaks(smoothed);
  if (rep.peaks.dominant.empty()) {
    rep.no_structure = true;
    out.mask = BinaryMask::Constant(image.rows(), image.cols(), false);
    return out;
  }
  rep.threshold = peaks_to_global_threshold(smoothed, rep.peaks);
  const BinaryMask m0 = apply_threshold(image, rep.threshold);
  rep.response_cutoff = masked_quantile(response, m0, params.gating_quantile);
  const BinaryMask m1 = m0 && (response >= rep.response_cutoff);

  const OtsuResult otsu = valley_emphasis_otsu(smoothed);
  rep.otsu_level = otsu.t_star;
  rep.e_max = grow_threshold(smoothed, rep.peaks, otsu);
  const BinaryMask m2 = region_grow(image, seed_points(m1), m1, rep.e_max);
  out.mask = morphological_cleanup(m2, params.min_area);

  rep.threshold_pixels = m0.count();
  rep.gated_pixels = m1.count();
  rep.grown_pixels = m2.count();
  rep.final_pixels = out.mask.count();
  rep.components = count_components(out.mask);
  return out;
}

SegmentationResult segment_crack(const GrayImage& image, const SegmentationParams& params) {
  params.validate();
  return segment_with_response(image, multiscale_response(image, params.line).response, params);
}

}  // namespace steel
