#pragma once

// Crack segmentation: global threshold from histogram peaks, line-response gating,
// region growing driven by a valley-emphasis Otsu threshold, morphological cleanup.

#include <Eigen/Core>

#include <vector>

#include "steel/histogram_peaks.hpp"
#include "steel/imaging.hpp"
#include "steel/line_filter.hpp"

namespace steel {

/// dark-crack convention: true where I <= t
BinaryMask apply_threshold(const GrayImage& image, int t);

struct OtsuResult {
  int t_star = 0;
  Eigen::ArrayXd objective;  ///< per level; -inf where one class is empty
  Eigen::ArrayXd omega1, omega2;
  Eigen::ArrayXd mu1, mu2;
  bool degenerate = false;
};

/// argmax_t (1 - p_t) (w1 mu1^2 + w2 mu2^2), lowest t on ties; C1 = [0, t], C2 = (t, L).
OtsuResult valley_emphasis_otsu(const Histogram& h);

/// True pixels with at least one false (or off-image) 4-neighbour, in raster order.
std::vector<Pixel> seed_points(const BinaryMask& mask);

/// Wavefront region growing. Each 8-connected component of initial_mask (plus seeds) is
/// one region with its own mean. Means are snapshotted per wavefront; a candidate admitted
/// by several regions joins the lowest-labelled one.
BinaryMask region_grow(const GrayImage& image, const std::vector<Pixel>& seeds, const BinaryMask& initial_mask,
                       double e_max);

double grow_threshold(const Histogram& h, const PeakSet& peaks, const OtsuResult& otsu);

struct SegmentationParams {
  LineFilterParams line;
  double gating_quantile = 0.80;
  int min_area = 10;

  void validate() const;
};

struct SegmentationReport {
  bool no_structure = false;
  int threshold = -1;     ///< t
  int otsu_level = -1;    ///< t*
  double e_max = 0.0;
  double response_cutoff = 0.0;
  PeakSet peaks;
  long threshold_pixels = 0;  ///< |M0|
  long gated_pixels = 0;      ///< |M1|
  long grown_pixels = 0;      ///< |M2|
  long final_pixels = 0;
  int components = 0;
};

struct SegmentationResult {
  BinaryMask mask;
  SegmentationReport report;
};

/// Quantile by order statistic: sorted[floor(q (n - 1))]. 0 for an empty selection.
double masked_quantile(const RealImage& values, const BinaryMask& where, double q);

SegmentationResult segment_crack(const GrayImage& image, const SegmentationParams& params);

/// Same pipeline with an externally supplied line response (stage ablation).
SegmentationResult segment_with_response(const GrayImage& image, const RealImage& response,
                                         const SegmentationParams& params);

}  // namespace steel
