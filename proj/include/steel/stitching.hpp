#pragma once

// Mosaic construction from sequential captures on a planar surface.
//
// Pixel p of capture i maps to the world as T_rw * T_cr * T_ic * (mm_per_pixel * p), with
// T_rw built from the robot odometry and heading. Consecutive captures are aligned by NCC
// template matching seeded with the odometry prior, exposure-compensated against the
// canvas, blended, and finally interior coverage holes are median-filled.

#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <vector>

#include "steel/imaging.hpp"

namespace steel {

struct CapturePose {
  Eigen::Vector2d odom_mm = Eigen::Vector2d::Zero();
  double heading_rad = 0.0;
  Eigen::Isometry2d T_ic = Eigen::Isometry2d::Identity();
  Eigen::Isometry2d T_cr = Eigen::Isometry2d::Identity();
  double mm_per_pixel = 1.0;

  Eigen::Isometry2d T_rw() const;
  /// T_rw * T_cr * T_ic
  Eigen::Isometry2d image_to_world_transform() const;
};

/// Pixel coordinates (x, y) to world mm.
Eigen::Vector2d image_to_world(const Eigen::Vector2d& pixel, const CapturePose& pose);
Eigen::Vector2d world_to_image(const Eigen::Vector2d& world, const CapturePose& pose);

using Polygon2 = std::vector<Eigen::Vector2d>;

double polygon_area(const Polygon2& poly);
/// Intersection of two convex polygons (Sutherland-Hodgman).
Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip);

/// Camera footprint: a rectangle of `footprint_mm` (length along the camera x axis)
/// centred on the camera origin in the world.
Polygon2 camera_footprint(const CapturePose& pose, const Eigen::Vector2d& footprint_mm);
/// Corners of a width x height image projected to the world.
Polygon2 image_footprint(const CapturePose& pose, int width, int height);

/// Intersection area over the area of A's footprint.
double check_overlap(const CapturePose& a, const CapturePose& b,
                     const Eigen::Vector2d& footprint_mm = Eigen::Vector2d(180.0, 140.0));
double overlap_fraction(const Polygon2& a, const Polygon2& b);

struct OffsetEstimate {
  Eigen::Vector2i displacement = Eigen::Vector2i::Zero();  ///< B(x, y) ~ A(x + dx, y + dy)
  double score = -1.0;                                     ///< NCC in [-1, 1]
};

class LowConfidenceError : public Error {
public:
  explicit LowConfidenceError(OffsetEstimate best)
      : Error("offset estimate below confidence floor (score " + std::to_string(best.score) + ")"), best_(best) {}
  const OffsetEstimate& best() const noexcept { return best_; }

private:
  OffsetEstimate best_;
};

inline constexpr double kMinOffsetScore = 0.5;

/// NCC of B against A placed at displacement d, over their full overlap. Returns nullopt when
/// the overlap is smaller than 10% of B or 16 pixels, or either side is constant.
std::optional<double> ncc_at(const GrayImage& a, const GrayImage& b, const Eigen::Vector2i& d);

/// Searches prior +/- radius in both axes. Throws LowConfidenceError below kMinOffsetScore.
OffsetEstimate estimate_offset(const GrayImage& a, const GrayImage& b, const Eigen::Vector2i& prior, int radius);

/// I2 when tau * I2 > I1, otherwise I1.
template <typename Scalar>
Scalar blend(Scalar canvas, Scalar incoming, double tau) {
  return tau * static_cast<double>(incoming) > static_cast<double>(canvas) ? incoming : canvas;
}

struct Mosaic {
  GrayImage canvas;
  Raster<int> coverage;                          ///< contributing captures per pixel
  Eigen::Vector2d origin_mm = Eigen::Vector2d::Zero();  ///< world position of canvas pixel (0, 0)
  std::vector<Eigen::Vector2i> placements;       ///< top-left canvas pixel of each capture
  std::vector<CapturePose> refined_poses;
  std::vector<double> scores;                    ///< NCC per pair; NaN where the prior was kept
  std::vector<double> exposure_offsets;          ///< intensity added to each capture
};

/// Median-fills zero-coverage pixels whose hole does not touch the canvas border.
void fill_gaps(Mosaic& mosaic);

struct StitchParams {
  double tau = 1.05;
  int search_radius = 8;
  double min_overlap = 0.30;
  bool compensate_exposure = true;

  void validate() const;
};

Mosaic stitch_sequence(const std::vector<GrayImage>& images, const std::vector<CapturePose>& poses,
                       const StitchParams& params);

}  // namespace steel
