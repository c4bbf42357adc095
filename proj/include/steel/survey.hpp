#pragma once

// End-to-end survey: stitch captures, then segment cracks on the mosaic.

#include <Eigen/Core>

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "steel/config.hpp"
#include "steel/evalmetrics.hpp"
#include "steel/segmentation.hpp"
#include "steel/stitching.hpp"

namespace steel {

struct Capture {
  std::filesystem::path image_path;
  CapturePose pose;
};

/// JSON array of {image_path, odom_x_mm, odom_y_mm, heading_rad}. Relative image paths
/// resolve against the list's directory.
std::vector<Capture> load_capture_list(const std::filesystem::path& path, double mm_per_pixel);

struct WorldBox {
  Eigen::Vector2d min_mm = Eigen::Vector2d::Zero();
  Eigen::Vector2d max_mm = Eigen::Vector2d::Zero();
};

struct SurveyResult {
  Mosaic mosaic;
  SegmentationResult segmentation;
  std::optional<WorldBox> crack_box;  ///< world extent of the crack mask pixel centres
  std::optional<Scores> scores;
};

/// Mosaic pixel (x, y) to world mm, through the first capture's pose.
Eigen::Vector2d mosaic_to_world(const Mosaic& mosaic, const std::vector<CapturePose>& poses,
                                const Eigen::Vector2d& pixel);

class StageError : public Error {
public:
  StageError(std::string stage, const Error& cause)
      : Error(stage + ": " + cause.what()), stage_(std::move(stage)), cause_(std::current_exception()) {}
  const std::string& stage() const noexcept { return stage_; }
  /// The original exception when constructed inside a handler, otherwise null.
  std::exception_ptr cause() const noexcept { return cause_; }

private:
  std::string stage_;
  std::exception_ptr cause_;
};

/// stitch_sequence, then segment_crack on the mosaic, then scoring against `gt` when given.
/// Errors from a stage are rethrown as StageError naming it.
SurveyResult full_survey(const std::vector<GrayImage>& images, const std::vector<CapturePose>& poses,
                         const InspectConfig& cfg, const BinaryMask* gt = nullptr);

}  // namespace steel
