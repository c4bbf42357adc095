#pragma once

// Run configuration: a `key = value` text file ('#' starts a comment). Every key is optional;
// unknown keys are rejected. Environment variables STEEL_INSPECT_<KEY> override file values,
// with the key upper-cased and '.' replaced by '_' (e.g. STEEL_INSPECT_ICP_MAX_ITERATIONS).
//
// Defaults (key: value):
//   mu: 1.0                     sigma1: 1.0            scale_factor: 1.41421356
//   num_scales: 4               scale_normalization: per_scale (or min_scale)
//   gating_quantile: 0.8        min_area: 10
//   tau: 1.05                   search_radius: 8       min_overlap: 0.3
//   compensate_exposure: true   mm_per_pixel: 1.0
//   icp.subsample_ratio: 1      icp.max_correspondence: 0.1    icp.max_iterations: 50
//   icp.rmse_floor: 0.001       icp.rmse_delta_floor: 1e-06    icp.motion_epsilon: 1e-09
//   icp.max_rotation: 0.8       icp.max_translation: 0.5
//   sim.weight: 6               sim.magnetic_force: 16         sim.friction: 0.5
//   sim.com_height: 0.05        sim.wheelbase: 0.2             sim.track: 0.18
//   sim.dt: 0.01                sim.speed: 0.1                 sim.retreat: 0.05
//   sim.turn_arc: 0.03          sim.capture_interval: 0.12     ir_epsilon: 0.05

#include <filesystem>
#include <map>
#include <string>

#include "steel/inspection_sim.hpp"
#include "steel/registration3d.hpp"
#include "steel/segmentation.hpp"
#include "steel/stitching.hpp"

namespace steel {

struct InspectConfig {
  SegmentationParams segmentation;
  StitchParams stitch;
  double mm_per_pixel = 1.0;
  IcpParams icp;
  RobotSpec robot;
  SimParams sim;

  /// Throws ConfigError naming the first out-of-domain field.
  void validate() const;

  /// Canonical "key = value" lines for every key, sorted by key.
  std::string canonical() const;
  /// SHA-256 hex of canonical().
  std::string hash() const;
};

/// Sets one key from its textual value (no validation of the whole config).
void set_config_value(InspectConfig& cfg, const std::string& key, const std::string& value);

/// All keys with their current values.
std::map<std::string, std::string> config_values(const InspectConfig& cfg);

InspectConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Reads, applies environment overrides, validates.
InspectConfig load_config(const std::filesystem::path& path);
/// Defaults plus environment overrides, validated.
InspectConfig default_config();

void apply_env_overrides(InspectConfig& cfg);

inline constexpr const char* kEnvPrefix = "STEEL_INSPECT_";

}  // namespace steel
