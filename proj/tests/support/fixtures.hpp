#pragma once

// Synthetic data generators shared by unit and acceptance tests. Every generator keeps its
// ground truth.

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

#include "steel/histogram_peaks.hpp"
#include "steel/imaging.hpp"
#include "steel/inspection_sim.hpp"
#include "steel/registration3d.hpp"
#include "steel/stitching.hpp"

namespace steel::fixtures {

using Rng = std::mt19937_64;

/// Rounds and clips to 8 bits after adding N(0, sigma) noise.
GrayImage add_noise(const RealImage& img, double sigma, Rng& rng);

struct CrackScene {
  GrayImage image;
  BinaryMask crack;
  BinaryMask blobs;
};

/// 128 x 128, background 190, 1-px 8-connected dark polyline (60) and three 6 x 6 dark blobs (60),
/// noise sigma 3. With `gap` the single crack pixel of row 64 is lifted to 100,
/// which splits the thresholded crack in two.
CrackScene crack_scene(std::uint64_t seed, bool gap = false);

/// 64 x 64, background 200: a vertical 1-px line (50) through column 32, or a 5 x 5 blob (50)
/// centred at (32, 32). `angle_deg` rotates the line about the centre.
RealImage line_image(double angle_deg = 0.0);
RealImage blob_image();

/// The 16-level bimodal golden histogram.
Histogram golden_histogram();

/// Random 256-level histogram: a few Gaussian modes with integer counts and zero margins
/// of at least `margin` levels at both ends.
Histogram random_histogram(Rng& rng, int margin = 0);

struct Strip {
  GrayImage truth;                  ///< 140 x 1800
  std::vector<GrayImage> tiles;     ///< 140 x 258 each
  std::vector<CapturePose> poses;
  std::vector<int> tile_x;          ///< true left column of each tile
};

/// Tiles stepping 171 px along x; tiles 1, 3, 5, ... (0-based) are brightened by `boost`.
Strip strip(std::uint64_t seed, int tile_count = 10, double boost = 20.0, double noise = 0.0);

/// Smooth textured surface in [30, 200].
GrayImage texture(int rows, int cols, std::uint64_t seed);

/// Points sampled on z = 0.02 sin(6x) cos(5y) + 0.01 sin(11 x y) over [-0.3, 0.3]^2.
Eigen::Matrix3Xd bumpy_surface(int n, Rng& rng);
double bumpy_height(double x, double y);

Rigid3d random_rigid(Rng& rng, double max_angle, double max_translation);

struct WorldCase {
  SimWorld world;
  Pose2 start;
};

/// One random plate with a random start pose that keeps the chassis on the plate.
WorldCase random_world(Rng& rng, const RobotSpec& spec);

}  // namespace steel::fixtures
