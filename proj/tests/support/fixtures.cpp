#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace steel::fixtures {

GrayImage add_noise(const RealImage& img, double sigma, Rng& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  RealImage noisy = img;
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy.data()[i] += n(rng);
  }
  return to_gray(noisy);
}

CrackScene crack_scene(std::uint64_t seed, bool gap) {
  constexpr int n = 128;
  RealImage img = RealImage::Constant(n, n, 190.0);
  CrackScene s;
  s.crack = BinaryMask::Constant(n, n, false);
  s.blobs = BinaryMask::Constant(n, n, false);
  const int pts[4][2] = {{10, 10}, {50, 40}, {80, 45}, {118, 100}};  // (y, x)
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 400; ++i) {
      const double t = i / 399.0;
      const int y = static_cast<int>(std::lround(pts[k][0] + (pts[k + 1][0] - pts[k][0]) * t));
      const int x = static_cast<int>(std::lround(pts[k][1] + (pts[k + 1][1] - pts[k][1]) * t));
      s.crack(y, x) = true;
    }
  }
  for (const auto& [y, x] : {std::pair{15, 90}, std::pair{100, 20}, std::pair{60, 100}}) {
    s.blobs.block(y, x, 6, 6).setConstant(true);
  }
  img = (s.crack || s.blobs).select(60.0, img);
  if (gap) {
    for (int y = 64; y <= 64; ++y) {
      for (int x = 0; x < n; ++x) {
        if (s.crack(y, x)) img(y, x) = 100.0;
      }
    }
  }
  Rng rng(seed);
  s.image = add_noise(img, 3.0, rng);
  return s;
}

RealImage line_image(double angle_deg) {
  constexpr int n = 64;
  RealImage img = RealImage::Constant(n, n, 200.0);
  const double a = angle_deg * M_PI / 180.0;
  // direction of the line, through the centre (32, 32)
  const double dx = std::sin(a);
  const double dy = std::cos(a);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double rx = x - 32.0;
      const double ry = y - 32.0;
      const double dist = std::abs(rx * dy - ry * dx);
      // area-weighted 1-px wide profile so rotated lines keep the same integrated contrast
      const double cover = std::clamp(1.0 - dist, 0.0, 1.0);
      img(y, x) = 200.0 - 150.0 * cover;
    }
  }
  return img;
}

RealImage blob_image() {
  RealImage img = RealImage::Constant(64, 64, 200.0);
  img.block(30, 30, 5, 5).setConstant(50.0);
  return img;
}

Histogram golden_histogram() {
  const std::vector<double> h{0, 4, 2, 14, 22, 15, 5, 6, 0, 6, 15, 24, 22, 11, 6, 0};
  return Histogram::from_counts(h);
}

Histogram random_histogram(Rng& rng, int margin) {
  std::uniform_int_distribution<int> modes(1, 4);
  const int lo = margin + 8;
  const int hi = 255 - margin - 8;
  std::uniform_real_distribution<double> centre(lo, hi);
  std::uniform_real_distribution<double> width(2.0, 18.0);
  std::uniform_real_distribution<double> amp(30.0, 2000.0);
  std::uniform_int_distribution<int> jitter(0, 4);
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(256);
  const int k = modes(rng);
  for (int m = 0; m < k; ++m) {
    const double c = centre(rng);
    const double w = width(rng);
    const double a = amp(rng);
    for (int i = 0; i < 256; ++i) counts(i) += a * std::exp(-(i - c) * (i - c) / (2 * w * w));
  }
  for (int i = 0; i < 256; ++i) {
    counts(i) = std::round(counts(i));
    if (counts(i) > 0.0) counts(i) += jitter(rng);
  }
  counts.head(margin).setZero();
  counts.tail(margin).setZero();
  return Histogram::from_counts({counts.data(), 256});
}

GrayImage texture(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealImage noise(rows, cols);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = u(rng);
  RealImage smooth = convolve(noise, Kernel2::gaussian(2.0, 6));
  const double lo = smooth.minCoeff();
  const double hi = smooth.maxCoeff();
  smooth = 30.0 + (smooth - lo) / (hi - lo) * 170.0;
  return to_gray(smooth);
}

Strip strip(std::uint64_t seed, int tile_count, double boost, double noise) {
  constexpr int rows = 140;
  constexpr int width = 258;
  constexpr int step = 171;
  Strip s;
  s.truth = texture(rows, 1800, seed);
  Rng rng(seed ^ 0x5eed);
  for (int i = 0; i < tile_count; ++i) {
    const int x0 = i * step;
    RealImage tile = s.truth.block(0, x0, rows, width).cast<double>();
    if (i % 2 == 1) tile += boost;
    s.tiles.push_back(add_noise(tile, noise, rng));
    CapturePose p;
    p.odom_mm = {static_cast<double>(x0), 0.0};
    s.poses.push_back(p);
    s.tile_x.push_back(x0);
  }
  return s;
}

double bumpy_height(double x, double y) {
  // gentle waviness plus two crossing stiffener ridges; the ridges pin down in-plane sliding
  const double wave = 0.02 * std::sin(6 * x) * std::cos(5 * y) + 0.01 * std::sin(11 * x * y);
  const double rx = (x - 0.08) / 0.04;
  const double ry = (y + 0.1) / 0.04;
  return wave + 0.03 * std::exp(-rx * rx) + 0.025 * std::exp(-ry * ry);
}

Eigen::Matrix3Xd bumpy_surface(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Eigen::Matrix3Xd pts(3, n);
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    pts.col(i) << x, y, bumpy_height(x, y);
  }
  return pts;
}

Rigid3d random_rigid(Rng& rng, double max_angle, double max_translation) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::Vector3d axis(g(rng), g(rng), g(rng));
  axis.normalize();
  Eigen::Vector3d t(g(rng), g(rng), g(rng));
  t = t.normalized() * (max_translation * u(rng));
  return {Eigen::AngleAxisd(max_angle * u(rng), axis).toRotationMatrix(), t};
}

WorldCase random_world(Rng& rng, const RobotSpec& spec) {
  std::uniform_real_distribution<double> size_x(0.6, 3.0);
  std::uniform_real_distribution<double> size_y(0.5, 2.5);
  std::uniform_real_distribution<double> origin(-1.0, 1.0);
  std::uniform_real_distribution<double> alpha(0.0, M_PI / 2);
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);
  WorldCase c;
  Plate p;
  p.x_min = origin(rng);
  p.y_min = origin(rng);
  p.x_max = p.x_min + size_x(rng);
  p.y_max = p.y_min + size_y(rng);
  p.alpha = alpha(rng);
  c.world.plates.push_back(p);
  const double pad = spec.chassis.norm() / 2.0 + 0.01;
  std::uniform_real_distribution<double> sx(p.x_min + pad, p.x_max - pad);
  std::uniform_real_distribution<double> sy(p.y_min + pad, p.y_max - pad);
  c.start = {sx(rng), sy(rng), heading(rng)};
  return c;
}

}  // namespace steel::fixtures
