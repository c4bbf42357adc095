// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "steel/evalmetrics.hpp"
#include "steel/histogram_peaks.hpp"
#include "steel/inspection_sim.hpp"
#include "steel/line_filter.hpp"
#include "steel/registration3d.hpp"
#include "steel/segmentation.hpp"
#include "steel/stitching.hpp"

using namespace steel;
namespace fx = steel::fixtures;

namespace {

// Pinned tolerances and budgets.
constexpr double kExact = 1e-12;
constexpr double kAffineZero = 1e-4;
constexpr double kLineOverBlob = 2.0;
constexpr double kMinRecall = 0.90;
constexpr double kMaxLeakage = 0.10;
constexpr double kMaxMosaicMae = 3.0;
constexpr int kSeamHalfWidth = 2;
constexpr double kIcpMaxAngleDeg = 0.5;
constexpr double kIcpMaxTranslation = 0.005;
constexpr double kRmseSlack = 1e-12;  // rounding noise once converged
constexpr double kMetricTol = 1e-12;
constexpr double kPeakMedianMs = 12.0;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = seconds_since(t0);
  const bool in_time = budget_s <= 0.0 || s < budget_s;
  const bool pass = o.pass && in_time;
  std::printf("criterion %d: %s  %s  [%s; %.2f s%s]\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
  return pass;
}

// 1 ---------------------------------------------------------------------------------------------

Outcome golden_trace() {
  const PeakSet p = detect_dominant_peaks(fx::golden_histogram());
  // Hand-executed trace of the 16-bin fixture.
  const std::vector<int> initial{1, 4, 7, 11};
  const std::vector<double> offsets{2.0 / 3, 33.0 / 8, 4.0 / 3, 4.0};
  const std::vector<double> theta{3.0, 152.0 / 33, 8.0 / 19, 192.0 / 89};
  const std::vector<int> dominant{4, 11};
  const std::vector<double> observing{-0.125, 7.0};
  bool ok = p.initial == initial && p.dominant == dominant && p.offsets.size() == 4 && p.crossover.size() == 4 &&
            p.observing.size() == 2;
  for (std::size_t k = 0; ok && k < 4; ++k) {
    ok = std::abs(p.offsets[k] - offsets[k]) <= kExact && std::abs(p.crossover[k] - theta[k]) <= kExact;
  }
  for (std::size_t k = 0; ok && k < 2; ++k) ok = std::abs(p.observing[k] - observing[k]) <= kExact;
  return {ok, "dominant {4, 11}, observing {-0.125, 7}, 4 theta values"};
}

// 2 ---------------------------------------------------------------------------------------------

Outcome scale_shift() {
  fx::Rng rng(20240601);
  std::uniform_int_distribution<int> shift(1, 20);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Histogram h = fx::random_histogram(rng, 20);
    const std::vector<int> base = detect_dominant_peaks(h).dominant;
    for (double c : {0.5, 3.0, 17.0}) {
      Histogram s = h;
      s.counts *= c;
      s.total *= c;
      violations += detect_dominant_peaks(s).dominant != base;
    }
    const int s = shift(rng);
    Histogram moved;
    moved.counts.segment(s, kGrayLevels - s) = h.counts.head(kGrayLevels - s);
    moved.total = h.total;
    std::vector<int> expect = base;
    for (int& g : expect) g += s;
    violations += detect_dominant_peaks(moved).dominant != expect;
  }
  return {violations == 0, std::to_string(violations) + " violations over 1000 histograms x 4 transforms"};
}

// 3 ---------------------------------------------------------------------------------------------

// Exhaustive argmax of (1 - p_t)(w1 m1^2 + w2 m2^2), first maximum wins.
int otsu_oracle(const Eigen::ArrayXd& counts) {
  const double n = counts.sum();
  int best = -1;
  double best_v = 0.0;
  for (int t = 0; t < counts.size(); ++t) {
    double w1 = 0, s1 = 0, w2 = 0, s2 = 0;
    for (int i = 0; i < counts.size(); ++i) {
      const double p = counts(i) / n;
      (i <= t ? w1 : w2) += p;
      (i <= t ? s1 : s2) += i * p;
    }
    if (w1 <= 0.0 || w2 <= 0.0) continue;
    const double v = (1 - counts(t) / n) * (w1 * (s1 / w1) * (s1 / w1) + w2 * (s2 / w2) * (s2 / w2));
    if (best < 0 || v > best_v) {
      best = t;
      best_v = v;
    }
  }
  return best;
}

Outcome otsu() {
  fx::Rng rng(777);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Histogram h = fx::random_histogram(rng, trial % 10);
    mismatches += valley_emphasis_otsu(h).t_star != otsu_oracle(h.counts);
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 histograms"};
}

// 4 ---------------------------------------------------------------------------------------------

Outcome line_filter() {
  const LineFilterParams p;
  const RealImage line = multiscale_response(fx::line_image(), p).response;
  const double blob = multiscale_response(fx::blob_image(), p).response.maxCoeff();
  const double centre = line.col(32).segment(16, 32).minCoeff();
  RealImage ramp(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) ramp(y, x) = 1.3 * x - 0.6 * y + 40;
  }
  const int m = hessian_radius(p.bank.sigma(p.bank.count - 1));
  const RealImage r = multiscale_response(ramp, p).response;
  const double affine = r.block(m, m, 64 - 2 * m, 64 - 2 * m).abs().maxCoeff();
  char buf[160];
  std::snprintf(buf, sizeof buf, "centreline min %.3f vs blob max %.3f (ratio %.2f), affine max %.2e", centre, blob,
                centre / blob, affine);
  return {centre >= kLineOverBlob * blob && affine <= kAffineZero, buf};
}

// 5 ---------------------------------------------------------------------------------------------

Outcome crack_pipeline() {
  double worst_recall = 1.0, worst_leak = 0.0;
  int worst_components = 1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const fx::CrackScene s = fx::crack_scene(seed);
    const BinaryMask m = segment_crack(s.image, SegmentationParams{}).mask;
    worst_recall = std::min(worst_recall, double((m && s.crack).count()) / s.crack.count());
    worst_leak = std::max(worst_leak, double((m && s.blobs).count()) / s.blobs.count());
    const fx::CrackScene g = fx::crack_scene(seed, true);
    const int c = count_components(segment_crack(g.image, SegmentationParams{}).mask);
    if (c != 1) worst_components = c;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "5 seeds: min recall %.3f, max leakage %.3f, gap components %d", worst_recall,
                worst_leak, worst_components);
  return {worst_recall >= kMinRecall && worst_leak <= kMaxLeakage && worst_components == 1, buf};
}

// 6 ---------------------------------------------------------------------------------------------

Outcome stitching() {
  const fx::Strip s = fx::strip(42);
  const Mosaic m = stitch_sequence(s.tiles, s.poses, StitchParams{});
  double sum = 0.0;
  long n = 0;
  const int w = static_cast<int>(s.tiles[0].cols());
  for (int x = 0; x < m.canvas.cols(); ++x) {
    bool seam = false;
    for (int tx : s.tile_x) seam = seam || std::abs(x - tx) < kSeamHalfWidth || std::abs(x - (tx + w)) < kSeamHalfWidth;
    if (seam) continue;
    for (int y = 0; y < m.canvas.rows(); ++y) {
      sum += std::abs(double(m.canvas(y, x)) - double(s.truth(y, x)));
      ++n;
    }
  }
  const double mae = sum / n;
  bool placements_ok = m.canvas.cols() == s.tile_x.back() + w;
  for (std::size_t i = 0; i < s.tiles.size(); ++i) placements_ok = placements_ok && m.placements[i].x() == s.tile_x[i];

  int wrong = 0;
  for (double sigma : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
    fx::Strip noisy = fx::strip(100 + static_cast<int>(sigma), 10, 20.0, sigma);
    // odometry jitter kept small enough that every neighbour pair still clears the 30% floor
    for (std::size_t i = 1; i < noisy.poses.size(); ++i) {
      noisy.poses[i].odom_mm += Eigen::Vector2d(i % 3 == 0 ? 3.0 : -2.0, i % 2 ? 2.0 : -1.0);
    }
    const Mosaic nm = stitch_sequence(noisy.tiles, noisy.poses, StitchParams{});
    for (std::size_t i = 1; i < noisy.tiles.size(); ++i) {
      wrong += nm.placements[i] - nm.placements[i - 1] != Eigen::Vector2i(noisy.tile_x[i] - noisy.tile_x[i - 1], 0);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "MAE %.3f outside seams, %d wrong offsets over sigma 0..5", mae, wrong);
  return {mae < kMaxMosaicMae && placements_ok && wrong == 0, buf};
}

// 7 ---------------------------------------------------------------------------------------------

Outcome icp_recovery() {
  fx::Rng rng(31337);
  std::normal_distribution<double> noise(0.0, 0.002);
  double worst_angle = 0.0, worst_t = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3Xd ref = fx::bumpy_surface(1000, rng);
    const Rigid3d truth = fx::random_rigid(rng, 10 * kDeg, 0.05);
    Eigen::Matrix3Xd src = truth.inverse().apply(ref);
    for (Eigen::Index i = 0; i < src.size(); ++i) src.data()[i] += noise(rng);
    const Rigid3d prior = fx::random_rigid(rng, 3 * kDeg, 0.02) * truth;
    const IcpResult r = icp(PointCloud{src, std::nullopt}, PointCloud{ref, std::nullopt}, IcpParams{}, prior);
    worst_angle = std::max(worst_angle, (r.transform.inverse() * truth).angle() / kDeg);
    worst_t = std::max(worst_t, (r.transform.translation - truth.translation).norm());
  }

  int increases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3Xd ref = fx::bumpy_surface(600, rng);
    const Rigid3d truth = fx::random_rigid(rng, 10 * kDeg, 0.05);
    const Rigid3d prior = fx::random_rigid(rng, 3 * kDeg, 0.02) * truth;
    const IcpResult r =
        icp(PointCloud{truth.inverse().apply(ref), std::nullopt}, PointCloud{ref, std::nullopt}, IcpParams{}, prior);
    for (std::size_t k = 1; k < r.rmse_history.size(); ++k) {
      increases += r.rmse_history[k] > r.rmse_history[k - 1] + kRmseSlack;
    }
  }

  int nn_mismatch = 0;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_int_distribution<int> size(1, 500);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix3Xd a(3, size(rng)), b(3, size(rng));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
    const double d = 0.02 + 0.3 * (trial % 5) / 4.0;
    const auto fast = match(a, b, d);
    const auto slow = match_brute_force(a, b, d);
    bool same = fast.size() == slow.size();
    for (std::size_t k = 0; same && k < fast.size(); ++k) same = fast[k].src == slow[k].src && fast[k].ref == slow[k].ref;
    nn_mismatch += !same;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "worst %.3f deg / %.2f mm over 100 runs; %d rmse increases; %d NN mismatches",
                worst_angle, worst_t * 1000, increases, nn_mismatch);
  return {worst_angle <= kIcpMaxAngleDeg && worst_t <= kIcpMaxTranslation && increases == 0 && nn_mismatch == 0, buf};
}

// 8 ---------------------------------------------------------------------------------------------

Outcome simulator() {
  const RobotSpec spec;  // P = 6, F = 16, mu = 0.5, d / L = 0.25
  fx::Rng rng(8080);
  long unsafe = 0, maneuvers = 0;
  for (int run = 0; run < 1000; ++run) {
    const fx::WorldCase c = fx::random_world(rng, spec);
    const SimResult r = run_sim(c.world, spec, c.start, 2000, SimParams{}, false);
    unsafe += r.unsafe_steps;
    maneuvers += r.maneuvers;
  }
  double worst = 0.0;
  bool all_stable = true;
  for (int i = 0; i <= 9000; ++i) {
    const double a = i * (std::numbers::pi / 2) / 9000;
    worst = std::max(worst, required_force(spec, a));
    all_stable = all_stable && check_stability(spec, a).ok;
  }
  // the sampled sweep may miss the exact maximiser by a hair; evaluate it directly too
  worst = std::max(worst, required_force(spec, std::atan(1.0 / spec.friction)));
  const double expected = 6.0 * std::sqrt(5.0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%ld unsafe steps over 1000 runs (%ld maneuvers); worst requirement %.4f kgf (6 sqrt 5 = %.4f)",
                unsafe, maneuvers, worst, expected);
  return {unsafe == 0 && all_stable && std::abs(worst - expected) <= 1e-9, buf};
}

// 9 ---------------------------------------------------------------------------------------------

Outcome metrics() {
  fx::Rng rng(99);
  std::uniform_int_distribution<std::int64_t> u(0, 1'000'000);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const ConfusionCounts c{1 + u(rng), u(rng), u(rng), u(rng)};
    const Scores s = scores(c);
    const double pi = double(c.tp) / double(c.tp + c.fp);
    const double si = double(c.tp) / double(c.tp + c.fn);
    const double dsc = 2.0 * double(c.tp) / double(2 * c.tp + c.fp + c.fn);
    const double harmonic = 2 * pi * si / (pi + si);
    bad += std::abs(s.pi - pi) > kMetricTol || std::abs(s.si - si) > kMetricTol || std::abs(s.dsc - dsc) > kMetricTol ||
           std::abs(s.dsc - harmonic) > kMetricTol || s.pi < 0 || s.pi > 1 || s.si < 0 || s.si > 1;
  }
  return {bad == 0, std::to_string(bad) + " violations over 10^4 confusion counts"};
}

// 10 --------------------------------------------------------------------------------------------

Outcome peak_timing() {
  fx::Rng rng(5);
  const Histogram h = smooth(fx::random_histogram(rng, 0));
  std::vector<double> ms;
  std::size_t sink = 0;
  for (int i = 0; i < 100; ++i) {
    const auto t0 = Clock::now();
    sink += detect_dominant_peaks(h).dominant.size();
    ms.push_back(seconds_since(t0) * 1000.0);
  }
  std::nth_element(ms.begin(), ms.begin() + 50, ms.end());
  const double median = ms[50];
  char buf[120];
  std::snprintf(buf, sizeof buf, "median %.4f ms over 100 runs (%zu peaks)", median, sink / 100);
  return {median <= kPeakMedianMs, buf};
}

}  // namespace

int main() {
  int failed = 0;
  failed += !report(1, "peak-detection golden trace", 1.0, golden_trace);
  failed += !report(2, "scale/shift invariance", 10.0, scale_shift);
  failed += !report(3, "valley-emphasis Otsu oracle", 5.0, otsu);
  failed += !report(4, "line-filter discrimination", 5.0, line_filter);
  failed += !report(5, "crack pipeline recall/leakage", 30.0, crack_pipeline);
  failed += !report(6, "stitching reconstruction", 30.0, stitching);
  failed += !report(7, "ICP recovery", 60.0, icp_recovery);
  failed += !report(8, "simulator safety and adhesion sweep", 30.0, simulator);
  failed += !report(9, "metric identities", 2.0, metrics);
  failed += !report(10, "peak-detection timing", 0.0, peak_timing);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
