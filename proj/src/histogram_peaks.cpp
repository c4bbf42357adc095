#include "steel/histogram_peaks.hpp"

#include <cmath>
#include <limits>

namespace steel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Successor {
  int level;
  double height;
};

Successor successor_of(std::span<const double> counts, std::span<const int> peaks, std::size_t index) {
  if (index >= peaks.size()) throw PreconditionError("peak index out of range");
  if (index + 1 < peaks.size()) {
    const int next = peaks[index + 1];
    return {next, counts[static_cast<std::size_t>(next)]};
  }
  return {virtual_successor_level(counts, peaks[index]), 0.0};
}

// a strictly beats b, with near-equal finite values treated as a tie.
bool beats(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a > b;
  if (std::abs(a - b) <= kCrossoverTieTolerance * std::max(std::abs(a), std::abs(b))) return false;
  return a > b;
}

// A candidate on the left of a tie wins it.
bool holds_against_right(double candidate, double right) {
  if (candidate == kInf && right == kInf) return true;
  if (!std::isinf(candidate) && !std::isinf(right) &&
      std::abs(candidate - right) <= kCrossoverTieTolerance * std::max(std::abs(candidate), std::abs(right))) {
    return true;
  }
  return candidate > right;
}

}  // namespace

Histogram Histogram::from_counts(std::span<const double> counts) {
  if (counts.empty()) throw PreconditionError("histogram needs at least one level");
  Histogram h;
  h.counts = Eigen::Map<const Eigen::ArrayXd>(counts.data(), static_cast<Eigen::Index>(counts.size()));
  if ((h.counts < 0.0).any()) throw PreconditionError("histogram counts must be non-negative");
  h.total = h.counts.sum();
  return h;
}

Histogram compute_histogram(const GrayImage& image) {
  Histogram h;
  for (Eigen::Index i = 0; i < image.size(); ++i) h.counts(image.data()[i]) += 1.0;
  h.total = static_cast<double>(image.size());
  return h;
}

Histogram smooth(const Histogram& h) {
  const Eigen::Index n = h.counts.size();
  Histogram out;
  out.counts.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prev = h.counts(std::max<Eigen::Index>(i - 1, 0));
    const double next = h.counts(std::min<Eigen::Index>(i + 1, n - 1));
    out.counts(i) = (prev + h.counts(i) + next) / 3.0;
  }
  out.total = h.total;
  return out;
}

std::vector<int> find_initial_peaks(std::span<const double> counts) {
  std::vector<int> peaks;
  for (std::size_t i = 1; i + 1 < counts.size(); ++i) {
    if (counts[i] > counts[i - 1] && counts[i] > counts[i + 1]) peaks.push_back(static_cast<int>(i));
  }
  return peaks;
}

int virtual_successor_level(std::span<const double> counts, int last_peak) {
  for (std::size_t i = static_cast<std::size_t>(last_peak) + 1; i < counts.size(); ++i) {
    if (counts[i] == 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(counts.size());
}

double offset_distance(std::span<const double> counts, std::span<const int> peaks, std::size_t index) {
  const Successor next = successor_of(counts, peaks, index);
  const double height = counts[static_cast<std::size_t>(peaks[index])];
  const double numerator = height * (next.level - peaks[index]);
  if (numerator == 0.0) return 0.0;
  if (next.height != height) return numerator / std::abs(next.height - height);
  const double rank = static_cast<double>(index) + 1.0;
  const double denominator = std::abs((rank + 1.0) / rank * next.height - height);
  return denominator == 0.0 ? kInf : numerator / denominator;
}

double peak_prominence(std::span<const double> counts, std::span<const int> peaks, std::size_t index) {
  const Successor next = successor_of(counts, peaks, index);
  const double height = counts[static_cast<std::size_t>(peaks[index])];
  return height - std::min(height, next.height) / 2.0;
}

double crossover_index(std::span<const double> counts, std::span<const int> peaks, std::size_t index) {
  const double offset = offset_distance(counts, peaks, index);
  if (offset == 0.0) return kInf;
  return peak_prominence(counts, peaks, index) / offset;
}

PeakSet detect_dominant_peaks(const Histogram& smoothed) {
  const std::span<const double> counts = smoothed.view();
  PeakSet out;
  out.initial = find_initial_peaks(counts);
  const std::size_t n = out.initial.size();
  std::vector<double> prominence(n);
  std::vector<double> theta(n);
  out.offsets.resize(n);
  out.crossover.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.offsets[k] = offset_distance(counts, out.initial, k);
    prominence[k] = peak_prominence(counts, out.initial, k);
    theta[k] = out.offsets[k] == 0.0 ? kInf : prominence[k] / out.offsets[k];
  }

  if (n < 3) {
    // Too few peaks for a neighbourhood comparison: every initial peak is a mode.
    out.crossover = theta;
    for (std::size_t k = 0; k < n; ++k) {
      out.dominant.push_back(out.initial[k]);
      out.observing.push_back(out.initial[k] - out.offsets[k]);
    }
    return out;
  }

  for (std::size_t j = 0; j < n; ++j) {
    out.crossover[j] = theta[j];
    const double left = j > 0 ? theta[j - 1] : -kInf;
    const double right = j + 1 < n ? theta[j + 1] : -kInf;
    if (!beats(theta[j], left) || !holds_against_right(theta[j], right)) continue;

    out.dominant.push_back(out.initial[j]);
    out.observing.push_back(out.initial[j] - out.offsets[j]);
    // Re-measure the remaining peaks from the new observing location. The distance is
    // accumulated as (g_i - g_j) + L_j so that it does not depend on absolute level.
    for (std::size_t i = j + 1; i < n; ++i) {
      const double distance = static_cast<double>(out.initial[i] - out.initial[j]) + out.offsets[j];
      theta[i] = distance > 0.0 && std::isfinite(distance) ? prominence[i] / distance : 0.0;
    }
  }
  return out;
}

int peaks_to_global_threshold(const Histogram& smoothed, const PeakSet& peaks) {
  if (peaks.dominant.empty()) throw NoStructureError();
  if (peaks.dominant.size() == 1) {
    const double alpha = peaks.observing.front();
    if (!std::isfinite(alpha)) return 0;
    return static_cast<int>(std::clamp(std::lround(alpha), 0L, static_cast<long>(smoothed.levels() - 1)));
  }
  const int lo = peaks.dominant[0];
  const int hi = peaks.dominant[1];
  int best = lo + 1;
  for (int i = lo + 1; i < hi; ++i) {
    if (smoothed.counts(i) < smoothed.counts(best)) best = i;
  }
  return best;
}

}  // namespace steel
