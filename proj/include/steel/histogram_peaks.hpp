#pragma once

// Histogram smoothing and dominant-peak detection.
//
// Initial peaks are strict local maxima of the smoothed histogram. Each initial peak k
// gets an offset distance L(k) to its observing location and a crossover index
// theta(k) = d(k) / L(k) (height over distance, i.e. how steeply the peak is seen from
// the observer). The scan walks the peaks left to right and accepts a peak whose
// crossover index beats both neighbours. Every acceptance moves the observer to
// g(k) - L(k) and re-measures the crossover index of the remaining peaks from there.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "steel/imaging.hpp"

namespace steel {

inline constexpr int kGrayLevels = 256;

/// Per-level pixel counts. Index i is intensity level i; images always give 256 levels
/// but the peak machinery works on any length >= 1.
struct Histogram {
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(kGrayLevels);
  double total = 0.0;

  int levels() const { return static_cast<int>(counts.size()); }
  std::span<const double> view() const { return {counts.data(), static_cast<std::size_t>(counts.size())}; }

  static Histogram from_counts(std::span<const double> counts);
};

struct PeakSet {
  std::vector<int> initial;        ///< delta: strictly increasing levels
  std::vector<int> dominant;       ///< beta: accepted levels, subset of initial
  std::vector<double> observing;   ///< alpha: one observing location per dominant peak
  std::vector<double> crossover;   ///< theta per initial peak, as evaluated when it was a candidate
  std::vector<double> offsets;     ///< L per initial peak
};

Histogram compute_histogram(const GrayImage& image);

/// Width-3 moving average over the original counts, endpoints replicated.
Histogram smooth(const Histogram& h);

/// Levels strictly greater than both neighbours. The first and last level never qualify.
std::vector<int> find_initial_peaks(std::span<const double> counts);

/// Level of the successor used by the last initial peak: the first zero-count level above
/// it, or one past the top level if the histogram never returns to zero.
int virtual_successor_level(std::span<const double> counts, int last_peak);

/// Offset distance L for initial peak `index` (0-based). The last peak is measured against a
/// virtual successor of height 0 at virtual_successor_level(). In the equal-height branch the
/// ratio uses the 1-based rank: (index + 2) / (index + 1).
double offset_distance(std::span<const double> counts, std::span<const int> peaks, std::size_t index);

/// d(k) = h(k) - min(h(k), h(k+1)) / 2 against the same successor as offset_distance.
double peak_prominence(std::span<const double> counts, std::span<const int> peaks, std::size_t index);

/// theta = d / L; +infinity when L == 0.
double crossover_index(std::span<const double> counts, std::span<const int> peaks, std::size_t index);

/// Relative tolerance under which two crossover indices count as tied. Ties go to the lower level.
inline constexpr double kCrossoverTieTolerance = 1e-12;

PeakSet detect_dominant_peaks(const Histogram& smoothed);

/// Global crack-isolation threshold. Two or more dominant peaks: the level of the minimum
/// count strictly between the darkest dominant peak and the next one (lowest level wins
/// ties). One dominant peak: its observing location rounded to the nearest level.
/// Throws NoStructureError when nothing is dominant.
int peaks_to_global_threshold(const Histogram& smoothed, const PeakSet& peaks);

}  // namespace steel
