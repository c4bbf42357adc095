#pragma once

// Pixel-level segmentation scores: precision (PI), sensitivity (SI), Dice (DSC).

#include <cstdint>
#include <string>
#include <vector>

#include "steel/imaging.hpp"

namespace steel {

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

struct Scores {
  double pi = 0.0;
  double si = 0.0;
  double dsc = 0.0;
};

/// PI = TP/(TP+FP), SI = TP/(TP+FN), DSC = 2TP/(2TP+FP+FN).
/// Zero denominators: PI is 1 when the ground truth is empty (else 0), SI is 1 when the
/// prediction is empty (else 0), DSC is 1 (both masks empty).
Scores scores(const ConfusionCounts& c);

enum class Lighting { normal, low };
const char* to_string(Lighting l);
Lighting parse_lighting(const std::string& s);

struct ComparisonRow {
  std::string method;
  Lighting lighting = Lighting::normal;
  BinaryMask pred;
  BinaryMask gt;
};

struct MethodReport {
  std::string method;
  Lighting lighting = Lighting::normal;
  ConfusionCounts counts;
  Scores scores;
};

struct Comparison {
  std::vector<MethodReport> reports;
  std::string table;  ///< aligned text, one line per method, PI/SI/DSC per lighting column group
  std::string json;
};

Comparison compare(const std::vector<ComparisonRow>& rows);

/// Published scores for the proposed method under normal lighting. Kept for documentation;
/// the source images are not available so nothing recomputes them.
struct ReferenceScores {
  static constexpr double pi = 0.9360;
  static constexpr double si = 0.6507;
  static constexpr double dsc = 0.7677;
};

}  // namespace steel
