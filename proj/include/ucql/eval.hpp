#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucql/domain.hpp"

namespace ucql {

struct CleanseRules {
  double min_duration_s = 1.0;
  bool drop_all_s00 = true;
};

// Drops episodes shorter than min_duration_s and episodes in which nobody was
// ever seen (every transition is s00).
std::vector<Episode> cleanse(std::span<const Episode> episodes, const CleanseRules& rules = {});

struct Outcome {
  bool called = false;
  bool used = false;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// called: the robot made a greeting or social utterance (a1, a5, a6, a7).
// used: taken from the simulator labels, or from `used` for unlabeled field
// episodes; throws std::invalid_argument when neither is available.
Outcome classify_episode(const Episode& e, std::optional<bool> used = std::nullopt);

ConfusionMatrix confusion_matrix(std::span<const Outcome> outcomes);

// (tp + tn) / total; throws std::domain_error on an empty matrix.
double accuracy(const ConfusionMatrix& m);

// Upper tail of the standard normal, P(Z > z), accurate to ~1e-15 relative.
double normal_upper_tail(double z);

struct TestResult {
  double z = 0.0;
  double p = 0.5;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  std::vector<double> significant_at;
};

inline constexpr double kSignificanceLevels[] = {0.05, 0.01, 0.001};

// Pooled two-proportion z-test on accuracy, alternative: after > before.
TestResult proportion_test(const ConfusionMatrix& before, const ConfusionMatrix& after);

}  // namespace ucql
