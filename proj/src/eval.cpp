#include "ucql/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ucql {

std::vector<Episode> cleanse(std::span<const Episode> episodes, const CleanseRules& rules) {
  if (!(rules.min_duration_s > 0.0)) throw std::invalid_argument("min_duration_s must be > 0");
  std::vector<Episode> kept;
  for (const Episode& e : episodes) {
    if (e.duration() < rules.min_duration_s) continue;
    if (rules.drop_all_s00) {
      const bool nobody = std::all_of(e.states.begin(), e.states.end(),
                                      [](BaseState s) { return s == BaseState::NotFound; });
      if (nobody) continue;
    }
    kept.push_back(e);
  }
  return kept;
}

Outcome classify_episode(const Episode& e, std::optional<bool> used) {
  Outcome out;
  out.called = std::any_of(e.events.begin(), e.events.end(),
                           [](const ActionEvent& ev) { return action(ev.action).is_attract(); });
  if (used) {
    out.used = *used;
  } else if (e.labels) {
    out.used = e.labels->used_service;
  } else {
    throw std::invalid_argument("episode " + std::to_string(e.id) +
                                " has no service label and none was supplied");
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const Outcome> outcomes) {
  ConfusionMatrix m;
  for (const Outcome& o : outcomes) {
    if (o.called && o.used) {
      ++m.tp;
    } else if (o.called) {
      ++m.fp;
    } else if (o.used) {
      ++m.fn;
    } else {
      ++m.tn;
    }
  }
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  if (m.total() == 0) throw std::domain_error("accuracy of an empty confusion matrix");
  return static_cast<double>(m.correct()) / static_cast<double>(m.total());
}

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double density(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// P(0 < Z < z) = phi(z) * sum_n z^(2n+1) / (1*3*...*(2n+1)); all terms positive.
double central_mass(double z) {
  double term = z;
  double sum = z;
  for (int n = 1; n < 500; ++n) {
    term *= z * z / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return density(z) * sum;
}

// Laplace continued fraction phi(z) / (z + 1/(z + 2/(z + 3/(z + ...)))),
// evaluated with the modified Lentz method.
double tail_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double f = z;
  double c = z;
  double d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = n;
    d = z + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return density(z) / f;
}

}  // namespace

double normal_upper_tail(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.0) return 1.0 - normal_upper_tail(-z);
  if (z < 2.5) return 0.5 - central_mass(z);
  if (z > 40.0) return 0.0;
  return tail_continued_fraction(z);
}

TestResult proportion_test(const ConfusionMatrix& before, const ConfusionMatrix& after) {
  if (before.total() == 0 || after.total() == 0) {
    throw std::domain_error("proportion test needs non-empty matrices");
  }
  const double n1 = static_cast<double>(before.total());
  const double n2 = static_cast<double>(after.total());
  const double x1 = static_cast<double>(before.correct());
  const double x2 = static_cast<double>(after.correct());

  TestResult r;
  r.accuracy_before = x1 / n1;
  r.accuracy_after = x2 / n2;
  const double pooled = (x1 + x2) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se == 0.0) {
    if (r.accuracy_before != r.accuracy_after) {
      throw std::domain_error("degenerate proportion test: zero pooled variance");
    }
    r.z = 0.0;
    r.p = 0.5;
  } else {
    r.z = (r.accuracy_after - r.accuracy_before) / se;
    r.p = normal_upper_tail(r.z);
  }
  for (double level : kSignificanceLevels) {
    if (r.p < level) r.significant_at.push_back(level);
  }
  return r;
}

}  // namespace ucql
