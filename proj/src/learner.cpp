#include "ucql/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ucql {

PolicyKind PolicyKind::epsilon_greedy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");
  return {Type::EpsilonGreedy, eps};
}

int rank(BaseState s) {
  switch (s) {
    case BaseState::NotFound:
      return 0;
    case BaseState::PassingBy:
      return 1;
    case BaseState::LookAt:
      return 2;
    case BaseState::Hesitating:
      return 3;
    case BaseState::Approaching:
      return 4;
    case BaseState::Established:
      return 5;
    case BaseState::Leaving:
      return 0;
  }
  return 0;
}

QTable make_initial_q(const LearnerParams& params) {
  require_valid(params);
  QTable table;
  for (int j = 1; j <= 5; ++j) table.q(transition(0, j), ActionId::A1) = params.q_C;
  for (int i = 1; i <= 4; ++i) table.q(transition(i, 5), ActionId::A8) = params.q_H;
  table.q(transition(5, 6), ActionId::A9) = params.q_H;
  table.q(transition(5, 0), ActionId::A9) = params.q_H;
  return table;
}

std::array<double, kNumActions> softmax_probabilities(std::span<const double, kNumActions> q_row,
                                                      double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const double top = *std::max_element(q_row.begin(), q_row.end());
  std::array<double, kNumActions> p{};
  double sum = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    p[a] = std::exp((q_row[a] - top) / temperature);
    sum += p[a];
  }
  for (auto& v : p) v /= sum;
  return p;
}

void update_temperature(QTable& table, TransitionState s, const LearnerParams& params) {
  double& t = table.temperature(s);
  if (!(t < params.T_min)) t *= params.k_T;
  ++table.count(s);
}

std::size_t greedy_index(std::span<const double, kNumActions> q_row) {
  return static_cast<std::size_t>(std::max_element(q_row.begin(), q_row.end()) - q_row.begin());
}

namespace {

std::size_t sample_index(const std::array<double, kNumActions>& p, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  // u landed in the rounding slack above the cumulative sum.
  for (std::size_t a = kNumActions; a-- > 0;) {
    if (p[a] > 0.0) return a;
  }
  return 0;
}

}  // namespace

Selection select_action(double t_c, TransitionState s, const QTable& table,
                        const PolicyKind& policy, Rng& rng) {
  const auto row = table.row(s);
  std::size_t index = 0;
  switch (policy.type) {
    case PolicyKind::Type::Greedy:
      index = greedy_index(row);
      break;
    case PolicyKind::Type::EpsilonGreedy:
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < policy.epsilon) {
        index = std::uniform_int_distribution<std::size_t>(0, kNumActions - 1)(rng);
      } else {
        index = greedy_index(row);
      }
      break;
    case PolicyKind::Type::Softmax:
      index = sample_index(softmax_probabilities(row, table.temperature(s)), rng);
      break;
  }
  return {static_cast<ActionId>(index), t_c};
}

Selection select_action(double t_c, TransitionState s, const QTable& table,
                        const PolicyKind& policy, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return select_action(t_c, s, table, policy, rng);
}

double reward(TransitionState s_ta, ActionId a, TransitionState s_tc, const LearnerParams& params) {
  const bool waited = action(a).is_wait();
  const int before = rank(s_ta.to);
  const int after = rank(s_tc.to);
  double r = 0.0;
  if (!waited) r -= params.c_a;
  if (after < before && !waited) r -= params.c_s * (before - after);
  if (after > before) r += params.c_g * (after - before);
  return r;
}

void update_policy(TransitionState s_ta, ActionId a, TransitionState s_tc, bool finished,
                   QTable& table, const LearnerParams& params, bool terminal) {
  if (!finished) return;
  const double r = reward(s_ta, a, s_tc, params);
  const double q_old = table.q(s_ta, a);
  const double target = terminal ? r : r + params.gamma * table.max_q(s_tc);
  table.q(s_ta, a) = (1.0 - params.alpha) * q_old + params.alpha * target;
  update_temperature(table, s_ta, params);
}

}  // namespace ucql
