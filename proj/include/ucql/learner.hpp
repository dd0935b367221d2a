#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>

#include "ucql/domain.hpp"

namespace ucql {

using Rng = std::mt19937_64;

struct PolicyKind {
  enum class Type : std::uint8_t { Greedy, EpsilonGreedy, Softmax };
  Type type = Type::Softmax;
  double epsilon = 0.0;

  static PolicyKind greedy() { return {Type::Greedy, 0.0}; }
  static PolicyKind epsilon_greedy(double eps);
  static PolicyKind softmax() { return {Type::Softmax, 0.0}; }
};

// Engagement rank used by the discomfort and goal predicates of the reward.
// Established is the unique maximum; Leaving ranks with NotFound.
int rank(BaseState s);

// Designed starting table Q_B: greeting from NotFound, service explanation on
// reaching Established, farewell when an engaged passerby goes away.
QTable make_initial_q(const LearnerParams& params);

// Boltzmann distribution over a row of Q values, shifted by the row maximum.
std::array<double, kNumActions> softmax_probabilities(std::span<const double, kNumActions> q_row,
                                                      double temperature);

// Decays T(s) by k_T while T(s) >= T_min, then leaves it frozen. Counts the
// update on s either way.
void update_temperature(QTable& table, TransitionState s, const LearnerParams& params);

// Lowest-index argmax.
std::size_t greedy_index(std::span<const double, kNumActions> q_row);

struct Selection {
  ActionId action;
  double t_a;
};

Selection select_action(double t_c, TransitionState s, const QTable& table,
                        const PolicyKind& policy, Rng& rng);
Selection select_action(double t_c, TransitionState s, const QTable& table,
                        const PolicyKind& policy, std::uint64_t rng_seed);

// Reward for action a taken in s_ta, observed to end in s_tc.
double reward(TransitionState s_ta, ActionId a, TransitionState s_tc, const LearnerParams& params);

// One Q-learning step for a finished action; unfinished actions leave the
// table untouched. A terminal step drops the bootstrap term (the passerby is
// gone and the state chain restarts with the next episode).
void update_policy(TransitionState s_ta, ActionId a, TransitionState s_tc, bool finished,
                   QTable& table, const LearnerParams& params, bool terminal = false);

}  // namespace ucql
