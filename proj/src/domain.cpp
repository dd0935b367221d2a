#include "ucql/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ucql {

namespace {

constexpr std::array<std::string_view, kNumBaseStates> kBaseNames = {
    "NotFound", "PassingBy", "LookAt", "Hesitating", "Approaching", "Established", "Leaving"};

// Only a0 has a documented duration (5 s); the rest are typical utterance or
// motion lengths for a small tabletop robot.
constexpr std::array<Action, kNumActions> kActions = {{
    {ActionId::A0, ActionKind::Wait, 5.0, "Robot waits for 5 secs until somebody comes."},
    {ActionId::A1, ActionKind::Verbal, 2.0, "Robot calls a passerby with a greeting."},
    {ActionId::A2, ActionKind::NonVerbal, 1.5, "Robot looks at a passerby."},
    {ActionId::A3, ActionKind::NonVerbal, 3.0, "Robot represents joy by the robot's motion."},
    {ActionId::A4, ActionKind::NonVerbal, 1.0, "Robot blinks the robot's eyes."},
    {ActionId::A5, ActionKind::Verbal, 1.5, "Robot says \"I'm sorry.\" in Japanese."},
    {ActionId::A6, ActionKind::Verbal, 1.5, "Robot says \"Excuse me.\" in Japanese."},
    {ActionId::A7, ActionKind::Verbal, 2.5, "Robot says \"It's rainy today.\" in Japanese."},
    {ActionId::A8, ActionKind::Verbal, 4.0, "Robot says how to start their own service."},
    {ActionId::A9, ActionKind::Verbal, 1.5, "Robot says goodbye."},
}};

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

BaseState base_state_from_code(int c) {
  if (c < 0 || c >= static_cast<int>(kNumBaseStates)) {
    throw std::out_of_range("base state code out of range: " + std::to_string(c));
  }
  return static_cast<BaseState>(c);
}

std::string_view to_string(BaseState s) { return kBaseNames[static_cast<std::size_t>(code(s))]; }

TransitionState TransitionState::from_index(std::size_t index) {
  if (index >= kNumTransitionStates) {
    throw std::out_of_range("transition state index out of range: " + std::to_string(index));
  }
  return transition(static_cast<int>(index / kNumBaseStates),
                    static_cast<int>(index % kNumBaseStates));
}

std::string TransitionState::symbol() const {
  std::string out = "s";
  out += static_cast<char>('0' + code(from));
  out += static_cast<char>('0' + code(to));
  return out;
}

TransitionState TransitionState::parse(std::string_view symbol) {
  if (symbol.size() != 3 || symbol[0] != 's') {
    throw std::invalid_argument("bad state symbol: " + std::string(symbol));
  }
  return TransitionState{base_state_from_code(symbol[1] - '0'),
                         base_state_from_code(symbol[2] - '0')};
}

std::array<TransitionState, kNumTransitionStates> all_transition_states() {
  std::array<TransitionState, kNumTransitionStates> out{};
  for (std::size_t i = 0; i < kNumTransitionStates; ++i) out[i] = TransitionState::from_index(i);
  return out;
}

std::string Action::symbol() const { return "a" + std::to_string(index()); }

bool Action::is_attract() const {
  switch (id) {
    case ActionId::A1:
    case ActionId::A5:
    case ActionId::A6:
    case ActionId::A7:
      return true;
    default:
      return false;
  }
}

const std::array<Action, kNumActions>& action_table() { return kActions; }

const Action& action(ActionId id) { return kActions[static_cast<std::size_t>(id)]; }

const Action& action(std::size_t index) {
  if (index >= kNumActions) {
    throw std::out_of_range("action index out of range: " + std::to_string(index));
  }
  return kActions[index];
}

ActionId parse_action_symbol(std::string_view symbol) {
  if (symbol.size() != 2 || symbol[0] != 'a' || symbol[1] < '0' || symbol[1] > '9') {
    throw std::invalid_argument("bad action symbol: " + std::string(symbol));
  }
  return static_cast<ActionId>(symbol[1] - '0');
}

Trajectory::Trajectory(std::vector<PasserbyFrame> frames) {
  frames_.reserve(frames.size());
  for (const auto& f : frames) push_back(f);
}

void Trajectory::push_back(const PasserbyFrame& frame) {
  if (!(frame.t >= 0.0) || !std::isfinite(frame.t)) {
    throw std::invalid_argument("frame time must be finite and non-negative");
  }
  if (!frames_.empty() && !(frame.t > frames_.back().t)) {
    throw std::invalid_argument("frame times must be strictly increasing");
  }
  frames_.push_back(frame);
}

std::optional<std::string> validate(const LearnerParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) return "alpha must be in (0,1]";
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) return "gamma must be in (0,1]";
  if (!in_open_unit(p.k_T)) return "k_T must be in (0,1)";
  if (!in_open_unit(p.T_min)) return "T_min must be in (0,1)";
  if (!std::isfinite(p.q_C)) return "q_C must be finite";
  if (!std::isfinite(p.q_H)) return "q_H must be finite";
  if (!(p.c_a >= 0.0) || !std::isfinite(p.c_a)) return "c_a must be >= 0";
  if (!(p.c_s >= 0.0) || !std::isfinite(p.c_s)) return "c_s must be >= 0";
  if (!(p.c_g >= 0.0) || !std::isfinite(p.c_g)) return "c_g must be >= 0";
  return std::nullopt;
}

void require_valid(const LearnerParams& p) {
  if (auto err = validate(p)) throw std::invalid_argument(*err);
}

QTable::QTable() { temp_.fill(1.0); }

std::array<double, kNumActions> QTable::row(TransitionState s) const {
  std::array<double, kNumActions> out{};
  for (std::size_t a = 0; a < kNumActions; ++a) out[a] = q(s.index(), a);
  return out;
}

double QTable::max_q(TransitionState s) const {
  double best = q(s.index(), 0);
  for (std::size_t a = 1; a < kNumActions; ++a) best = std::max(best, q(s.index(), a));
  return best;
}

std::string_view to_string(Condition c) { return c == Condition::Before ? "before" : "after"; }

std::string_view to_string(ScenarioKind k) {
  return k == ScenarioKind::PassThrough ? "pass_through" : "curious";
}

Condition parse_condition(std::string_view text) {
  if (text == "before") return Condition::Before;
  if (text == "after") return Condition::After;
  throw std::invalid_argument("unknown condition: " + std::string(text));
}

ScenarioKind parse_scenario(std::string_view text) {
  if (text == "pass_through") return ScenarioKind::PassThrough;
  if (text == "curious") return ScenarioKind::Curious;
  throw std::invalid_argument("unknown scenario: " + std::string(text));
}

}  // namespace ucql
