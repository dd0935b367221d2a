#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ucql {

// Engagement stage of a single passerby. Integer codes are the state
// subscripts used in transition symbols (s_ij).
enum class BaseState : std::uint8_t {
  NotFound = 0,
  PassingBy = 1,
  LookAt = 2,
  Hesitating = 3,
  Approaching = 4,
  Established = 5,
  Leaving = 6,
};

inline constexpr std::size_t kNumBaseStates = 7;
inline constexpr std::size_t kNumTransitionStates = kNumBaseStates * kNumBaseStates;
inline constexpr std::size_t kNumActions = 10;

constexpr int code(BaseState s) { return static_cast<int>(s); }
BaseState base_state_from_code(int code);
std::string_view to_string(BaseState s);

// Learner state: the pair (previous base state, current base state).
struct TransitionState {
  BaseState from = BaseState::NotFound;
  BaseState to = BaseState::NotFound;

  constexpr std::size_t index() const {
    return static_cast<std::size_t>(code(from)) * kNumBaseStates +
           static_cast<std::size_t>(code(to));
  }
  static TransitionState from_index(std::size_t index);
  // "s01" for NotFound -> PassingBy.
  std::string symbol() const;
  static TransitionState parse(std::string_view symbol);

  friend constexpr bool operator==(TransitionState, TransitionState) = default;
};

constexpr TransitionState transition(int from, int to) {
  return TransitionState{static_cast<BaseState>(from), static_cast<BaseState>(to)};
}

std::array<TransitionState, kNumTransitionStates> all_transition_states();

enum class ActionId : std::uint8_t { A0, A1, A2, A3, A4, A5, A6, A7, A8, A9 };
enum class ActionKind : std::uint8_t { Wait, Verbal, NonVerbal };

struct Action {
  ActionId id;
  ActionKind kind;
  double duration_s;
  std::string_view label;

  std::size_t index() const { return static_cast<std::size_t>(id); }
  std::string symbol() const;  // "a0".."a9"
  bool is_wait() const { return kind == ActionKind::Wait; }
  // Greeting or social utterance meant to draw a passerby in (a1, a5-a7).
  bool is_attract() const;
};

// The robot's repertoire; index i holds action a_i.
const std::array<Action, kNumActions>& action_table();
const Action& action(ActionId id);
const Action& action(std::size_t index);
ActionId parse_action_symbol(std::string_view symbol);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct HeadAngle {
  double yaw = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  friend bool operator==(const HeadAngle&, const HeadAngle&) = default;
};

// One sensor sample. Position and head angle are meaningful only when
// detected is set.
struct PasserbyFrame {
  double t = 0.0;
  bool detected = false;
  Vec3 p;
  HeadAngle theta;

  static PasserbyFrame missing(double t) { return PasserbyFrame{t, false, {}, {}}; }
  friend bool operator==(const PasserbyFrame&, const PasserbyFrame&) = default;
};

// Frames of one episode, strictly increasing in time.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<PasserbyFrame> frames);

  void push_back(const PasserbyFrame& frame);
  const std::vector<PasserbyFrame>& frames() const { return frames_; }
  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  const PasserbyFrame& back() const { return frames_.back(); }
  double t_end() const { return frames_.empty() ? 0.0 : frames_.back().t; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<PasserbyFrame> frames_;
};

struct LearnerParams {
  double alpha = 0.5;
  double gamma = 0.999;
  double k_T = 0.98;
  double T_min = 0.01;
  double q_C = 1.0;
  double q_H = 5.0;
  double c_a = 0.1;  // cost of any non-wait action
  double c_s = 1.0;  // discomfort per lost rank step
  double c_g = 1.0;  // reward per gained rank step
};

// nullopt when every bound holds, otherwise a message naming the first
// offending field.
std::optional<std::string> validate(const LearnerParams& p);
void require_valid(const LearnerParams& p);

// Q values, per-state update counts and per-state temperatures.
class QTable {
 public:
  QTable();

  double q(TransitionState s, ActionId a) const { return q_[cell(s, a)]; }
  double& q(TransitionState s, ActionId a) { return q_[cell(s, a)]; }
  double q(std::size_t state_index, std::size_t action_index) const {
    return q_[state_index * kNumActions + action_index];
  }
  double& q(std::size_t state_index, std::size_t action_index) {
    return q_[state_index * kNumActions + action_index];
  }

  std::array<double, kNumActions> row(TransitionState s) const;
  double max_q(TransitionState s) const;

  std::uint64_t count(TransitionState s) const { return n_[s.index()]; }
  std::uint64_t& count(TransitionState s) { return n_[s.index()]; }
  double temperature(TransitionState s) const { return temp_[s.index()]; }
  double& temperature(TransitionState s) { return temp_[s.index()]; }

  const std::array<double, kNumTransitionStates * kNumActions>& values() const { return q_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  static std::size_t cell(TransitionState s, ActionId a) {
    return s.index() * kNumActions + static_cast<std::size_t>(a);
  }

  std::array<double, kNumTransitionStates * kNumActions> q_{};
  std::array<std::uint64_t, kNumTransitionStates> n_{};
  std::array<double, kNumTransitionStates> temp_{};
};

struct ActionEvent {
  double t_a = 0.0;
  ActionId action = ActionId::A0;
  TransitionState state_at_selection;
  bool finished = false;
  friend bool operator==(const ActionEvent&, const ActionEvent&) = default;
};

enum class Condition : std::uint8_t { Before, After };
enum class ScenarioKind : std::uint8_t { PassThrough, Curious };

std::string_view to_string(Condition c);
std::string_view to_string(ScenarioKind k);
Condition parse_condition(std::string_view text);
ScenarioKind parse_scenario(std::string_view text);

struct EpisodeLabels {
  bool used_service = false;
  bool discomforted = false;
  friend bool operator==(const EpisodeLabels&, const EpisodeLabels&) = default;
};

struct Episode {
  std::uint64_t id = 0;
  Trajectory trajectory;
  // Estimated base state per frame, parallel to trajectory.frames().
  std::vector<BaseState> states;
  std::vector<ActionEvent> events;
  std::optional<EpisodeLabels> labels;
  std::optional<Condition> condition;
  std::optional<ScenarioKind> scenario;

  double duration() const { return trajectory.t_end(); }
  friend bool operator==(const Episode&, const Episode&) = default;
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  std::uint64_t correct() const { return tp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

}  // namespace ucql
