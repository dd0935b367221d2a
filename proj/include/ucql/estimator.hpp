#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>

#include "ucql/domain.hpp"

namespace ucql {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Thresholds of the rule-based engagement classifier.
struct EstimatorConfig {
  Point2 exhibit_pos{0.0, 0.0};
  double engage_radius = 1.0;        // m
  double look_cone_rad = 0.5;        // half-angle around the exhibit bearing
  double walk_speed_min = 0.3;       // m/s; slower counts as standing
  double dwell_established_s = 3.0;  // s standing close and facing the exhibit
  double approach_dot_min = 0.5;     // cosine between heading and exhibit direction
  double velocity_window_s = 0.5;
  double gaze_window_s = 2.0;

  // Seconds of history classify_base may look at.
  double history_span_s() const;
};

std::optional<std::string> validate(const EstimatorConfig& cfg);

struct EstimatedState {
  BaseState base = BaseState::NotFound;
  TransitionState transition;
  double t = 0.0;
};

// Classifies the last frame of `history` given the previous base state.
// Rule order: NotFound, Established, Leaving, Approaching, Hesitating, LookAt,
// then PassingBy. A standing person matching none of the rules keeps the
// previous state. With too little history to estimate a velocity only the
// gaze is used.
BaseState classify_base(std::span<const PasserbyFrame> history, const EstimatorConfig& cfg,
                        BaseState prev);

TransitionState step_transition(BaseState prev, BaseState curr);

// Streaming wrapper: keeps a bounded window of frames and the previous state.
class Estimator {
 public:
  explicit Estimator(EstimatorConfig cfg);

  EstimatedState push(const PasserbyFrame& frame);
  BaseState current() const { return prev_; }
  void reset();

 private:
  EstimatorConfig cfg_;
  std::deque<PasserbyFrame> window_;
  std::vector<PasserbyFrame> scratch_;
  BaseState prev_ = BaseState::NotFound;
};

// Decision state seen by the learner: s_ij when the base state changes from i
// to j, collapsing to s_jj once the state has been stable for `tick_s`.
class TransitionTracker {
 public:
  explicit TransitionTracker(double tick_s = 1.0) : tick_s_(tick_s) {}

  // Returns true when the base state changed on this sample.
  bool observe(BaseState base, double t);
  TransitionState state() const { return state_; }

 private:
  double tick_s_;
  TransitionState state_{};
  double changed_at_ = 0.0;
};

}  // namespace ucql
