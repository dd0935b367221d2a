#include "ucql/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ucql {

namespace {

constexpr double kEps = 1e-9;

struct Motion {
  double vx = 0.0;
  double vy = 0.0;
  double speed() const { return std::hypot(vx, vy); }
};

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

double distance_to(const PasserbyFrame& f, const Point2& e) {
  return std::hypot(f.p.x - e.x, f.p.y - e.y);
}

bool facing(const PasserbyFrame& f, const EstimatorConfig& cfg) {
  const double bearing = std::atan2(cfg.exhibit_pos.y - f.p.y, cfg.exhibit_pos.x - f.p.x);
  return std::abs(wrap_angle(f.theta.yaw - bearing)) <= cfg.look_cone_rad;
}

// Finite-difference velocity over the trailing window ending at `end`
// (inclusive). Needs a detected run covering at least half the window.
std::optional<Motion> motion_at(std::span<const PasserbyFrame> h, std::size_t end,
                                const EstimatorConfig& cfg) {
  const PasserbyFrame& last = h[end];
  std::size_t first = end;
  while (first > 0) {
    const PasserbyFrame& cand = h[first - 1];
    if (!cand.detected || last.t - cand.t > cfg.velocity_window_s + kEps) break;
    --first;
  }
  const double span = last.t - h[first].t;
  if (first == end || span < 0.5 * cfg.velocity_window_s - kEps) return std::nullopt;
  return Motion{(last.p.x - h[first].p.x) / span, (last.p.y - h[first].p.y) / span};
}

double settled_duration(std::span<const PasserbyFrame> h, const EstimatorConfig& cfg) {
  const double t_now = h.back().t;
  double since = t_now;
  bool any = false;
  for (std::size_t k = h.size(); k-- > 0;) {
    const PasserbyFrame& f = h[k];
    if (!f.detected) break;
    if (distance_to(f, cfg.exhibit_pos) > cfg.engage_radius || !facing(f, cfg)) break;
    const auto m = motion_at(h, k, cfg);
    if (!m || m->speed() >= cfg.walk_speed_min) break;
    since = f.t;
    any = true;
  }
  return any ? t_now - since : 0.0;
}

bool gaze_alternates(std::span<const PasserbyFrame> h, const EstimatorConfig& cfg) {
  const double t_now = h.back().t;
  bool in = false;
  bool out = false;
  for (std::size_t k = h.size(); k-- > 0;) {
    const PasserbyFrame& f = h[k];
    if (!f.detected || t_now - f.t > cfg.gaze_window_s + kEps) break;
    (facing(f, cfg) ? in : out) = true;
    if (in && out) return true;
  }
  return false;
}

}  // namespace

double EstimatorConfig::history_span_s() const {
  return std::max(dwell_established_s + velocity_window_s, gaze_window_s) + 0.5;
}

std::optional<std::string> validate(const EstimatorConfig& cfg) {
  if (!(cfg.engage_radius > 0.0)) return "engage_radius must be > 0";
  if (!(cfg.look_cone_rad > 0.0)) return "look_cone_rad must be > 0";
  if (!(cfg.walk_speed_min > 0.0)) return "walk_speed_min must be > 0";
  if (!(cfg.dwell_established_s > 0.0)) return "dwell_established_s must be > 0";
  if (!(cfg.approach_dot_min > 0.0)) return "approach_dot_min must be > 0";
  if (!(cfg.velocity_window_s > 0.0)) return "velocity_window_s must be > 0";
  if (!(cfg.gaze_window_s > 0.0)) return "gaze_window_s must be > 0";
  return std::nullopt;
}

BaseState classify_base(std::span<const PasserbyFrame> history, const EstimatorConfig& cfg,
                        BaseState prev) {
  if (history.empty() || !history.back().detected) return BaseState::NotFound;
  const PasserbyFrame& now = history.back();
  const bool looking = facing(now, cfg);

  const auto m = motion_at(history, history.size() - 1, cfg);
  if (!m) return looking ? BaseState::LookAt : BaseState::PassingBy;

  const double dx = now.p.x - cfg.exhibit_pos.x;
  const double dy = now.p.y - cfg.exhibit_pos.y;
  const double dist = std::hypot(dx, dy);
  const double speed = m->speed();
  // Positive when moving away from the exhibit.
  const double v_radial = dist > kEps ? (m->vx * dx + m->vy * dy) / dist : 0.0;
  const bool moving = speed >= cfg.walk_speed_min;

  if (dist <= cfg.engage_radius && settled_duration(history, cfg) >= cfg.dwell_established_s - kEps) {
    return BaseState::Established;
  }

  const bool was_engaging = prev == BaseState::Established || prev == BaseState::Approaching ||
                            prev == BaseState::Hesitating;
  if ((was_engaging && v_radial > cfg.walk_speed_min) ||
      (prev == BaseState::Leaving && v_radial > 0.0 && moving)) {
    return BaseState::Leaving;
  }

  if (moving && dist > kEps && -v_radial / speed >= cfg.approach_dot_min) {
    return BaseState::Approaching;
  }

  if (!moving && gaze_alternates(history, cfg)) return BaseState::Hesitating;
  if (moving && looking) return BaseState::LookAt;
  if (!moving && prev != BaseState::NotFound) return prev;
  return BaseState::PassingBy;
}

TransitionState step_transition(BaseState prev, BaseState curr) { return {prev, curr}; }

Estimator::Estimator(EstimatorConfig cfg) : cfg_(cfg) {}

EstimatedState Estimator::push(const PasserbyFrame& frame) {
  window_.push_back(frame);
  const double keep = cfg_.history_span_s();
  while (!window_.empty() && frame.t - window_.front().t > keep) window_.pop_front();
  scratch_.assign(window_.begin(), window_.end());
  const BaseState base = classify_base(scratch_, cfg_, prev_);
  EstimatedState out{base, step_transition(prev_, base), frame.t};
  prev_ = base;
  return out;
}

void Estimator::reset() {
  window_.clear();
  prev_ = BaseState::NotFound;
}

bool TransitionTracker::observe(BaseState base, double t) {
  if (base != state_.to) {
    state_ = step_transition(state_.to, base);
    changed_at_ = t;
    return true;
  }
  if (state_.from != state_.to && t - changed_at_ >= tick_s_ - 1e-9) {
    state_ = step_transition(base, base);
  }
  return false;
}

}  // namespace ucql
