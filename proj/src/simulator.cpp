#include "ucql/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace ucql {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr double kArrive = 1e-6;

enum class Stream : std::uint64_t { Plan = 1, Behavior = 2, Sensor = 3, Policy = 4, Scenario = 5 };

std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s)));
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bernoulli(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

Point2 uniform_in(Rng& rng, const Rect& r) {
  const double x = uniform(rng, r.x0, r.x1);
  const double y = uniform(rng, r.y0, r.y1);
  return {x, y};
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

// Ground-truth kinematics and gaze of one simulated passerby.
class Passerby {
 public:
  Passerby(const ScenarioPlan& plan, const WorldConfig& world)
      : world_(world), disposition_(plan.disposition), pos_(plan.start),
        path_(plan.waypoints), glance_at_x_(plan.glance_at_x) {
    heading_ = path_.empty() ? 0.0 : bearing(pos_, path_.front().pos);
  }

  Point2 position() const { return pos_; }
  bool gone() const { return phase_ == Phase::Gone; }
  bool used_service() const { return used_service_; }
  const Disposition& disposition() const { return disposition_; }

  double yaw() const {
    const double to_exhibit = bearing(pos_, world_.exhibit);
    switch (phase_) {
      case Phase::Walk:
        if (disposition_.kind == ScenarioKind::Curious) return to_exhibit;
        return glance_left_ > 0.0 ? to_exhibit : heading_;
      case Phase::Dwell:
      case Phase::Unsure:
        return alternating_gaze(to_exhibit);
      case Phase::Approach:
      case Phase::AtExhibit:
      case Phase::Service:
        return to_exhibit;
      case Phase::Leave:
      case Phase::Gone:
        return heading_;
    }
    return heading_;
  }

  void step(double dt) {
    timer_ += dt;
    glance_left_ = std::max(0.0, glance_left_ - dt);
    switch (phase_) {
      case Phase::Walk:
        if (follow_path(dt)) {
          const double dwell = path_.empty() ? 0.0 : path_.back().dwell_s;
          path_.clear();
          if (dwell > 0.0) {
            enter(Phase::Dwell);
            dwell_s_ = dwell;
          } else {
            enter(Phase::Gone);
          }
        }
        maybe_glance();
        break;
      case Phase::Dwell:
        if (timer_ >= dwell_s_) {
          if (disposition_.engage_draw < world_.base_engage) {
            disposition_.committed = true;
            start_approach();
          } else {
            leave_along_aisle();
          }
        }
        break;
      case Phase::Approach:
        if (follow_path(dt)) {
          path_.clear();
          if (service_pending_) {
            start_service();
          } else {
            enter(Phase::AtExhibit);
          }
        }
        break;
      case Phase::AtExhibit:
        if (timer_ >= world_.patience_s) enter(Phase::Unsure);
        break;
      case Phase::Unsure:
        if (timer_ >= world_.unsure_s) leave_to_seat();
        break;
      case Phase::Service:
        if (timer_ >= world_.service_s) leave_to_seat();
        break;
      case Phase::Leave:
        if (follow_path(dt)) enter(Phase::Gone);
        break;
      case Phase::Gone:
        break;
    }
  }

  void apply(BehaviorModifier m) {
    switch (m) {
      case BehaviorModifier::None:
        break;
      case BehaviorModifier::DivertToExhibit:
        if (phase_ == Phase::Walk || phase_ == Phase::Dwell) {
          disposition_.committed = true;
          start_approach();
        }
        break;
      case BehaviorModifier::Annoyed:
        disposition_.annoyed = true;
        glance_left_ = 0.0;
        glance_at_x_.reset();
        for (auto& w : path_) w.speed = world_.hurried_speed;
        break;
      case BehaviorModifier::GazeAttracted:
        if (!disposition_.annoyed && phase_ == Phase::Walk) glance_left_ = world_.glance_s;
        break;
      case BehaviorModifier::StartService:
        if (phase_ == Phase::Approach) {
          service_pending_ = true;
        } else if (phase_ == Phase::AtExhibit || phase_ == Phase::Unsure) {
          start_service();
        }
        break;
      case BehaviorModifier::Dismissed:
        if (phase_ == Phase::Approach || phase_ == Phase::AtExhibit || phase_ == Phase::Unsure) {
          leave_to_seat();
        }
        break;
    }
  }

 private:
  enum class Phase { Walk, Dwell, Approach, AtExhibit, Unsure, Service, Leave, Gone };

  static double bearing(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

  double alternating_gaze(double to_exhibit) const {
    const double phase = std::fmod(timer_, world_.gaze_period_s) / world_.gaze_period_s;
    return phase < 0.6 ? to_exhibit : to_exhibit + 1.2;
  }

  void enter(Phase p) {
    phase_ = p;
    timer_ = 0.0;
  }

  // Moves along the remaining path; true once the last waypoint is reached.
  bool follow_path(double dt) {
    double budget = dt;
    while (waypoint_ < path_.size() && budget > 0.0) {
      const Waypoint& w = path_[waypoint_];
      const double dx = w.pos.x - pos_.x;
      const double dy = w.pos.y - pos_.y;
      const double dist = std::hypot(dx, dy);
      const double reach = w.speed * budget;
      if (dist > kArrive) heading_ = std::atan2(dy, dx);
      if (reach >= dist) {
        pos_ = w.pos;
        budget -= w.speed > 0.0 ? dist / w.speed : budget;
        ++waypoint_;
      } else {
        pos_.x += dx / dist * reach;
        pos_.y += dy / dist * reach;
        budget = 0.0;
      }
    }
    return waypoint_ >= path_.size();
  }

  void set_path(std::vector<Waypoint> path) {
    path_ = std::move(path);
    waypoint_ = 0;
  }

  void maybe_glance() {
    if (glance_at_x_ && !disposition_.annoyed && pos_.x >= *glance_at_x_) {
      glance_left_ = world_.glance_s;
      glance_at_x_.reset();
    }
  }

  void start_approach() {
    set_path({{world_.engage_point, world_.approach_speed, 0.0}});
    enter(Phase::Approach);
  }

  void start_service() {
    used_service_ = true;
    service_pending_ = false;
    enter(Phase::Service);
  }

  double exit_speed() const {
    return disposition_.annoyed ? world_.hurried_speed : world_.curious_speed;
  }

  void leave_along_aisle() {
    const Point2 wc{0.5 * (world_.wc_path.x0 + world_.wc_path.x1), pos_.y};
    set_path({{wc, exit_speed(), 0.0}});
    enter(Phase::Leave);
  }

  void leave_to_seat() {
    const Point2 aisle_entry{world_.seat_space.x1 + 1.0, world_.aisle_y};
    const Point2 seat{0.5 * (world_.seat_space.x0 + world_.seat_space.x1),
                      0.5 * (world_.seat_space.y0 + world_.seat_space.y1)};
    set_path({{aisle_entry, exit_speed(), 0.0}, {seat, exit_speed(), 0.0}});
    enter(Phase::Leave);
  }

  const WorldConfig& world_;
  Disposition disposition_;
  Point2 pos_;
  std::vector<Waypoint> path_;
  std::size_t waypoint_ = 0;
  std::optional<double> glance_at_x_;
  Phase phase_ = Phase::Walk;
  double heading_ = 0.0;
  double timer_ = 0.0;
  double dwell_s_ = 0.0;
  double glance_left_ = 0.0;
  bool service_pending_ = false;
  bool used_service_ = false;
};

struct RunningAction {
  std::size_t event;
  ActionId action;
  TransitionState s_ta;
  double ends_at;
};

}  // namespace

std::optional<std::string> validate(const WorldConfig& w) {
  if (!(w.dt > 0.0)) return "dt must be > 0";
  if (!(w.max_episode_s > w.dt)) return "max_episode_s must exceed dt";
  for (const auto* r : {&w.exhibition_space, &w.aisle, &w.seat_space, &w.wc_path, &w.sensing_region}) {
    if (r->degenerate()) return "layout rectangles must have positive extent";
  }
  if (w.sensing_region.contains({0.5 * (w.seat_space.x0 + w.seat_space.x1),
                                 0.5 * (w.seat_space.y0 + w.seat_space.y1)})) {
    return "seat space must lie outside the sensing region";
  }
  if (!w.exhibition_space.contains(w.viewing_point)) return "viewing_point must be inside the exhibition space";
  if (!(w.position_noise_sd >= 0.0) || !(w.yaw_noise_sd >= 0.0)) return "noise must be >= 0";
  for (double p : {w.curious_weight, w.base_engage, w.greeting_boost, w.annoy_probability,
                   w.gaze_attract_probability, w.glance_probability}) {
    if (!probability(p)) return "behavior probabilities must be in [0,1]";
  }
  for (double v : {w.walk_speed, w.hurried_speed, w.curious_speed, w.approach_speed, w.gaze_period_s,
                   w.glance_s, w.service_s, w.patience_s, w.unsure_s}) {
    if (!(v > 0.0)) return "speeds and behavior durations must be > 0";
  }
  if (!(w.walk_speed_jitter >= 0.0 && w.walk_speed_jitter < w.walk_speed)) {
    return "walk_speed_jitter must be in [0, walk_speed)";
  }
  if (!(w.dwell_min_s > 0.0 && w.dwell_max_s >= w.dwell_min_s)) return "dwell range must be positive";
  return std::nullopt;
}

ScenarioPlan generate_scenario(ScenarioKind kind, const WorldConfig& world, std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::Plan));
  ScenarioPlan plan;
  plan.start = uniform_in(rng, world.seat_space);
  plan.disposition.kind = kind;
  plan.disposition.engage_draw = uniform(rng, 0.0, 1.0);
  const double aisle_entry_x = world.seat_space.x1 + 1.0;

  if (kind == ScenarioKind::PassThrough) {
    const double speed =
        world.walk_speed + uniform(rng, -world.walk_speed_jitter, world.walk_speed_jitter);
    const double lane = world.aisle_y + uniform(rng, -0.3, 0.3);
    const double wc_x = 0.5 * (world.wc_path.x0 + world.wc_path.x1);
    plan.waypoints = {{{aisle_entry_x, lane}, speed, 0.0}, {{wc_x, lane}, speed, 0.0}};
    if (bernoulli(rng, world.glance_probability)) {
      plan.glance_at_x = uniform(rng, world.sensing_region.x0 + 0.5, world.sensing_region.x1 - 0.5);
    }
  } else {
    const double lane = world.aisle_y + uniform(rng, -0.2, 0.2);
    const Point2 view{world.viewing_point.x + uniform(rng, -0.3, 0.3),
                      world.viewing_point.y + uniform(rng, -0.2, 0.2)};
    const double dwell = uniform(rng, world.dwell_min_s, world.dwell_max_s);
    plan.waypoints = {{{aisle_entry_x, lane}, world.curious_speed, 0.0},
                      {view, world.curious_speed, dwell}};
  }
  return plan;
}

std::string_view to_string(BehaviorModifier m) {
  switch (m) {
    case BehaviorModifier::None:
      return "none";
    case BehaviorModifier::DivertToExhibit:
      return "divert";
    case BehaviorModifier::Annoyed:
      return "annoyed";
    case BehaviorModifier::GazeAttracted:
      return "gaze";
    case BehaviorModifier::StartService:
      return "service";
    case BehaviorModifier::Dismissed:
      return "dismissed";
  }
  return "none";
}

BehaviorModifier passerby_response(const Disposition& d, BaseState current, ActionId robot_action,
                                   const WorldConfig& world, Rng& rng) {
  const Action& a = action(robot_action);
  if (a.is_wait()) return BehaviorModifier::None;

  if (d.kind == ScenarioKind::Curious) {
    if (a.is_attract() && !d.committed &&
        (current == BaseState::LookAt || current == BaseState::Hesitating) &&
        d.engage_draw < world.base_engage + world.greeting_boost) {
      return BehaviorModifier::DivertToExhibit;
    }
    if (robot_action == ActionId::A8 && d.committed) return BehaviorModifier::StartService;
    if (robot_action == ActionId::A9 && d.committed) return BehaviorModifier::Dismissed;
    return BehaviorModifier::None;
  }

  if (a.kind == ActionKind::Verbal && current == BaseState::PassingBy && !d.annoyed) {
    return bernoulli(rng, world.annoy_probability) ? BehaviorModifier::Annoyed
                                                   : BehaviorModifier::None;
  }
  if (robot_action == ActionId::A2 || robot_action == ActionId::A3) {
    return bernoulli(rng, world.gaze_attract_probability) ? BehaviorModifier::GazeAttracted
                                                          : BehaviorModifier::None;
  }
  return BehaviorModifier::None;
}

EpisodeResult run_episode(Agent& agent, const WorldConfig& world, ScenarioKind kind,
                          std::uint64_t seed, bool learning, std::uint64_t id) {
  const ScenarioPlan plan = generate_scenario(kind, world, seed);
  Passerby person(plan, world);
  Rng behavior_rng(stream_seed(seed, Stream::Behavior));
  Rng sensor_rng(stream_seed(seed, Stream::Sensor));
  Rng policy_rng(stream_seed(seed, Stream::Policy));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  Estimator estimator(agent.estimator);
  TransitionTracker tracker;
  std::optional<RunningAction> running;
  bool seen = false;

  EpisodeResult result;
  Episode& ep = result.episode;
  ep.id = id;
  ep.scenario = kind;

  // The walk from the seat happens off-sensor; the episode clock starts at
  // the first sample inside the sensing region.
  const auto last_step = static_cast<std::uint64_t>(std::llround(world.max_episode_s / world.dt));
  for (std::uint64_t k = 0; k < last_step && !world.sensing_region.contains(person.position()); ++k) {
    person.step(world.dt);
  }

  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * world.dt;
    if (k > 0) person.step(world.dt);

    const Point2 truth = person.position();
    const double nx = unit_normal(sensor_rng) * world.position_noise_sd;
    const double ny = unit_normal(sensor_rng) * world.position_noise_sd;
    const double nz = unit_normal(sensor_rng) * world.position_noise_sd;
    const double nyaw = unit_normal(sensor_rng) * world.yaw_noise_sd;
    PasserbyFrame frame = PasserbyFrame::missing(t);
    if (!person.gone() && world.sensing_region.contains(truth)) {
      frame.detected = true;
      frame.p = {truth.x + nx, truth.y + ny, world.head_height + nz};
      frame.theta = {std::remainder(person.yaw() + nyaw, 2.0 * std::numbers::pi), 0.0, 0.0};
      seen = true;
    }
    ep.trajectory.push_back(frame);

    const EstimatedState est = estimator.push(frame);
    ep.states.push_back(est.base);
    const bool changed = tracker.observe(est.base, t);
    const TransitionState s_now = tracker.state();

    const bool left = (seen && !frame.detected) || person.gone();
    const bool capped = k >= last_step;
    if (running) {
      const bool done = t >= running->ends_at - 1e-9 ||
                        (action(running->action).is_wait() && changed) || left || capped;
      if (done) {
        if (learning) {
          update_policy(running->s_ta, running->action, s_now, true, agent.table, agent.params,
                        left || capped);
        }
        ep.events[running->event].finished = true;
        running.reset();
      }
    }
    if (left || capped) {
      result.truncated = capped && !left;
      break;
    }

    if (!running) {
      const Selection sel = select_action(t, s_now, agent.table, agent.policy, policy_rng);
      ep.events.push_back({sel.t_a, sel.action, s_now, false});
      running = RunningAction{ep.events.size() - 1, sel.action, s_now,
                              sel.t_a + action(sel.action).duration_s};
      person.apply(passerby_response(person.disposition(), est.base, sel.action, world, behavior_rng));
    }
  }

  ep.labels = EpisodeLabels{person.used_service(), person.disposition().annoyed};
  return result;
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

ScenarioKind episode_scenario(std::uint64_t master_seed, std::uint64_t index, double curious_weight) {
  Rng rng(stream_seed(episode_seed(master_seed, index), Stream::Scenario));
  return bernoulli(rng, curious_weight) ? ScenarioKind::Curious : ScenarioKind::PassThrough;
}

std::vector<Episode> run_batch(Agent& agent, const WorldConfig& world, std::uint64_t n_episodes,
                               double curious_weight, bool learning, std::uint64_t master_seed,
                               const BatchOptions& options) {
  if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
  if (!probability(curious_weight)) throw std::invalid_argument("curious_weight must be in [0,1]");

  std::vector<Episode> out(n_episodes);
  auto one = [&](Agent& a, std::uint64_t i) {
    const std::uint64_t index = options.first_index + i;
    const ScenarioKind kind = episode_scenario(master_seed, index, curious_weight);
    EpisodeResult r = run_episode(a, world, kind, episode_seed(master_seed, index), learning, index);
    r.episode.condition = options.condition;
    out[i] = std::move(r.episode);
  };

  if (learning || options.workers <= 1) {
    for (std::uint64_t i = 0; i < n_episodes; ++i) {
      one(agent, i);
      if (options.on_episode && !options.on_episode(out[i], agent.table)) {
        out.resize(i + 1);
        break;
      }
    }
    return out;
  }

  // Frozen evaluation: each worker reads its own copy of the table and
  // writes only its own slots, so results do not depend on scheduling.
  const unsigned workers = std::min<std::uint64_t>(options.workers, n_episodes);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      Agent local = agent;
      for (std::uint64_t i = w; i < n_episodes; i += workers) one(local, i);
    });
  }
  for (auto& th : pool) th.join();
  if (options.on_episode) {
    for (const auto& e : out) options.on_episode(e, agent.table);
  }
  return out;
}

}  // namespace ucql
