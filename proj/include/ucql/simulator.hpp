#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ucql/domain.hpp"
#include "ucql/estimator.hpp"
#include "ucql/learner.hpp"

namespace ucql {

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool degenerate() const { return !(x1 > x0 && y1 > y0); }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Office entrance seen from above. The robot stands at `exhibit` facing +y;
// an aisle runs along y = aisle_y from the seat space (left) to the W.C.
// (right), and the sensor covers the exhibition space plus the near stretch
// of the aisle.
struct WorldConfig {
  Point2 exhibit{0.0, 0.0};
  Rect exhibition_space{-2.5, -0.5, 2.5, 6.3};
  Rect aisle{-8.0, 5.4, 9.0, 6.8};
  Rect seat_space{-6.5, 7.0, -4.5, 9.5};
  Rect wc_path{8.0, 5.4, 9.0, 6.8};
  Rect sensing_region{-2.5, -1.0, 2.5, 7.0};
  double aisle_y = 6.0;
  Point2 viewing_point{0.3, 6.0};
  Point2 engage_point{0.0, 0.7};
  double head_height = 1.6;

  double dt = 0.1;
  double max_episode_s = 120.0;
  double position_noise_sd = 0.03;
  double yaw_noise_sd = 0.05;

  // Passerby behavior.
  double curious_weight = 0.4;
  double base_engage = 0.25;
  double greeting_boost = 0.6;
  double annoy_probability = 0.6;
  double gaze_attract_probability = 0.1;
  double glance_probability = 0.1;
  double glance_s = 1.0;
  double walk_speed = 1.3;
  double walk_speed_jitter = 0.15;
  double hurried_speed = 1.8;
  double curious_speed = 1.0;
  double approach_speed = 0.9;
  double dwell_min_s = 5.0;
  double dwell_max_s = 10.0;
  double gaze_period_s = 1.2;
  double patience_s = 5.0;
  double unsure_s = 5.0;
  double service_s = 12.0;
};

std::optional<std::string> validate(const WorldConfig& w);

struct Waypoint {
  Point2 pos;
  double speed = 1.0;
  double dwell_s = 0.0;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Latent state of the passerby that the robot never observes directly.
struct Disposition {
  ScenarioKind kind = ScenarioKind::PassThrough;
  // Uniform draw fixing whether the passerby engages: on their own when it is
  // below base_engage, after a well-timed call when below base_engage+boost.
  double engage_draw = 1.0;
  bool committed = false;
  bool annoyed = false;
  friend bool operator==(const Disposition&, const Disposition&) = default;
};

struct ScenarioPlan {
  Point2 start;
  std::vector<Waypoint> waypoints;
  Disposition disposition;
  // Pass-through only: x coordinate at which the passerby glances at the robot.
  std::optional<double> glance_at_x;
  friend bool operator==(const ScenarioPlan&, const ScenarioPlan&) = default;
};

ScenarioPlan generate_scenario(ScenarioKind kind, const WorldConfig& world, std::uint64_t seed);

enum class BehaviorModifier : std::uint8_t {
  None,
  DivertToExhibit,
  Annoyed,
  GazeAttracted,
  StartService,
  Dismissed,
};

std::string_view to_string(BehaviorModifier m);

BehaviorModifier passerby_response(const Disposition& disposition, BaseState current,
                                   ActionId robot_action, const WorldConfig& world, Rng& rng);

struct Agent {
  QTable table;
  LearnerParams params;
  PolicyKind policy = PolicyKind::softmax();
  EstimatorConfig estimator;
};

struct EpisodeResult {
  Episode episode;
  bool truncated = false;
};

EpisodeResult run_episode(Agent& agent, const WorldConfig& world, ScenarioKind kind,
                          std::uint64_t seed, bool learning, std::uint64_t id = 0);

std::uint64_t splitmix64(std::uint64_t x);

// Seed of episode `index` in a batch, and the scenario drawn for it.
std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t index);
ScenarioKind episode_scenario(std::uint64_t master_seed, std::uint64_t index, double curious_weight);

struct BatchOptions {
  std::uint64_t first_index = 0;
  std::optional<Condition> condition;
  // Worker threads for evaluation batches; learning batches always run in order.
  unsigned workers = 1;
  // Called after every episode of a learning batch; returning false stops the batch.
  std::function<bool(const Episode&, const QTable&)> on_episode;
};

std::vector<Episode> run_batch(Agent& agent, const WorldConfig& world, std::uint64_t n_episodes,
                               double curious_weight, bool learning, std::uint64_t master_seed,
                               const BatchOptions& options = {});

}  // namespace ucql
