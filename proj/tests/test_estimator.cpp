#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "ucql/estimator.hpp"

using namespace ucql;

namespace {

constexpr double kPi = std::numbers::pi;

PasserbyFrame at(double t, double x, double y, double yaw) {
  return PasserbyFrame{t, true, {x, y, 1.6}, {yaw, 0.0, 0.0}};
}

double toward_exhibit(double x, double y) { return std::atan2(-y, -x); }

std::vector<BaseState> run(const std::vector<PasserbyFrame>& frames, EstimatorConfig cfg = {}) {
  Estimator est(cfg);
  std::vector<BaseState> out;
  for (const auto& f : frames) out.push_back(est.push(f).base);
  return out;
}

}  // namespace

TEST_CASE("undetected frame is NotFound whatever came before") {
  const EstimatorConfig cfg;
  const PasserbyFrame gone = PasserbyFrame::missing(3.0);
  for (int prev = 0; prev < 7; ++prev) {
    CHECK(classify_base(std::span(&gone, 1), cfg, base_state_from_code(prev)) == BaseState::NotFound);
  }
  CHECK(classify_base({}, cfg, BaseState::Established) == BaseState::NotFound);
}

TEST_CASE("straight walk along the aisle with gaze ahead is PassingBy") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 30; ++k) frames.push_back(at(0.1 * k, -2.0 + 0.12 * k, 6.0, 0.0));
  for (BaseState s : run(frames)) CHECK(s == BaseState::PassingBy);
}

TEST_CASE("standing close and facing the exhibit for 4 s becomes Established") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 40; ++k) frames.push_back(at(0.1 * k, 0.0, 0.6, toward_exhibit(0.0, 0.6)));
  const auto states = run(frames);
  CHECK(states.back() == BaseState::Established);
  // Not before the dwell has accumulated.
  CHECK(states[20] != BaseState::Established);
}

TEST_CASE("walking toward the exhibit is Approaching") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 30; ++k) frames.push_back(at(0.1 * k, 0.0, 5.0 - 0.1 * k, -kPi / 2));
  const auto states = run(frames);
  CHECK(states.back() == BaseState::Approaching);
}

TEST_CASE("walking past while looking at the exhibit is LookAt") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 20; ++k) {
    const double x = -1.0 + 0.1 * k;
    frames.push_back(at(0.1 * k, x, 6.0, toward_exhibit(x, 6.0)));
  }
  CHECK(run(frames).back() == BaseState::LookAt);
}

TEST_CASE("standing with gaze switching on and off the exhibit is Hesitating") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 30; ++k) {
    const double yaw = (k / 6) % 2 == 0 ? toward_exhibit(1.5, 3.0) : toward_exhibit(1.5, 3.0) + 1.2;
    frames.push_back(at(0.1 * k, 1.5, 3.0, yaw));
  }
  CHECK(run(frames).back() == BaseState::Hesitating);
}

TEST_CASE("moving away after engagement is Leaving") {
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k <= 40; ++k) frames.push_back(at(0.1 * k, 0.0, 0.6, -kPi / 2));
  for (int k = 1; k <= 20; ++k) frames.push_back(at(4.0 + 0.1 * k, 0.0, 0.6 + 0.1 * k, kPi / 2));
  const auto states = run(frames);
  CHECK(states[40] == BaseState::Established);
  CHECK(states.back() == BaseState::Leaving);
}

TEST_CASE("transition symbols") {
  CHECK(step_transition(BaseState::NotFound, BaseState::NotFound).symbol() == "s00");
  CHECK(step_transition(BaseState::NotFound, BaseState::PassingBy).symbol() == "s01");
  CHECK(step_transition(BaseState::Leaving, BaseState::Leaving).symbol() == "s66");
}

TEST_CASE("estimated stream is chained and NotFound appears exactly when undetected") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-2.5, 6.0);
  std::uniform_real_distribution<double> step(-0.15, 0.15);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  std::bernoulli_distribution drop(0.1);
  for (int episode = 0; episode < 50; ++episode) {
    Estimator est(EstimatorConfig{});
    double x = pos(rng);
    double y = pos(rng);
    TransitionState last{};
    for (int k = 0; k < 300; ++k) {
      x += step(rng);
      y += step(rng);
      PasserbyFrame f = drop(rng) ? PasserbyFrame::missing(0.1 * k) : at(0.1 * k, x, y, yaw(rng));
      const EstimatedState s = est.push(f);
      CHECK((s.base == BaseState::NotFound) == !f.detected);
      CHECK(s.transition.to == s.base);
      CHECK(s.transition.from == last.to);
      last = s.transition;
    }
  }
}

TEST_CASE("classification depends only on the bounded window and the previous state") {
  const EstimatorConfig cfg;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<PasserbyFrame> frames;
  for (int k = 0; k < 200; ++k) {
    const double x = 2.0 * std::sin(0.03 * k) + jitter(rng);
    const double y = 3.0 + 2.0 * std::cos(0.02 * k) + jitter(rng);
    frames.push_back(at(0.1 * k, x, y, toward_exhibit(x, y) + 0.6 * std::sin(0.5 * k)));
  }
  Estimator est(cfg);
  BaseState prev = BaseState::NotFound;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const BaseState streamed = est.push(frames[k]).base;
    std::size_t first = k;
    while (first > 0 && frames[k].t - frames[first - 1].t <= cfg.history_span_s()) --first;
    const std::span<const PasserbyFrame> window(frames.data() + first, k - first + 1);
    CHECK(classify_base(window, cfg, prev) == streamed);
    CHECK(classify_base(window, cfg, prev) == classify_base(window, cfg, prev));
    prev = streamed;
  }
}

TEST_CASE("tracker reports s_ij on a change and collapses to s_jj after a tick") {
  TransitionTracker tr;
  CHECK_FALSE(tr.observe(BaseState::NotFound, 0.0));
  CHECK(tr.state() == transition(0, 0));
  CHECK(tr.observe(BaseState::PassingBy, 0.1));
  CHECK(tr.state() == transition(0, 1));
  CHECK_FALSE(tr.observe(BaseState::PassingBy, 0.6));
  CHECK(tr.state() == transition(0, 1));
  CHECK_FALSE(tr.observe(BaseState::PassingBy, 1.1));
  CHECK(tr.state() == transition(1, 1));
  CHECK(tr.observe(BaseState::LookAt, 1.2));
  CHECK(tr.state() == transition(1, 2));
}

TEST_CASE("estimator config validation") {
  EstimatorConfig cfg;
  CHECK_FALSE(validate(cfg).has_value());
  cfg.engage_radius = 0.0;
  CHECK(validate(cfg).has_value());
  cfg = {};
  cfg.velocity_window_s = -1.0;
  CHECK(validate(cfg).has_value());
}
