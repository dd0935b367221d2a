// Acceptance suite: one PASS/FAIL line per primary criterion.
// Usage: ucql_acceptance [path-to-ucql-binary]

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ucql/experiment.hpp"
#include "ucql/learner.hpp"
#include "ucql/qtable_io.hpp"

namespace fs = std::filesystem;
using namespace ucql;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = false;
  std::string detail;
};

int g_failures = 0;

void report(int number, const char* name, const Verdict& v) {
  std::printf("[%s] %d %s: %s\n", v.ok ? "PASS" : "FAIL", number, name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.ok) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict arithmetic() {
  const auto t0 = Clock::now();
  const EvaluationReport r = evaluate_matrices(kPaperBefore, kPaperAfter, 0.01);
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(r.test.accuracy_before - 0.322) <= 0.001 &&
                  std::abs(r.test.accuracy_after - 0.811) <= 0.001 &&
                  std::abs(std::log10(r.test.p) - std::log10(4.46e-13)) < 0.05 && elapsed < 1.0;
  return {ok, fmt("accuracy %.4f -> %.4f, z %.4f, p %.4e, %.4f s", r.test.accuracy_before,
                  r.test.accuracy_after, r.test.z, r.test.p, elapsed)};
}

Verdict initial_q() {
  const QTable q = make_initial_q(LearnerParams{});
  std::map<std::pair<std::size_t, std::size_t>, double> expected;
  for (int j = 1; j <= 5; ++j) expected[{transition(0, j).index(), 1}] = 1.0;
  for (int i = 1; i <= 4; ++i) expected[{transition(i, 5).index(), 8}] = 5.0;
  expected[{transition(5, 6).index(), 9}] = 5.0;
  expected[{transition(5, 0).index(), 9}] = 5.0;

  int mismatches = 0;
  int nonzero = 0;
  for (std::size_t s = 0; s < kNumTransitionStates; ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      const auto it = expected.find({s, a});
      const double want = it == expected.end() ? 0.0 : it->second;
      if (q.q(s, a) != want) ++mismatches;
      if (q.q(s, a) != 0.0) ++nonzero;
    }
  }
  return {mismatches == 0 && nonzero == 11,
          fmt("%d nonzero cells, %d mismatches against the expected assignment list", nonzero, mismatches)};
}

// Rank table and update written out independently of the library.
double oracle_reward(TransitionState s_ta, std::size_t a, TransitionState s_tc, const LearnerParams& p) {
  static constexpr int kRank[7] = {0, 1, 2, 3, 4, 5, 0};
  const int before = kRank[code(s_ta.to)];
  const int after = kRank[code(s_tc.to)];
  double r = 0.0;
  if (a != 0) {
    r -= p.c_a;
    if (after < before) r -= p.c_s * (before - after);
  }
  if (after > before) r += p.c_g * (after - before);
  return r;
}

Verdict bellman() {
  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> base(0, 6);
  std::uniform_int_distribution<int> act(0, 9);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    LearnerParams p;
    p.alpha = 1.0 - unit(rng) * 0.999;
    p.gamma = unit(rng) * 0.999;
    p.c_a = unit(rng);
    p.c_s = unit(rng) * 2.0;
    p.c_g = unit(rng) * 2.0;
    QTable q;
    for (std::size_t s = 0; s < kNumTransitionStates; ++s) {
      for (std::size_t a = 0; a < kNumActions; ++a) q.q(s, a) = value(rng);
    }
    const TransitionState s_ta = transition(base(rng), base(rng));
    const TransitionState s_tc = transition(code(s_ta.to), base(rng));
    const auto a = static_cast<std::size_t>(act(rng));

    double next = q.q(s_tc.index(), 0);
    for (std::size_t b = 1; b < kNumActions; ++b) next = std::max(next, q.q(s_tc.index(), b));
    const double old = q.q(s_ta.index(), a);
    const double want = (1.0 - p.alpha) * old + p.alpha * (oracle_reward(s_ta, a, s_tc, p) + p.gamma * next);

    update_policy(s_ta, static_cast<ActionId>(a), s_tc, true, q, p);
    const double got = q.q(s_ta.index(), a);
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }

  int degenerate_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    LearnerParams p;
    p.alpha = 1.0;
    p.gamma = 0.0;
    QTable q = make_initial_q(LearnerParams{});
    const TransitionState s_ta = transition(base(rng), base(rng));
    const TransitionState s_tc = transition(code(s_ta.to), base(rng));
    const auto a = static_cast<ActionId>(act(rng));
    update_policy(s_ta, a, s_tc, true, q, p);
    if (q.q(s_ta, a) != reward(s_ta, a, s_tc, p)) ++degenerate_bad;
  }
  return {worst <= 1e-12 && degenerate_bad == 0,
          fmt("1000 updates, worst relative error %.3g; alpha=1 gamma=0 mismatches %d", worst, degenerate_bad)};
}

Verdict policy_math() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_real_distribution<double> temp(0.01, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    std::array<double, kNumActions> row{};
    for (double& v : row) v = value(rng);
    const auto p = softmax_probabilities(row, temp(rng));
    double sum = 0.0;
    for (double x : p) sum += x;
    worst = std::max(worst, std::abs(sum - 1.0));
  }

  LearnerParams params;
  QTable q;
  const TransitionState s = transition(0, 1);
  std::uint64_t first_below = 0;
  std::uint64_t last_change = 0;
  for (std::uint64_t n = 1; n <= 400; ++n) {
    const double before = q.temperature(s);
    update_temperature(q, s, params);
    if (q.temperature(s) != before) last_change = n;
    if (first_below == 0 && q.temperature(s) < params.T_min) first_below = n;
  }
  // The criterion asks for the first sub-0.01 temperature at update 229; the
  // recurrence itself gives 0.98^228 = 0.009990 < 0.01, so this stays red.
  const bool rows_ok = worst <= 1e-9;
  const bool crossing_ok = first_below == 229;
  const bool frozen_ok = last_change == first_below;
  return {rows_ok && crossing_ok && frozen_ok,
          fmt("worst |sum-1| %.3g over 1e5 rows; first T < 0.01 at update %llu (criterion expects 229; "
              "0.98^228 = %.6f), last change at update %llu, frozen at %.6f thereafter",
              worst, static_cast<unsigned long long>(first_below), std::pow(params.k_T, 228),
              static_cast<unsigned long long>(last_change), q.temperature(s))};
}

struct SeedResult {
  std::uint64_t seed;
  EvaluationReport report;
  std::size_t greedy_s01;
};

std::vector<SeedResult> g_seeds;
double g_end_to_end_s = 0.0;

Verdict end_to_end() {
  const auto t0 = Clock::now();
  int passing = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunConfig cfg;
    cfg.seed = seed;
    const QTable q_before = make_initial_q(cfg.learner);
    const QTable q_after = train_table(cfg);
    const EvaluationReport r = evaluate_tables(cfg, q_before, q_after);
    const bool ok = r.pass();
    passing += ok;
    g_seeds.push_back({seed, r, greedy_index(q_after.row(transition(0, 1)))});
    std::printf("    seed %2llu: before acc %.3f (FP %llu), after acc %.3f (FP %llu), p %.3g %s\n",
                static_cast<unsigned long long>(seed), r.test.accuracy_before,
                static_cast<unsigned long long>(r.before.fp), r.test.accuracy_after,
                static_cast<unsigned long long>(r.after.fp), r.test.p, ok ? "ok" : "not significant");
  }
  g_end_to_end_s = seconds_since(t0);
  return {passing >= 9 && g_end_to_end_s < 300.0,
          fmt("%d of 10 master seeds significant at 0.01 with higher accuracy after training, %.1f s", passing,
              g_end_to_end_s)};
}

Verdict fp_reduction() {
  int waits = 0;
  int passing = 0;
  int fp_down = 0;
  for (const SeedResult& r : g_seeds) {
    waits += r.greedy_s01 == 0;
    if (r.report.pass()) {
      ++passing;
      fp_down += r.report.after.fp < r.report.before.fp;
    }
  }
  return {waits >= 8 && fp_down == passing && !g_seeds.empty(),
          fmt("greedy action at s01 is a0 in %d of %zu seeds; FP decreased in %d of %d passing seeds", waits,
              g_seeds.size(), fp_down, passing)};
}

Episode synthetic(std::uint64_t id, double duration, bool anyone) {
  Episode e;
  e.id = id;
  const int frames = static_cast<int>(std::lround(duration / 0.1)) + 1;
  for (int k = 0; k < frames; ++k) {
    const double t = k * 0.1;
    PasserbyFrame f = PasserbyFrame::missing(t);
    BaseState s = BaseState::NotFound;
    if (anyone && k > 0) {
      f.detected = true;
      f.p = {0.0, 6.0, 1.6};
      s = BaseState::PassingBy;
    }
    e.trajectory.push_back(f);
    e.states.push_back(s);
  }
  e.labels = EpisodeLabels{};
  return e;
}

Verdict cleansing() {
  // 13 short, 9 nobody-seen, 4 both, 24 survivors (including boundary cases).
  std::vector<Episode> corpus;
  std::set<std::uint64_t> expected;
  std::uint64_t id = 0;
  for (int i = 0; i < 13; ++i) corpus.push_back(synthetic(id++, 0.1 * (i % 9) + 0.1, true));
  for (int i = 0; i < 9; ++i) corpus.push_back(synthetic(id++, 2.0 + i, false));
  for (int i = 0; i < 4; ++i) corpus.push_back(synthetic(id++, 0.5, false));
  for (int i = 0; i < 24; ++i) {
    const double duration = i == 0 ? 1.0 : 1.0 + 0.5 * i;
    expected.insert(id);
    corpus.push_back(synthetic(id++, duration, true));
  }
  std::mt19937_64 rng(3);
  std::shuffle(corpus.begin(), corpus.end(), rng);

  const std::vector<Episode> kept = cleanse(corpus);
  std::set<std::uint64_t> got;
  for (const Episode& e : kept) got.insert(e.id);
  const bool idempotent = cleanse(kept) == kept;
  return {got == expected && kept.size() == expected.size() && idempotent,
          fmt("%zu of %zu episodes kept, expected %zu; survivor set %s; idempotent %s", kept.size(),
              corpus.size(), expected.size(), got == expected ? "matches" : "differs",
              idempotent ? "yes" : "no")};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return files;
}

Verdict determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / ("ucql_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path out = root / "run";

  std::vector<std::string> commands;
  if (!cli.empty()) {
    const std::string base = "\"" + cli + "\" --seed 5 --out \"" + out.string() + "\"";
    commands = {base + " train", base + " evaluate", base + " evaluate --paper-tables",
                base + " export \"" + (out / "q_after.csv").string() + "\" --format pgm",
                base + " export \"" + (out / "q_after.csv").string() + "\" --format csv"};
  }

  auto run_all = [&]() -> bool {
    if (commands.empty()) {
      RunConfig cfg;
      cfg.seed = 5;
      cfg.out_dir = out.string();
      run_training(cfg);
      run_evaluation(cfg, out / artifact::kQBefore, out / artifact::kQAfter);
      return true;
    }
    for (const std::string& c : commands) {
      if (std::system((c + " > /dev/null").c_str()) != 0) return false;
    }
    return true;
  };

  bool ran = run_all();
  const auto first = snapshot(out);
  ran = ran && run_all();
  const auto second = snapshot(out);
  fs::remove_all(root);

  std::size_t differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) ++differing;
  }
  const bool ok = ran && !first.empty() && first.size() == second.size() && differing == 0;
  return {ok, fmt("%zu artifacts from %s, %zu differ on rerun", first.size(),
                  commands.empty() ? "library calls" : "train/evaluate/export commands", differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  report(1, "arithmetic reproduction of the published matrices", arithmetic());
  report(2, "initial Q table exactness", initial_q());
  report(3, "Bellman update oracle", bellman());
  report(4, "soft-max rows and temperature schedule", policy_math());
  report(5, "end-to-end simulated before/after evaluation", end_to_end());
  report(6, "FP reduction and wait at s01", fp_reduction());
  report(7, "cleansing conformance", cleansing());
  report(8, "determinism of command outputs", determinism(cli));
  std::printf("%d of 8 criteria passed\n", 8 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
