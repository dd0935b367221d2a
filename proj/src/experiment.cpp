#include "ucql/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ucql/episode_log.hpp"
#include "ucql/qtable_io.hpp"

namespace ucql {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Keeps the first `n` lines of a text file, dropping anything after them.
std::string head_lines(const fs::path& path, std::uint64_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string out;
  std::string line;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is shorter than the checkpoint");
    out += line;
    out += '\n';
  }
  return out;
}

std::string trace_header() {
  std::string h = "episode,updates";
  for (const TransitionState s : all_transition_states()) h += "," + s.symbol();
  return h + "\n";
}

std::string trace_row(std::uint64_t episode, const QTable& table) {
  std::uint64_t updates = 0;
  std::string row;
  for (const TransitionState s : all_transition_states()) {
    updates += table.count(s);
    row += "," + format_double(table.temperature(s));
  }
  return std::to_string(episode) + "," + std::to_string(updates) + row + "\n";
}

Agent make_agent(const RunConfig& cfg, QTable table, const PolicyKind& policy) {
  return Agent{std::move(table), cfg.learner, policy, cfg.estimator};
}

ConfusionMatrix score(std::span<const Episode> episodes, const CleanseRules& rules) {
  const std::vector<Episode> kept = cleanse(episodes, rules);
  std::vector<Outcome> outcomes;
  outcomes.reserve(kept.size());
  for (const Episode& e : kept) outcomes.push_back(classify_episode(e));
  return confusion_matrix(outcomes);
}

}  // namespace

std::uint64_t phase_seed(std::uint64_t master_seed, Phase phase) {
  return splitmix64(master_seed ^ splitmix64(0x5eed0000ULL + static_cast<std::uint64_t>(phase)));
}

QTable train_table(const RunConfig& cfg) {
  Agent agent = make_agent(cfg, make_initial_q(cfg.learner), cfg.train_policy);
  run_batch(agent, cfg.world, cfg.episodes.train, cfg.world.curious_weight, true,
            phase_seed(cfg.seed, Phase::Train));
  return agent.table;
}

TrainOutcome run_training(const RunConfig& cfg, const TrainOptions& options) {
  if (auto err = validate(cfg)) throw ConfigError(*err);
  const fs::path out = cfg.out_dir;
  const fs::path ckpt = out / artifact::kCheckpointDir;
  const fs::path log_path = out / artifact::kTrainLog;
  const fs::path trace_path = out / artifact::kTemperatureTrace;
  const std::string cfg_text = to_json_text(cfg);
  fs::create_directories(out);

  TrainOutcome result;
  result.q_before = make_initial_q(cfg.learner);
  QTable table = result.q_before;
  std::uint64_t done = 0;
  std::string log_prefix;
  std::string trace_prefix = trace_header();

  if (options.resume) {
    if (!fs::exists(ckpt / "progress.json")) throw std::runtime_error("no checkpoint in " + ckpt.string());
    if (read_file(ckpt / artifact::kConfig) != cfg_text) {
      throw ConfigError("configuration differs from the checkpointed run");
    }
    const auto progress = nlohmann::json::parse(read_file(ckpt / "progress.json"));
    done = progress.at("episodes_done").get<std::uint64_t>();
    table = load_qtable(ckpt / "q.csv");
    log_prefix = head_lines(log_path, done);
    trace_prefix = head_lines(trace_path, done + 1);
  }

  save_qtable(result.q_before, out / artifact::kQBefore);
  write_file(out / artifact::kConfig, cfg_text);

  std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
  std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
  if (!log || !trace) throw std::runtime_error("cannot write logs under " + out.string());
  log << log_prefix;
  trace << trace_prefix;

  bool stopped = false;
  if (done < cfg.episodes.train) {
    Agent agent = make_agent(cfg, table, cfg.train_policy);
    BatchOptions batch;
    batch.first_index = done;
    batch.on_episode = [&](const Episode& e, const QTable& q) {
      ++done;
      log << episode_to_json_line(e) << '\n';
      trace << trace_row(done, q);
      if (options.stop && options.stop->load()) {
        stopped = done < cfg.episodes.train;
        return false;
      }
      return true;
    };
    run_batch(agent, cfg.world, cfg.episodes.train - batch.first_index, cfg.world.curious_weight,
              true, phase_seed(cfg.seed, Phase::Train), batch);
    table = agent.table;
  }
  log.close();
  trace.close();
  if (!log || !trace) throw std::runtime_error("write failed under " + out.string());

  result.episodes_done = done;
  result.q_after = table;
  if (stopped) {
    fs::create_directories(ckpt);
    save_qtable(table, ckpt / "q.csv");
    write_file(ckpt / artifact::kConfig, cfg_text);
    write_file(ckpt / "progress.json", nlohmann::json{{"episodes_done", done}}.dump() + "\n");
    result.status = TrainStatus::Interrupted;
    return result;
  }
  save_qtable(table, out / artifact::kQAfter);
  fs::remove_all(ckpt);
  return result;
}

EvaluationReport evaluate_tables(const RunConfig& cfg, const QTable& q_before, const QTable& q_after,
                                 std::vector<Episode>* episodes) {
  if (auto err = validate(cfg)) throw ConfigError(*err);
  auto batch = [&](const QTable& q, Phase phase, Condition condition) {
    Agent agent = make_agent(cfg, q, cfg.eval_policy);
    BatchOptions options;
    options.condition = condition;
    options.workers = cfg.workers;
    return run_batch(agent, cfg.world, cfg.episodes.evaluate, cfg.world.curious_weight, false,
                     phase_seed(cfg.seed, phase), options);
  };
  const std::vector<Episode> before = batch(q_before, Phase::EvalBefore, Condition::Before);
  const std::vector<Episode> after = batch(q_after, Phase::EvalAfter, Condition::After);

  EvaluationReport report = evaluate_matrices(score(before, cfg.cleanse), score(after, cfg.cleanse),
                                              cfg.significance);
  report.simulated = true;
  report.raw_before = before.size();
  report.raw_after = after.size();
  if (episodes) {
    episodes->clear();
    episodes->insert(episodes->end(), before.begin(), before.end());
    episodes->insert(episodes->end(), after.begin(), after.end());
  }
  return report;
}

EvaluationReport evaluate_matrices(const ConfusionMatrix& before, const ConfusionMatrix& after,
                                   double significance) {
  EvaluationReport report;
  report.simulated = false;
  report.before = before;
  report.after = after;
  report.raw_before = before.total();
  report.raw_after = after.total();
  report.significance = significance;
  report.test = proportion_test(before, after);
  return report;
}

std::string format_report(const EvaluationReport& r) {
  std::string out;
  char buf[256];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  out += r.simulated ? "source: simulated frozen evaluation\n" : "source: published confusion matrices\n";
  line("%-9s %6s %6s %6s %6s %6s %9s\n", "condition", "TP", "FP", "FN", "TN", "total", "accuracy");
  auto row = [&](const char* name, const ConfusionMatrix& m, double acc) {
    line("%-9s %6llu %6llu %6llu %6llu %6llu %9.4f\n", name, static_cast<unsigned long long>(m.tp),
         static_cast<unsigned long long>(m.fp), static_cast<unsigned long long>(m.fn),
         static_cast<unsigned long long>(m.tn), static_cast<unsigned long long>(m.total()), acc);
  };
  row("before", r.before, r.test.accuracy_before);
  row("after", r.after, r.test.accuracy_after);
  if (r.simulated) {
    line("episodes kept after cleansing: before %llu of %llu, after %llu of %llu\n",
         static_cast<unsigned long long>(r.before.total()), static_cast<unsigned long long>(r.raw_before),
         static_cast<unsigned long long>(r.after.total()), static_cast<unsigned long long>(r.raw_after));
  }
  out += "one-sided pooled two-proportion test (after > before)\n";
  line("z = %.4f\n", r.test.z);
  line("p = %.4e\n", r.test.p);
  for (double level : kSignificanceLevels) {
    line("  p < %-5g : %s\n", level, r.test.p < level ? "yes" : "no");
  }
  line("result at significance %g: %s\n", r.significance, r.pass() ? "PASS" : "FAIL");
  return out;
}

EvaluationReport run_evaluation(const RunConfig& cfg, const fs::path& q_before_path,
                                const fs::path& q_after_path) {
  const QTable q_before = load_qtable(q_before_path);
  const QTable q_after = load_qtable(q_after_path);
  std::vector<Episode> episodes;
  EvaluationReport report = evaluate_tables(cfg, q_before, q_after, &episodes);

  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  std::ostringstream log;
  write_episode_log(log, episodes);
  write_file(out / artifact::kEvalLog, log.str());
  write_file(out / artifact::kReport, format_report(report));
  return report;
}

}  // namespace ucql
