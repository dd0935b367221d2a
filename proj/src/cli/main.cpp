#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ucql/experiment.hpp"
#include "ucql/qtable_io.hpp"
#include "ucql/run_config.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> episodes;
  std::optional<std::string> out_dir;
  bool print_default = false;

  bool resume = false;
  bool paper_tables = false;
  std::string before_path;
  std::string after_path;
  std::string export_input;
  std::string export_format = "csv";
};

ucql::RunConfig resolve_config(const Options& o, bool episodes_for_training) {
  ucql::RunConfig cfg = o.config_path.empty() ? ucql::RunConfig{} : ucql::load_run_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.episodes) (episodes_for_training ? cfg.episodes.train : cfg.episodes.evaluate) = *o.episodes;
  if (auto err = ucql::validate(cfg)) throw ucql::ConfigError(*err);
  return cfg;
}

int cmd_train(const Options& o) {
  const ucql::RunConfig cfg = resolve_config(o, true);
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  ucql::TrainOptions topts;
  topts.resume = o.resume;
  topts.stop = &g_stop;
  const ucql::TrainOutcome r = ucql::run_training(cfg, topts);
  const fs::path out = cfg.out_dir;
  if (r.status == ucql::TrainStatus::Interrupted) {
    std::cerr << "interrupted after " << r.episodes_done << " of " << cfg.episodes.train
              << " episodes; checkpoint written to " << (out / ucql::artifact::kCheckpointDir).string()
              << " (rerun with --resume)\n";
    return kExitRuntime;
  }
  std::cout << "trained " << r.episodes_done << " episodes (seed " << cfg.seed << ")\n"
            << "wrote " << (out / ucql::artifact::kQAfter).string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o) {
  const ucql::RunConfig cfg = resolve_config(o, false);
  if (o.paper_tables) {
    const auto report = ucql::evaluate_matrices(ucql::kPaperBefore, ucql::kPaperAfter, cfg.significance);
    std::cout << ucql::format_report(report);
    return kExitOk;
  }
  const fs::path out = cfg.out_dir;
  const fs::path before = o.before_path.empty() ? out / ucql::artifact::kQBefore : fs::path(o.before_path);
  const fs::path after = o.after_path.empty() ? out / ucql::artifact::kQAfter : fs::path(o.after_path);
  const auto report = ucql::run_evaluation(cfg, before, after);
  std::cout << ucql::format_report(report);
  return kExitOk;
}

int cmd_export(const Options& o) {
  ucql::HeatmapFormat format;
  try {
    format = ucql::parse_heatmap_format(o.export_format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ucql::QTable table = ucql::load_qtable(o.export_input);
  const fs::path out = o.out_dir ? fs::path(*o.out_dir) : fs::path(ucql::RunConfig{}.out_dir);
  fs::create_directories(out);
  fs::path target = out / fs::path(o.export_input).filename();
  target.replace_extension(format == ucql::HeatmapFormat::Csv ? ".csv" : ".pgm");
  ucql::export_heatmap(table, target, format);
  std::cout << "wrote " << target.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Passerby-engagement Q-learning: training, frozen evaluation and table export", "ucql"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.add_option("--config", o.config_path, "JSON run configuration (missing keys keep defaults)");
  app.add_option("--seed", o.seed, "master seed (overrides the config)");
  app.add_option("--episodes", o.episodes, "episode count for the command: training episodes for train, per-condition episodes for evaluate");
  app.add_option("--out", o.out_dir, "output directory (overrides the config)");
  app.add_flag("--print-default-config", o.print_default, "print the built-in configuration and exit");

  auto* train = app.add_subcommand("train", "learn Q_A from Q_B in the simulated hall");
  train->add_flag("--resume", o.resume, "continue from <out>/checkpoint");

  auto* evaluate = app.add_subcommand("evaluate", "frozen before/after evaluation and proportion test");
  evaluate->add_flag("--paper-tables", o.paper_tables, "test the published confusion matrices instead of simulating");
  evaluate->add_option("--before", o.before_path, "table for the before condition (default <out>/q_before.csv)");
  evaluate->add_option("--after", o.after_path, "table for the after condition (default <out>/q_after.csv)");

  auto* exporter = app.add_subcommand("export", "write a Q-table as CSV or grayscale PGM heat map");
  exporter->add_option("table", o.export_input, "Q-table CSV")->required();
  exporter->add_option("--format", o.export_format, "csv or pgm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (o.print_default) {
      std::cout << ucql::default_config_text();
      return kExitOk;
    }
    if (*train) return cmd_train(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*exporter) return cmd_export(o);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ucql::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
