#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ucql/run_config.hpp"

namespace ucql {

// Published field matrices (tp, fp, fn, tn).
inline constexpr ConfusionMatrix kPaperBefore{11, 59, 0, 17};
inline constexpr ConfusionMatrix kPaperAfter{7, 23, 0, 92};

enum class Phase : std::uint64_t { Train = 1, EvalBefore = 2, EvalAfter = 3 };

// Master seed of the episode batch for one phase of a run.
std::uint64_t phase_seed(std::uint64_t master_seed, Phase phase);

// File names inside the output directory.
namespace artifact {
inline constexpr const char* kQBefore = "q_before.csv";
inline constexpr const char* kQAfter = "q_after.csv";
inline constexpr const char* kTrainLog = "train_episodes.jsonl";
inline constexpr const char* kTemperatureTrace = "temperature_trace.csv";
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kCheckpointDir = "checkpoint";
inline constexpr const char* kEvalLog = "eval_episodes.jsonl";
inline constexpr const char* kReport = "report.txt";
}  // namespace artifact

struct TrainOptions {
  bool resume = false;
  // Polled between episodes; when set the run stops and leaves a checkpoint.
  const std::atomic<bool>* stop = nullptr;
};

enum class TrainStatus { Completed, Interrupted };

struct TrainOutcome {
  TrainStatus status = TrainStatus::Completed;
  std::uint64_t episodes_done = 0;
  QTable q_before;
  QTable q_after;
};

// Learns Q_A from Q_B and writes q_before.csv, q_after.csv (with sidecars),
// the training episode log, the temperature trace and the effective config
// under cfg.out_dir. An interrupted run writes checkpoint/ instead of
// q_after.csv; `resume` continues it and yields the same bytes as an
// uninterrupted run.
TrainOutcome run_training(const RunConfig& cfg, const TrainOptions& options = {});

// In-memory variant without any files.
QTable train_table(const RunConfig& cfg);

struct EvaluationReport {
  ConfusionMatrix before;
  ConfusionMatrix after;
  std::uint64_t raw_before = 0;  // episodes before cleansing
  std::uint64_t raw_after = 0;
  bool simulated = true;
  double significance = 0.01;
  TestResult test;

  bool pass() const { return test.p < significance && test.accuracy_after > test.accuracy_before; }
};

// Frozen batches under each table, cleansed and classified.
EvaluationReport evaluate_tables(const RunConfig& cfg, const QTable& q_before, const QTable& q_after,
                                 std::vector<Episode>* episodes = nullptr);

EvaluationReport evaluate_matrices(const ConfusionMatrix& before, const ConfusionMatrix& after,
                                   double significance);

std::string format_report(const EvaluationReport& report);

// Writes eval_episodes.jsonl and report.txt under cfg.out_dir.
EvaluationReport run_evaluation(const RunConfig& cfg, const std::filesystem::path& q_before_path,
                                const std::filesystem::path& q_after_path);

}  // namespace ucql
