#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ucql/domain.hpp"
#include "ucql/estimator.hpp"
#include "ucql/eval.hpp"
#include "ucql/learner.hpp"
#include "ucql/simulator.hpp"

namespace ucql {

struct EpisodeCounts {
  std::uint64_t train = 300;
  std::uint64_t evaluate = 150;  // per condition
};

struct RunConfig {
  std::uint64_t seed = 1;
  EpisodeCounts episodes;
  LearnerParams learner;
  EstimatorConfig estimator;
  WorldConfig world;
  PolicyKind train_policy = PolicyKind::softmax();
  PolicyKind eval_policy = PolicyKind::greedy();
  CleanseRules cleanse;
  double significance = 0.01;
  unsigned workers = 1;
  std::string out_dir = "out";
};

// Thrown for anything wrong with a configuration file or value.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::string> validate(const RunConfig& cfg);

// Pretty-printed JSON with every field present.
std::string to_json_text(const RunConfig& cfg);
std::string default_config_text();

// Keys missing from `text` keep their defaults; unknown keys and type
// mismatches are errors. The result is validated.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ucql
