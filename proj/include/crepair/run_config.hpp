#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "crepair/corruption.hpp"
#include "crepair/dataset.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/nn/config.hpp"
#include "crepair/repair.hpp"

namespace crepair {

struct TrainingSettings {
  std::size_t epochs = 30;
  unsigned threads = 1;
  std::size_t accuracy_every = 1;
  double stop_at_train_accuracy = 0.0;
  bool keep_best_validation = true;
};

// Everything a run depends on besides the input corpus. Sub-seeds for each
// stage are derived from `seed` by name.
struct RunConfig {
  std::uint64_t seed = 0;
  nn::HyperParams hyper;
  CompilerConfig compiler = CompilerConfig::from_environment();
  SynthesisConfig synthesis;  // its seed field is ignored in favour of `seed`
  SplitRatios split;
  TrainingSettings training;
  RepairOptions repair;
  std::map<std::string, std::string> paths;

  std::uint64_t stage_seed(std::string_view stage) const;
  SynthesisConfig synthesis_config() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);
// Fields absent from `j` keep their defaults; unknown keys throw InvalidInput.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace crepair
