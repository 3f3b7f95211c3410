#include "crepair/run_config.hpp"

#include <algorithm>
#include <initializer_list>

#include "crepair/error.hpp"
#include "crepair/format.hpp"
#include "crepair/io.hpp"
#include "crepair/rng.hpp"

namespace crepair {

namespace {

void reject_unknown(const nlohmann::json& j, std::string_view section,
                    std::initializer_list<std::string_view> known) {
  if (!j.is_object())
    throw Error(ErrorCode::InvalidInput, "config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::InvalidInput, "unknown config key '" + std::string(section) + "." + key + "'");
}

template <class T>
void get(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

std::uint64_t RunConfig::stage_seed(std::string_view stage) const { return derive_seed(seed, stage); }

SynthesisConfig RunConfig::synthesis_config() const {
  SynthesisConfig c = synthesis;
  c.seed = stage_seed("synthesize");
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = config.seed;
  j["hyper"] = nn::to_json(config.hyper);
  j["compiler"] = to_json(config.compiler);

  nlohmann::ordered_json mix;
  for (std::size_t i = 0; i < kAllCategories.size(); ++i)
    mix[std::string(to_string(kAllCategories[i]))] = config.synthesis.category_mix.weights[i];
  j["synthesis"] = {{"variants_per_program", config.synthesis.variants_per_program},
                    {"max_errors", config.synthesis.max_errors},
                    {"category_mix", mix},
                    {"retry_budget", config.synthesis.retry_budget},
                    {"threads", config.synthesis.threads}};
  j["split"] = {{"train", config.split.train},
                {"validation", config.split.validation},
                {"test", config.split.test}};
  j["training"] = {{"epochs", config.training.epochs},
                   {"threads", config.training.threads},
                   {"accuracy_every", config.training.accuracy_every},
                   {"stop_at_train_accuracy", config.training.stop_at_train_accuracy},
                   {"keep_best_validation", config.training.keep_best_validation}};
  j["repair"] = {{"beam_width", config.repair.beam_width},
                 {"max_iterations", config.repair.max_iterations},
                 {"max_line_attempts", config.repair.max_line_attempts}};
  j["paths"] = config.paths;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  require_format_version(j, "run config");
  reject_unknown(j, "config",
                 {"format_version", "seed", "hyper", "compiler", "synthesis", "split", "training", "repair", "paths"});
  RunConfig c;
  try {
    get(j, "seed", c.seed);
    if (j.contains("hyper")) c.hyper = nn::hyper_params_from_json(j.at("hyper"), c.hyper);
    if (j.contains("compiler")) {
      reject_unknown(j.at("compiler"), "compiler", {"path", "flags", "timeout_seconds", "max_concurrent"});
      c.compiler = compiler_config_from_json(j.at("compiler"));
    }
    if (j.contains("synthesis")) {
      const auto& s = j.at("synthesis");
      reject_unknown(s, "synthesis", {"variants_per_program", "max_errors", "category_mix", "retry_budget", "threads"});
      get(s, "variants_per_program", c.synthesis.variants_per_program);
      get(s, "max_errors", c.synthesis.max_errors);
      get(s, "retry_budget", c.synthesis.retry_budget);
      get(s, "threads", c.synthesis.threads);
      if (s.contains("category_mix")) {
        const auto& mix = s.at("category_mix");
        if (!mix.is_object()) throw Error(ErrorCode::InvalidInput, "synthesis.category_mix must be an object");
        for (const auto& [name, weight] : mix.items())
          c.synthesis.category_mix.weights[static_cast<std::size_t>(category_from_string(name))] = weight.get<double>();
        c.synthesis.category_mix.normalized();
      }
      if (c.synthesis.max_errors < 1 || c.synthesis.variants_per_program < 1)
        throw Error(ErrorCode::InvalidInput, "synthesis.max_errors and variants_per_program must be positive");
    }
    if (j.contains("split")) {
      reject_unknown(j.at("split"), "split", {"train", "validation", "test"});
      get(j.at("split"), "train", c.split.train);
      get(j.at("split"), "validation", c.split.validation);
      get(j.at("split"), "test", c.split.test);
    }
    if (j.contains("training")) {
      const auto& t = j.at("training");
      reject_unknown(t, "training", {"epochs", "threads", "accuracy_every", "stop_at_train_accuracy", "keep_best_validation"});
      get(t, "epochs", c.training.epochs);
      get(t, "threads", c.training.threads);
      get(t, "accuracy_every", c.training.accuracy_every);
      get(t, "stop_at_train_accuracy", c.training.stop_at_train_accuracy);
      get(t, "keep_best_validation", c.training.keep_best_validation);
    }
    if (j.contains("repair")) {
      reject_unknown(j.at("repair"), "repair", {"beam_width", "max_iterations", "max_line_attempts"});
      get(j.at("repair"), "beam_width", c.repair.beam_width);
      get(j.at("repair"), "max_iterations", c.repair.max_iterations);
      get(j.at("repair"), "max_line_attempts", c.repair.max_line_attempts);
    }
    get(j, "paths", c.paths);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, "config is not valid JSON: " + std::string(e.what()),
                {{"path", path.string()}});
  }
  return run_config_from_json(j);
}

}  // namespace crepair
