#pragma once

#include <filesystem>
#include <optional>

#include "crepair/nn/model.hpp"
#include "crepair/nn/trainer.hpp"

namespace crepair::nn {

// Single-file container. The first line is a JSON header
// {"format_version":1, "config", "vocab", "tensors":[{name, rows, cols, offset}],
//  "rng_state", "adam"}; raw little-endian float64 tensor data follows,
// `offset` counting doubles from the start of the data section.
struct LoadedCheckpoint {
  Model model;
  std::optional<TrainState> state;
  std::optional<Adam> optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const TrainState* state = nullptr, const Adam* optimizer = nullptr);

// Throws ModelMissing when the file does not exist, UnsupportedVersion on an
// unknown format_version and InvalidInput on a malformed container.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace crepair::nn
