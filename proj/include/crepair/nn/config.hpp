#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

namespace crepair::nn {

struct HyperParams {
  std::size_t layers = 5;
  std::size_t heads = 8;
  std::size_t d_model = 256;
  std::size_t d_ff = 0;  // 0 means 4 * d_model
  std::size_t offset_radius = 50;
  double lr = 1e-4;
  std::size_t batch_size = 25;
  double dropout = 0.1;
  double grad_clip = 10.0;
  std::size_t max_seq_len = 256;
  std::size_t max_target_len = 64;
  std::size_t context_budget = 128;
  std::size_t min_token_count = 2;
  std::size_t max_vocab = 0;  // 0 means unbounded

  // Full-size settings: 5 layers, 8 heads, d = 256, lr 1e-4, batch 25.
  static HyperParams full();
  // d = 64, 2 layers, 4 heads; trains on one CPU core in minutes.
  static HyperParams desk();
  // d = 16, 1 layer, 1 head; for finite-difference checks.
  static HyperParams tiny();

  std::size_t ff_dim() const { return d_ff ? d_ff : 4 * d_model; }
  // Throws InvalidInput when heads does not divide d_model and so on.
  void validate() const;
};

nlohmann::ordered_json to_json(const HyperParams& hp);
// Fields absent from `j` keep the values of `base`.
HyperParams hyper_params_from_json(const nlohmann::json& j, HyperParams base = {});

}  // namespace crepair::nn
