#include "crepair/nn/config.hpp"

#include <algorithm>

#include "crepair/error.hpp"

namespace crepair::nn {

HyperParams HyperParams::full() { return HyperParams{}; }

HyperParams HyperParams::desk() {
  HyperParams hp;
  hp.layers = 2;
  hp.heads = 4;
  hp.d_model = 64;
  hp.lr = 1e-3;
  hp.batch_size = 16;
  hp.dropout = 0.0;
  hp.context_budget = 48;
  return hp;
}

HyperParams HyperParams::tiny() {
  HyperParams hp;
  hp.layers = 1;
  hp.heads = 1;
  hp.d_model = 16;
  hp.d_ff = 32;
  hp.offset_radius = 4;
  hp.dropout = 0.0;
  hp.max_seq_len = 64;
  hp.max_target_len = 16;
  hp.context_budget = 12;
  hp.max_vocab = 50;
  hp.batch_size = 2;
  return hp;
}

void HyperParams::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidInput, "bad hyperparameters: " + why); };
  if (layers == 0 || heads == 0 || d_model == 0) fail("layers, heads and d_model must be positive");
  if (d_model % heads) fail("heads must divide d_model");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
  if (max_seq_len < 8) fail("max_seq_len too small");
  if (max_target_len < 2) fail("max_target_len too small");
}

nlohmann::ordered_json to_json(const HyperParams& hp) {
  nlohmann::ordered_json j;
  j["layers"] = hp.layers;
  j["heads"] = hp.heads;
  j["d_model"] = hp.d_model;
  j["d_ff"] = hp.ff_dim();
  j["offset_radius"] = hp.offset_radius;
  j["lr"] = hp.lr;
  j["batch_size"] = hp.batch_size;
  j["dropout"] = hp.dropout;
  j["grad_clip"] = hp.grad_clip;
  j["max_seq_len"] = hp.max_seq_len;
  j["max_target_len"] = hp.max_target_len;
  j["context_budget"] = hp.context_budget;
  j["min_token_count"] = hp.min_token_count;
  j["max_vocab"] = hp.max_vocab;
  return j;
}

HyperParams hyper_params_from_json(const nlohmann::json& j, HyperParams hp) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("layers", hp.layers);
  get("heads", hp.heads);
  get("d_model", hp.d_model);
  get("d_ff", hp.d_ff);
  get("offset_radius", hp.offset_radius);
  get("lr", hp.lr);
  get("batch_size", hp.batch_size);
  get("dropout", hp.dropout);
  get("grad_clip", hp.grad_clip);
  get("max_seq_len", hp.max_seq_len);
  get("max_target_len", hp.max_target_len);
  get("context_budget", hp.context_budget);
  get("min_token_count", hp.min_token_count);
  get("max_vocab", hp.max_vocab);
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"layers", "heads", "d_model", "d_ff", "offset_radius", "lr",
                                  "batch_size", "dropout", "grad_clip", "max_seq_len",
                                  "max_target_len", "context_budget", "min_token_count", "max_vocab"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw Error(ErrorCode::InvalidInput, "unknown hyperparameter '" + key + "'");
  }
  hp.validate();
  return hp;
}

}  // namespace crepair::nn
