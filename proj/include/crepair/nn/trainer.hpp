#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/nn/model.hpp"

namespace crepair::nn {

class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParameterStore& params, const GradStore& grads);

  std::uint64_t steps() const { return t_; }
  double lr() const { return lr_; }
  const std::vector<Mat>& first_moments() const { return m_; }
  const std::vector<Mat>& second_moments() const { return v_; }
  void restore(std::uint64_t t, std::vector<Mat> m, std::vector<Mat> v);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Mat> m_, v_;
};

// Scales `grads` so its global L2 norm is at most `max_norm`. Returns the
// norm before clipping.
double clip_global_norm(GradStore& grads, double max_norm);

struct LossRecord {
  std::size_t step = 0;
  double loc = 0.0;
  double gen = 0.0;
  double total = 0.0;
};

// Mean loss of a batch and the mean gradient in `grads`. Each example is
// differentiated on its own tape and the results are summed in batch order,
// so `threads` never changes the numbers. `dropout_seed` = 0 disables dropout.
LossRecord batch_gradient(const Model& model, const std::vector<const PreparedExample*>& batch,
                          GradStore& grads, std::uint64_t dropout_seed = 0, std::size_t threads = 1);

// Loss without gradients, averaged over `examples`.
LossRecord evaluate_loss(const Model& model, const std::vector<PreparedExample>& examples);

struct EpochSummary {
  std::size_t epoch = 0;
  double mean_total = 0.0;
  std::optional<double> train_accuracy;
  std::optional<double> validation_accuracy;
};

struct TrainOptions {
  std::size_t epochs = 1;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  // Exact-match accuracy on the training set is measured every
  // `accuracy_every` epochs (0 = never); training stops once it reaches
  // `stop_at_train_accuracy` (0 = never).
  std::size_t accuracy_every = 0;
  double stop_at_train_accuracy = 0.0;
  // Beam width for those accuracy measurements; the top-1 candidate counts.
  std::size_t accuracy_beam = 1;
  // When validation examples are given, accuracy on them is measured each
  // epoch and the best parameters are kept (the latest epoch among ties).
  bool keep_best_validation = true;
  std::function<void(const EpochSummary&)> on_epoch;
};

struct TrainState {
  std::uint64_t seed = 0;
  std::size_t epoch = 0;  // completed epochs
  std::size_t step = 0;   // completed optimizer steps
};

nlohmann::ordered_json to_json(const TrainState& state);
TrainState train_state_from_json(const nlohmann::json& j);

struct TrainResult {
  std::vector<LossRecord> trace;
  std::vector<EpochSummary> epochs;
  bool stopped_early = false;
  std::optional<std::size_t> best_epoch;
};

class Trainer {
 public:
  Trainer(Model& model, TrainOptions options);

  TrainResult run(const std::vector<PreparedExample>& train,
                  const std::vector<PreparedExample>& validation = {});

  Adam& optimizer() { return adam_; }
  const Adam& optimizer() const { return adam_; }
  TrainState& state() { return state_; }
  const TrainState& state() const { return state_; }

 private:
  Model& model_;
  TrainOptions options_;
  Adam adam_;
  TrainState state_;
};

// CSV with a version comment line and columns step,L_loc,L_gen,total.
void write_loss_trace(const std::filesystem::path& path, const std::vector<LossRecord>& trace);
std::vector<LossRecord> read_loss_trace(const std::filesystem::path& path);

}  // namespace crepair::nn
