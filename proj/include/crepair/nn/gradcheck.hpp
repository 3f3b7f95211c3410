#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/nn/model.hpp"

namespace crepair::nn {

struct TensorCheck {
  std::string name;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradcheckReport {
  double epsilon = 1e-4;
  double tolerance = 1e-3;
  double denominator_floor = 1e-6;
  std::vector<TensorCheck> tensors;

  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

// Compares the analytic gradient of the mean total loss over `examples` with
// central differences for every entry of every parameter tensor. The
// relative error of an entry is |a - n| / max(|a|, |n|, denominator_floor).
// Dropout is disabled.
GradcheckReport gradient_check(Model& model, const std::vector<PreparedExample>& examples,
                               double epsilon = 1e-4, double tolerance = 1e-3);

// Throws GradientMismatch naming the worst failing tensor.
void require_passed(const GradcheckReport& report);

}  // namespace crepair::nn
