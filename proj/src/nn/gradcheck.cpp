#include "crepair/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "crepair/error.hpp"
#include "crepair/nn/trainer.hpp"

namespace crepair::nn {

bool GradcheckReport::passed() const {
  return std::all_of(tensors.begin(), tensors.end(),
                     [this](const TensorCheck& t) { return t.max_rel_error < tolerance; });
}

nlohmann::ordered_json GradcheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["epsilon"] = epsilon;
  j["tolerance"] = tolerance;
  j["denominator_floor"] = denominator_floor;
  j["passed"] = passed();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& t : tensors)
    rows.push_back({{"name", t.name}, {"entries", t.entries}, {"max_rel_error", t.max_rel_error},
                    {"max_abs_error", t.max_abs_error}, {"passed", t.max_rel_error < tolerance}});
  j["tensors"] = std::move(rows);
  return j;
}

GradcheckReport gradient_check(Model& model, const std::vector<PreparedExample>& examples,
                               double epsilon, double tolerance) {
  if (examples.empty()) throw Error(ErrorCode::EmptyCorpus, "gradient check needs at least one example");
  std::vector<const PreparedExample*> batch;
  for (const auto& ex : examples) batch.push_back(&ex);
  GradStore analytic;
  batch_gradient(model, batch, analytic);

  GradcheckReport report;
  report.epsilon = epsilon;
  report.tolerance = tolerance;
  ParameterStore& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    TensorCheck check;
    check.name = params.name(i);
    Mat& value = params.value(i);
    check.entries = static_cast<std::size_t>(value.size());
    for (Eigen::Index k = 0; k < value.size(); ++k) {
      const double saved = value.data()[k];
      value.data()[k] = saved + epsilon;
      const double plus = evaluate_loss(model, examples).total;
      value.data()[k] = saved - epsilon;
      const double minus = evaluate_loss(model, examples).total;
      value.data()[k] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic.has(i) ? analytic.grad(i).data()[k] : 0.0;
      const double diff = std::abs(a - numeric);
      const double denom = std::max({std::abs(a), std::abs(numeric), report.denominator_floor});
      check.max_abs_error = std::max(check.max_abs_error, diff);
      check.max_rel_error = std::max(check.max_rel_error, diff / denom);
    }
    report.tensors.push_back(std::move(check));
  }
  return report;
}

void require_passed(const GradcheckReport& report) {
  const TensorCheck* worst = nullptr;
  for (const auto& t : report.tensors)
    if (t.max_rel_error >= report.tolerance && (!worst || t.max_rel_error > worst->max_rel_error)) worst = &t;
  if (worst)
    throw Error(ErrorCode::GradientMismatch, "gradient mismatch in " + worst->name,
                {{"tensor", worst->name}, {"max_rel_error", worst->max_rel_error}});
}

}  // namespace crepair::nn
