#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/corruption.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/nn/model.hpp"
#include "crepair/program.hpp"

namespace crepair {

struct RepairCandidate {
  LineIndex line = 0;
  std::vector<std::string> tokens;  // placeholders already replaced
  double log_prob = 0.0;
  int rank = 0;  // 1-based
};

// Top-B replacements for `line`, best first. `lines` are the encoder inputs
// of the whole program built from `diagnostic`.
std::vector<RepairCandidate> beam_decode(const nn::Model& model,
                                         const std::vector<nn::EncoderInput>& lines, LineIndex line,
                                         const IdMap& id_map, std::size_t beam_width);

enum class RepairStatus { FullRepair, Improved, Failed };
std::string_view to_string(RepairStatus status);

struct RepairIteration {
  std::size_t input_errors = 0;
  LineIndex reported_line = 0;
  std::vector<LineIndex> lines_tried;  // localizer order
  std::size_t candidates_compiled = 0;
  std::optional<RepairCandidate> chosen;
  std::size_t output_errors = 0;
};

struct RepairTrace {
  std::vector<RepairIteration> iterations;
  RepairStatus final_status = RepairStatus::Failed;
  std::size_t initial_errors = 0;
  std::size_t final_errors = 0;
  std::string stop_reason;

  std::size_t iteration_count() const { return iterations.size(); }
  // Share of iterations whose first localized line differs from the line
  // the compiler reported.
  double localizer_disagreement() const;
  nlohmann::ordered_json to_json() const;
};

struct RepairOptions {
  std::size_t beam_width = 5;
  std::size_t max_iterations = 5;
  std::size_t max_line_attempts = 3;
};

struct RepairResult {
  TokenizedProgram program;
  RepairTrace trace;
};

// Compiler-in-the-loop repair. Each iteration localizes with the first
// diagnostic, decodes candidates for up to max_line_attempts lines and keeps
// the first candidate, in rank order, that compiles cleanly or lowers the
// error count.
RepairResult repair_program(const TokenizedProgram& program, const nn::Model& model,
                            const Compiler& compiler, const RepairOptions& options = {});

struct EvalOptions {
  RepairOptions repair;
  // Skip the compiler-in-the-loop metric (the slowest part).
  bool full_repair = true;
};

struct Metrics {
  std::size_t programs = 0;
  std::size_t single_error_programs = 0;
  std::size_t examples = 0;  // (program, corrupted line) pairs scored for acc@k
  bool ground_truth = false;
  std::optional<double> single_localize;
  std::optional<double> acc_at_1, acc_at_5, acc_at_10;
  std::optional<double> full_repair;
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const;
  // One "name value" row per metric, padded into columns.
  std::string to_text() const;
};

// Metrics over a set of broken programs. Programs without corruption
// records contribute only to full_repair; if none has one, the single
// repair metrics are omitted with a note.
Metrics evaluate(const std::vector<BrokenProgram>& set, const nn::Model& model,
                 const Compiler& compiler, const EvalOptions& options = {});

// acc@1, acc@5, acc@10 from one width-10 beam per example. Throws
// MissingGroundTruth when a program has no corruption records.
std::vector<double> single_repair_accuracy(const std::vector<BrokenProgram>& set,
                                           const nn::Model& model, const Compiler& compiler);

}  // namespace crepair
