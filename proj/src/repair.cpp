#include "crepair/repair.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "crepair/context.hpp"
#include "crepair/error.hpp"
#include "crepair/nn/decode.hpp"
#include "crepair/nn/features.hpp"

namespace crepair {

std::vector<RepairCandidate> beam_decode(const nn::Model& model,
                                         const std::vector<nn::EncoderInput>& lines, LineIndex line,
                                         const IdMap& id_map, std::size_t beam_width) {
  const std::size_t index = line - 1;
  const nn::EncoderInput& source = lines.at(index);
  const nn::CopyMap copy = nn::make_copy_map(source, model.vocab());
  const nn::Mat memory = nn::encode_line(model, lines, index);
  auto found = nn::beam_search(nn::model_scorer(model, memory, source, copy), beam_width,
                               model.hyper_params().max_target_len, nn::Vocabulary::kEos);
  std::vector<RepairCandidate> out;
  for (std::size_t r = 0; r < found.size(); ++r)
    out.push_back({line, nn::hypothesis_tokens(found[r], copy, model.vocab(), id_map), found[r].log_prob,
                   static_cast<int>(r + 1)});
  return out;
}

std::string_view to_string(RepairStatus status) {
  switch (status) {
    case RepairStatus::FullRepair: return "FullRepair";
    case RepairStatus::Improved: return "Improved";
    case RepairStatus::Failed: return "Failed";
  }
  return "Failed";
}

double RepairTrace::localizer_disagreement() const {
  std::size_t counted = 0, differ = 0;
  for (const auto& it : iterations) {
    if (it.lines_tried.empty()) continue;
    ++counted;
    if (it.lines_tried.front() != it.reported_line) ++differ;
  }
  return counted ? static_cast<double>(differ) / static_cast<double>(counted) : 0.0;
}

nlohmann::ordered_json RepairTrace::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["final_status"] = to_string(final_status);
  j["iteration_count"] = iteration_count();
  j["initial_errors"] = initial_errors;
  j["final_errors"] = final_errors;
  j["stop_reason"] = stop_reason;
  j["localizer_disagreement"] = localizer_disagreement();
  nlohmann::ordered_json its = nlohmann::ordered_json::array();
  for (const auto& it : iterations) {
    nlohmann::ordered_json row;
    row["input_errors"] = it.input_errors;
    row["reported_line"] = it.reported_line;
    row["lines_tried"] = it.lines_tried;
    row["candidates_compiled"] = it.candidates_compiled;
    if (it.chosen)
      row["chosen"] = {{"line", it.chosen->line}, {"tokens", it.chosen->tokens},
                       {"log_prob", it.chosen->log_prob}, {"rank", it.chosen->rank}};
    else
      row["chosen"] = nullptr;
    row["output_errors"] = it.output_errors;
    its.push_back(std::move(row));
  }
  j["iterations"] = std::move(its);
  return j;
}

namespace {

bool usable(const RepairCandidate& c) {
  for (const auto& t : c.tokens)
    if (t.empty() || t == "<PAD>" || t == "<UNK>" || t == "<BOS>" || t == "<EOS>" || t == "<SEP>" ||
        is_placeholder(t))
      return false;
  return true;
}

std::optional<TokenizedProgram> splice(const TokenizedProgram& program, const RepairCandidate& c) {
  std::string text;
  for (LineIndex i = 1; i <= program.line_count(); ++i) {
    if (i == c.line) {
      for (std::size_t k = 0; k < c.tokens.size(); ++k) text += (k ? " " : "") + c.tokens[k];
    } else {
      text += detokenize_line(program.line(i));
    }
    text += '\n';
  }
  try {
    TokenizedProgram out = tokenize(text, program.source_id);
    if (out.line_count() != program.line_count()) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<LineIndex> ranked_lines(const Eigen::VectorXd& p) {
  std::vector<LineIndex> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), LineIndex{1});
  std::stable_sort(order.begin(), order.end(),
                   [&p](LineIndex a, LineIndex b) { return p(static_cast<Eigen::Index>(a - 1)) > p(static_cast<Eigen::Index>(b - 1)); });
  return order;
}

std::vector<nn::EncoderInput> encoder_inputs(const std::vector<nn::LineSequence>& seqs, const nn::Vocabulary& vocab) {
  std::vector<nn::EncoderInput> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(nn::make_encoder_input(s, vocab));
  return out;
}

}  // namespace

RepairResult repair_program(const TokenizedProgram& program, const nn::Model& model,
                            const Compiler& compiler, const RepairOptions& options) {
  RepairResult result{program, {}};
  RepairTrace& trace = result.trace;
  CompileResult current = compiler.compile(detokenize(program));
  trace.initial_errors = current.error_count;
  while (true) {
    if (current.success || current.error_count == 0) {
      trace.final_status = RepairStatus::FullRepair;
      trace.stop_reason = trace.iterations.empty() ? "input compiles" : "compiles";
      break;
    }
    if (trace.iterations.size() >= options.max_iterations) {
      trace.stop_reason = "iteration limit";
      break;
    }
    if (current.diagnostics.empty()) {
      trace.stop_reason = "no parsable diagnostic";
      break;
    }
    const SymbolTables tables = analyzer(result.program);
    normalize_diagnostics(current, tables);
    const Diagnostic& first = current.diagnostics.front();
    RepairIteration it;
    it.input_errors = current.error_count;
    it.reported_line = first.reported_line;
    std::vector<nn::EncoderInput> inputs;
    try {
      inputs = encoder_inputs(nn::build_line_sequences(result.program, first, model.hyper_params()), model.vocab());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SequenceTooLong) throw;
      trace.stop_reason = "sequence too long";
      break;
    }
    if (inputs.empty()) {
      trace.stop_reason = "empty program";
      break;
    }
    std::optional<CompileResult> accepted;
    std::optional<TokenizedProgram> accepted_program;
    for (LineIndex line : ranked_lines(model.localize(inputs))) {
      if (it.lines_tried.size() >= options.max_line_attempts) break;
      it.lines_tried.push_back(line);
      for (const auto& cand : beam_decode(model, inputs, line, first.id_map, options.beam_width)) {
        if (!usable(cand) || cand.tokens == token_texts(result.program.line(line))) continue;
        auto spliced = splice(result.program, cand);
        if (!spliced) continue;
        CompileResult r = compiler.compile(detokenize(*spliced));
        ++it.candidates_compiled;
        if (r.error_count == 0 || r.error_count < current.error_count) {
          it.chosen = cand;
          accepted = std::move(r);
          accepted_program = std::move(spliced);
          break;
        }
      }
      if (accepted) break;
    }
    if (!accepted) {
      it.output_errors = current.error_count;
      trace.iterations.push_back(std::move(it));
      trace.stop_reason = "no acceptable candidate";
      break;
    }
    it.output_errors = accepted->error_count;
    trace.iterations.push_back(std::move(it));
    result.program = std::move(*accepted_program);
    current = std::move(*accepted);
  }
  trace.final_errors = current.success ? 0 : current.error_count;
  if (trace.final_status != RepairStatus::FullRepair)
    trace.final_status = trace.final_errors < trace.initial_errors ? RepairStatus::Improved : RepairStatus::Failed;
  return result;
}

namespace {

struct Labeled {
  std::vector<nn::Example> examples;
  std::size_t skipped_programs = 0;
};

Labeled labeled_examples(const std::vector<BrokenProgram>& set, const nn::Model& model, const Compiler& compiler,
                         bool single_error_only) {
  Labeled out;
  for (const auto& b : set) {
    if (b.corruptions.empty() || (single_error_only && b.corruptions.size() != 1)) continue;
    try {
      for (auto& ex : nn::build_examples(b, compiler, model.hyper_params())) out.examples.push_back(std::move(ex));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SequenceTooLong && e.code() != ErrorCode::TargetTooLong &&
          e.code() != ErrorCode::InvalidInput)
        throw;
      ++out.skipped_programs;
    }
  }
  return out;
}

std::vector<double> accuracy_of(const Labeled& labeled, const nn::Model& model) {
  std::vector<nn::PreparedExample> prepared;
  for (const auto& ex : labeled.examples) prepared.push_back(nn::prepare_example(ex, model.vocab(), model.hyper_params()));
  return nn::top_k_accuracy(model, prepared, {1, 5, 10});
}

}  // namespace

std::vector<double> single_repair_accuracy(const std::vector<BrokenProgram>& set, const nn::Model& model,
                                           const Compiler& compiler) {
  for (const auto& b : set)
    if (b.corruptions.empty())
      throw Error(ErrorCode::MissingGroundTruth, "program has no ground-truth line: " + b.program.source_id,
                  {{"source_id", b.program.source_id}});
  return accuracy_of(labeled_examples(set, model, compiler, false), model);
}

Metrics evaluate(const std::vector<BrokenProgram>& set, const nn::Model& model, const Compiler& compiler,
                 const EvalOptions& options) {
  Metrics m;
  m.programs = set.size();
  m.ground_truth = std::any_of(set.begin(), set.end(), [](const BrokenProgram& b) { return !b.corruptions.empty(); });
  if (!m.ground_truth) {
    m.notes.push_back("no ground-truth lines: only full_repair is computed");
  } else {
    const std::size_t unlabeled = static_cast<std::size_t>(
        std::count_if(set.begin(), set.end(), [](const BrokenProgram& b) { return b.corruptions.empty(); }));
    if (unlabeled) m.notes.push_back(std::to_string(unlabeled) + " programs without ground truth count only towards full_repair");
    Labeled single = labeled_examples(set, model, compiler, true);
    for (const auto& b : set) m.single_error_programs += b.corruptions.size() == 1;
    if (!single.examples.empty()) {
      std::size_t hits = 0;
      for (const auto& ex : single.examples) {
        std::vector<nn::EncoderInput> inputs;
        for (const auto& s : ex.lines) inputs.push_back(nn::make_encoder_input(s, model.vocab()));
        Eigen::Index best;
        model.localize(inputs).maxCoeff(&best);
        hits += static_cast<LineIndex>(best + 1) == ex.error_line;
      }
      m.single_localize = static_cast<double>(hits) / static_cast<double>(single.examples.size());
    }
    Labeled all = labeled_examples(set, model, compiler, false);
    if (all.skipped_programs)
      m.notes.push_back(std::to_string(all.skipped_programs) + " programs exceed the configured sequence lengths");
    m.examples = all.examples.size();
    if (!all.examples.empty()) {
      auto acc = accuracy_of(all, model);
      m.acc_at_1 = acc[0];
      m.acc_at_5 = acc[1];
      m.acc_at_10 = acc[2];
    }
  }
  if (options.full_repair && !set.empty()) {
    std::size_t repaired = 0;
    for (const auto& b : set)
      repaired += repair_program(b.program, model, compiler, options.repair).trace.final_status == RepairStatus::FullRepair;
    m.full_repair = static_cast<double>(repaired) / static_cast<double>(set.size());
  }
  return m;
}

nlohmann::ordered_json Metrics::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["programs"] = programs;
  j["single_error_programs"] = single_error_programs;
  j["examples"] = examples;
  j["ground_truth"] = ground_truth;
  j["single_localize"] = opt(single_localize);
  j["acc@1"] = opt(acc_at_1);
  j["acc@5"] = opt(acc_at_5);
  j["acc@10"] = opt(acc_at_10);
  j["full_repair"] = opt(full_repair);
  j["notes"] = notes;
  return j;
}

std::string Metrics::to_text() const {
  std::ostringstream out;
  auto row = [&out](const std::string& name, const std::string& value) {
    out << std::left << std::setw(18) << name << std::right << std::setw(10) << value << '\n';
  };
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * *v << '%';
    return s.str();
  };
  row("programs", std::to_string(programs));
  row("examples", std::to_string(examples));
  row("single_localize", pct(single_localize));
  row("acc@1", pct(acc_at_1));
  row("acc@5", pct(acc_at_5));
  row("acc@10", pct(acc_at_10));
  row("full_repair", pct(full_repair));
  for (const auto& n : notes) out << "note: " << n << '\n';
  return out.str();
}

}  // namespace crepair
