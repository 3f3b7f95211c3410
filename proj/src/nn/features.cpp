#include "crepair/nn/features.hpp"

#include <algorithm>

#include "crepair/error.hpp"

namespace crepair::nn {

std::vector<LineSequence> build_line_sequences(const TokenizedProgram& program,
                                               const std::vector<LineContext>& contexts,
                                               const std::vector<std::string>& message,
                                               LineIndex reported_line, const HyperParams& hp) {
  std::vector<LineSequence> out;
  out.reserve(program.line_count());
  const long radius = static_cast<long>(hp.offset_radius);
  for (LineIndex i = 1; i <= program.line_count(); ++i) {
    const TokenLine& line = program.line(i);
    const std::size_t fixed = 4 + line.size() + message.size();
    if (fixed > hp.max_seq_len)
      throw Error(ErrorCode::SequenceTooLong,
                  "line " + std::to_string(i) + " with its message needs " + std::to_string(fixed) +
                      " positions",
                  {{"line", i}, {"length", fixed}, {"max_seq_len", hp.max_seq_len}});
    const std::size_t budget = std::min(hp.context_budget, hp.max_seq_len - fixed);
    const TokenLine context = materialize_context(program, i, contexts[i - 1].context_lines, budget);
    LineSequence seq;
    seq.tokens.reserve(fixed + context.size());
    seq.tokens.push_back(kBosToken);
    for (const Token& t : line) seq.tokens.push_back(t.text);
    seq.tokens.push_back(kSepToken);
    for (const Token& t : context) seq.tokens.push_back(t.text);
    seq.tokens.push_back(kSepToken);
    seq.tokens.insert(seq.tokens.end(), message.begin(), message.end());
    seq.tokens.push_back(kEosToken);
    const long delta = static_cast<long>(reported_line) - static_cast<long>(i);
    seq.offset = static_cast<int>(std::clamp(delta, -radius, radius));
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<LineSequence> build_line_sequences(const TokenizedProgram& program,
                                               const Diagnostic& diagnostic,
                                               const HyperParams& hp) {
  const auto tables = analyzer(program);
  const auto contexts = get_context(program, tables);
  return build_line_sequences(program, contexts, message_model_tokens(diagnostic.normalized_message),
                              diagnostic.reported_line, hp);
}

const Diagnostic& nearest_diagnostic(const std::vector<Diagnostic>& diagnostics, LineIndex line) {
  const Diagnostic* best = &diagnostics.front();
  auto distance = [line](const Diagnostic& d) {
    return d.reported_line > line ? d.reported_line - line : line - d.reported_line;
  };
  for (const auto& d : diagnostics)
    if (distance(d) < distance(*best)) best = &d;
  return *best;
}

std::vector<Example> build_examples(const BrokenProgram& broken, const Compiler& compiler,
                                    const HyperParams& hp) {
  CompileResult result = compiler.compile(detokenize(broken.program));
  const auto tables = analyzer(broken.program);
  normalize_diagnostics(result, tables);
  if (result.diagnostics.empty())
    throw Error(ErrorCode::InvalidInput, "broken program compiles: " + broken.program.source_id,
                {{"source_id", broken.program.source_id}});
  const auto contexts = get_context(broken.program, tables);
  std::vector<Example> out;
  for (const auto& record : broken.corruptions) {
    if (record.original_line.size() + 1 > hp.max_target_len)
      throw Error(ErrorCode::TargetTooLong, "target line has " + std::to_string(record.original_line.size()) + " tokens",
                  {{"source_id", broken.program.source_id}, {"line", record.line},
                   {"max_target_len", hp.max_target_len}});
    const Diagnostic& d = nearest_diagnostic(result.diagnostics, record.line);
    Example ex;
    ex.id = broken.program.source_id + "@" + std::to_string(record.line);
    ex.lines = build_line_sequences(broken.program, contexts,
                                    message_model_tokens(d.normalized_message), d.reported_line, hp);
    ex.error_line = record.line;
    ex.reported_line = d.reported_line;
    ex.target = token_texts(record.original_line);
    ex.id_map = d.id_map;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> build_examples(const std::vector<BrokenProgram>& broken, const Compiler& compiler,
                                    const HyperParams& hp, ExampleBuildReport* report) {
  std::vector<Example> out;
  ExampleBuildReport local;
  for (const auto& b : broken) {
    ++local.programs;
    try {
      auto examples = build_examples(b, compiler, hp);
      local.examples += examples.size();
      for (auto& ex : examples) out.push_back(std::move(ex));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SequenceTooLong && e.code() != ErrorCode::TargetTooLong &&
          e.code() != ErrorCode::InvalidInput)
        throw;
      local.skipped.push_back(b.program.source_id);
    }
  }
  if (report) *report = std::move(local);
  return out;
}

std::vector<std::string> vocabulary_stream(const std::vector<Example>& examples) {
  std::vector<std::string> stream;
  for (const auto& ex : examples) {
    const auto& seq = ex.lines[ex.error_line - 1].tokens;
    stream.insert(stream.end(), seq.begin(), seq.end());
    stream.insert(stream.end(), ex.target.begin(), ex.target.end());
  }
  return stream;
}

}  // namespace crepair::nn
