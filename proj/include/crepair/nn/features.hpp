#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crepair/context.hpp"
#include "crepair/corruption.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/nn/config.hpp"
#include "crepair/program.hpp"

namespace crepair::nn {

// s_i = (BOS, l_i, SEP, c_i, SEP, m_err, EOS) as strings, plus the clamped
// line offset reported_line - i.
struct LineSequence {
  std::vector<std::string> tokens;
  int offset = 0;
};

inline const std::string kBosToken = "<BOS>";
inline const std::string kEosToken = "<EOS>";
inline const std::string kSepToken = "<SEP>";

// One sequence per program line. The context is cut to fit max_seq_len.
// Throws SequenceTooLong when the line and message alone do not fit.
std::vector<LineSequence> build_line_sequences(const TokenizedProgram& program,
                                               const std::vector<LineContext>& contexts,
                                               const std::vector<std::string>& message,
                                               LineIndex reported_line, const HyperParams& hp);

std::vector<LineSequence> build_line_sequences(const TokenizedProgram& program,
                                               const Diagnostic& diagnostic,
                                               const HyperParams& hp);

// Diagnostic whose reported line is nearest to `line`; ties go to the one
// emitted first. `diagnostics` must be non-empty.
const Diagnostic& nearest_diagnostic(const std::vector<Diagnostic>& diagnostics, LineIndex line);

// A supervised example: the program's line sequences, the true error line
// and the tokens of the original line.
struct Example {
  std::string id;
  std::vector<LineSequence> lines;
  LineIndex error_line = 0;
  LineIndex reported_line = 0;
  std::vector<std::string> target;
  IdMap id_map;
};

// One example per corruption record, each paired with its nearest
// diagnostic. Throws TargetTooLong and SequenceTooLong.
std::vector<Example> build_examples(const BrokenProgram& broken, const Compiler& compiler,
                                    const HyperParams& hp);

struct ExampleBuildReport {
  std::size_t programs = 0;
  std::size_t examples = 0;
  // Programs dropped because a sequence or target exceeds the configured
  // lengths, or because the program compiles.
  std::vector<std::string> skipped;
};

std::vector<Example> build_examples(const std::vector<BrokenProgram>& broken, const Compiler& compiler,
                                    const HyperParams& hp, ExampleBuildReport* report = nullptr);

// Token stream used to build the vocabulary: every sequence token of the
// error line's input plus the target.
std::vector<std::string> vocabulary_stream(const std::vector<Example>& examples);

}  // namespace crepair::nn
