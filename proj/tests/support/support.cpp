#include "support.hpp"

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "crepair/diagnostics.hpp"
#include "crepair/io.hpp"
#include "crepair/nn/features.hpp"

namespace testsupport {

using namespace crepair;

const std::vector<TokenizedProgram>& corpus() {
  static const std::vector<TokenizedProgram> programs = load_sources(data_dir() / "corpus");
  return programs;
}

TokenizedProgram program_of(const std::vector<std::string>& lines, const std::string& id) {
  std::string source;
  for (const auto& l : lines) source += l + "\n";
  return tokenize(source, id);
}

namespace {

bool mentions(const TokenLine& line, const std::string& name) {
  for (const Token& t : line)
    if ((t.kind == TokenKind::Identifier || t.kind == TokenKind::TypeName) && t.text == name)
      return true;
  return false;
}

bool declares(const TokenLine& line, const std::string& name) {
  return mentions(line, name) && classify_occurrence(line, name) == Occurrence::Declare;
}

bool uses(const TokenLine& line, const std::string& name) {
  return mentions(line, name) && classify_occurrence(line, name) == Occurrence::Use;
}

}  // namespace

std::vector<LineIndex> brute_force_context(const TokenizedProgram& program,
                                           const SymbolTables& tables, LineIndex i) {
  const TokenLine& here = program.line(i);
  std::set<LineIndex> out;
  std::set<std::string> names;
  for (const Token& t : here)
    if ((t.kind == TokenKind::Identifier || t.kind == TokenKind::TypeName) && tables.contains(t.text))
      names.insert(t.text);
  const long n = static_cast<long>(program.line_count());
  for (const auto& name : names) {
    if (uses(here, name)) {
      long best = -1;
      for (long j = 1; j < static_cast<long>(i); ++j)
        if (declares(program.line(j), name)) best = j;
      if (best > 0) out.insert(best);
    }
    long best = -1;
    long best_dist = 0;
    for (long j = 1; j <= n; ++j) {
      if (j == static_cast<long>(i) || !uses(program.line(j), name)) continue;
      const long dist = std::labs(j - static_cast<long>(i));
      if (best < 0 || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best > 0) out.insert(best);
  }
  return {out.begin(), out.end()};
}

std::string run_capture(const std::string& command, int* status) {
  std::string out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) {
    if (status) *status = -1;
    return out;
  }
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) out.append(buffer.data(), n);
  const int rc = ::pclose(pipe);
  if (status) *status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

NeuralFixture neural_fixture(const nn::HyperParams& hp, std::size_t parents, std::size_t variants,
                             std::uint64_t seed) {
  NeuralFixture f;
  f.hp = hp;
  std::vector<TokenizedProgram> chosen(corpus().begin(),
                                       corpus().begin() + static_cast<long>(std::min(parents, corpus().size())));
  SynthesisConfig config;
  config.variants_per_program = variants;
  config.max_errors = 1;
  config.seed = seed;
  Compiler cc;
  f.broken = synthesize_corpus(chosen, config, cc);
  f.examples = nn::build_examples(f.broken, cc, hp);
  f.vocab = nn::build_vocabulary(f.examples, hp);
  f.prepared = nn::prepare_examples(f.examples, f.vocab, hp);
  return f;
}

}  // namespace testsupport
