#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/context.hpp"
#include "crepair/program.hpp"

namespace crepair {

// placeholder -> original identifier, in order of first appearance.
using IdMap = std::vector<std::pair<std::string, std::string>>;

struct Diagnostic {
  LineIndex reported_line = 0;
  std::optional<int> column;
  std::string raw_message;
  std::vector<std::string> normalized_message;
  IdMap id_map;
};

struct CompileResult {
  bool success = false;
  std::vector<Diagnostic> diagnostics;  // compiler emission order
  std::size_t error_count = 0;
  // Output lines that are neither errors nor recognised warnings/notes.
  std::vector<std::string> unparsed;
};

struct CompilerConfig {
  std::string path = "gcc";
  std::vector<std::string> flags = {"-fsyntax-only", "-std=c99", "-w",
                                    "-fdiagnostics-plain-output"};
  double timeout_seconds = 10.0;
  unsigned max_concurrent = 0;  // 0 = hardware concurrency

  // Reads CREPAIR_CC for the compiler path when set.
  static CompilerConfig from_environment();
};

nlohmann::ordered_json to_json(const CompilerConfig& config);
CompilerConfig compiler_config_from_json(const nlohmann::json& j);

class Compiler {
 public:
  explicit Compiler(CompilerConfig config = CompilerConfig::from_environment());

  // Syntax-only compile of one translation unit written into `workdir`.
  // Throws CompilerUnavailable or CompilerTimeout.
  CompileResult compile(std::string_view source, const std::filesystem::path& workdir) const;
  // Same, in a fresh temporary directory that is removed afterwards.
  CompileResult compile(std::string_view source) const;

  const CompilerConfig& config() const noexcept { return config_; }

 private:
  CompilerConfig config_;
};

// Parses raw compiler output. Lines that match "<file>:<line>[:<col>]: error: msg"
// become diagnostics; warnings and notes are skipped; anything else is kept in
// `unparsed`.
CompileResult parse_compiler_output(std::string_view output);

struct NormalizedMessage {
  std::vector<std::string> tokens;
  IdMap id_map;
};

// Replaces program-defined identifiers with _<varN>_, _<funcN>_ and _<typeN>_
// placeholders, numbered per class by first appearance. Tokens are the
// message split on single spaces, so joining them restores the spacing.
NormalizedMessage normalize_message(std::string_view raw, const SymbolTables& symbols);

// Inverse of normalize_message. Throws UnknownPlaceholder.
std::string denormalize(const std::vector<std::string>& tokens, const IdMap& id_map);

// Substitutes placeholders in a single token; unknown placeholders throw.
std::string denormalize_token(std::string_view token, const IdMap& id_map);

bool is_placeholder(std::string_view text);
std::string make_placeholder(std::string_view cls, std::size_t index);

// Fills normalized_message/id_map of every diagnostic.
void normalize_diagnostics(CompileResult& result, const SymbolTables& symbols);

// View of a normalized message for the encoder: quote characters are split
// off from the words they wrap and empty pieces are dropped.
std::vector<std::string> message_model_tokens(const std::vector<std::string>& tokens);

nlohmann::ordered_json to_json(const Diagnostic& diagnostic);
Diagnostic diagnostic_from_json(const nlohmann::json& j);

}  // namespace crepair
