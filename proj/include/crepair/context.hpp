#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/program.hpp"

namespace crepair {

struct SymbolTables {
  std::set<std::string> var_set;
  std::set<std::string> func_set;
  std::set<std::string> type_set;

  bool contains(const std::string& name) const {
    return var_set.count(name) || func_set.count(name) || type_set.count(name);
  }
};

enum class Occurrence { Declare, Use };

struct LineContext {
  LineIndex line = 0;
  std::vector<std::string> vars_declare;
  std::vector<std::string> vars_use;
  // Ascending, deduplicated, never contains `line`.
  std::vector<LineIndex> context_lines;
  // Tokens of the context lines in program order, cut to the token budget.
  TokenLine context_tokens;
};

SymbolTables analyzer(const TokenizedProgram& program);

// Declare when the token sits in a declarator position on this line: a type
// keyword or type name precedes it (pointer stars and qualifiers skipped), it
// follows a comma in a top-level declarator list, or it is a struct tag /
// typedef name being introduced. Use otherwise.
Occurrence classify_occurrence(const TokenLine& line, std::string_view token);

// A line whose first non-storage-class token is a type specifier.
bool is_declaration_statement(const TokenLine& line);

// Positions (0-based token indices) on the line that are declarator positions.
std::vector<std::size_t> declaring_positions(const TokenLine& line);

// First-appearance-ordered split of the line's bound identifiers.
void split_line_symbols(const TokenLine& line, const SymbolTables& tables,
                        std::vector<std::string>& vars_declare,
                        std::vector<std::string>& vars_use);

std::vector<LineContext> get_context(
    const TokenizedProgram& program, const SymbolTables& tables,
    std::size_t token_budget = std::numeric_limits<std::size_t>::max());

// Concatenates the tokens of `lines` (program order) after dropping the lines
// farthest from `anchor` until the total fits in `token_budget`.
TokenLine materialize_context(const TokenizedProgram& program, LineIndex anchor,
                              const std::vector<LineIndex>& lines,
                              std::size_t token_budget);

nlohmann::ordered_json to_json(const LineContext& context);
nlohmann::ordered_json to_json(const SymbolTables& tables);

}  // namespace crepair
