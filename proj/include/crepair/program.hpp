#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace crepair {

enum class TokenKind {
  Keyword,
  Identifier,
  TypeName,
  Operator,
  Punctuator,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  CharLiteral,
  PreprocessorChunk,
};

std::string_view to_string(TokenKind kind);
TokenKind token_kind_from_string(std::string_view name);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Identifier;

  friend bool operator==(const Token&, const Token&) = default;
};

using TokenLine = std::vector<Token>;

// 1-based line index, matching compiler diagnostics.
using LineIndex = std::size_t;

struct TokenizedProgram {
  std::vector<TokenLine> lines;
  std::string source_id;

  std::size_t line_count() const noexcept { return lines.size(); }
  // Lines are addressed 1-based everywhere outside this struct.
  const TokenLine& line(LineIndex index) const { return lines.at(index - 1); }
  TokenLine& line(LineIndex index) { return lines.at(index - 1); }

  friend bool operator==(const TokenizedProgram&, const TokenizedProgram&) = default;
};

struct TokenizeLimits {
  std::size_t max_lines = 400;
  std::size_t max_tokens_per_line = 120;
};

bool is_keyword(std::string_view text);
// Keywords that can start or continue a type specifier (int, unsigned, struct, ...).
bool is_type_keyword(std::string_view text);
bool is_punctuator(std::string_view text);

// The punctuator alphabet: , . ; ( ) { } [ ]
const std::vector<std::string>& punctuator_alphabet();

// Throws Error{LexError} with {line, col, reason} details, or
// Error{ProgramTooLarge} when the limits are exceeded.
TokenizedProgram tokenize(std::string_view source, std::string source_id = {},
                          const TokenizeLimits& limits = {});

std::string detokenize_line(const TokenLine& line);
std::string detokenize(const TokenizedProgram& program);

std::vector<std::string> token_texts(const TokenLine& line);

nlohmann::ordered_json to_json(const Token& token);
nlohmann::ordered_json to_json(const TokenLine& line);
nlohmann::ordered_json to_json(const TokenizedProgram& program);
Token token_from_json(const nlohmann::json& j);
TokenLine token_line_from_json(const nlohmann::json& j);
TokenizedProgram program_from_json(const nlohmann::json& j);

}  // namespace crepair
