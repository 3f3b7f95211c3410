#include "crepair/program.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

#include "crepair/error.hpp"
#include "crepair/format.hpp"

namespace crepair {

namespace {

constexpr std::array<std::string_view, 37> kKeywords = {
    "auto",     "break",    "case",     "char",       "const",    "continue",
    "default",  "do",       "double",   "else",       "enum",     "extern",
    "float",    "for",      "goto",     "if",         "inline",   "int",
    "long",     "register", "restrict", "return",     "short",    "signed",
    "sizeof",   "static",   "struct",   "switch",     "typedef",  "union",
    "unsigned", "void",     "volatile", "while",      "_Bool",    "_Complex",
    "_Imaginary"};

constexpr std::array<std::string_view, 14> kTypeKeywords = {
    "char", "double", "float",  "int",    "long",  "short", "signed",
    "unsigned", "void", "_Bool", "_Complex", "struct", "union", "enum"};

// Longest match first.
constexpr std::array<std::string_view, 37> kOperators = {
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "*=",  "/=", "%=", "+=", "-=", "&=", "^=", "|=", "+",  "-",
    "*",   "/",   "%",   "=",  "<",  ">",  "!",  "~",  "&",  "|",  "^",  "?",
    ":"};

constexpr std::string_view kPunctuators = ",.;(){}[]";

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r';
}

[[noreturn]] void lex_error(std::size_t line, std::size_t col, const std::string& reason) {
  throw Error(ErrorCode::LexError,
              "lex error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + reason,
              {{"line", line}, {"col", col}, {"reason", reason}});
}

// Whitespace inside literals is rewritten as an octal escape so that no
// token text ever contains whitespace.
void append_literal_char(std::string& out, char c) {
  switch (c) {
    case ' ': out += "\\040"; break;
    case '\t': out += "\\011"; break;
    case '\v': out += "\\013"; break;
    case '\f': out += "\\014"; break;
    case '\r': out += "\\015"; break;
    default: out += c;
  }
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char c : text) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

// Cuts a trailing // comment that is not inside a literal.
std::string_view strip_line_comment(std::string_view text) {
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      return text.substr(0, i);
    }
  }
  return text;
}

class Lexer {
 public:
  Lexer(std::string_view source, const TokenizeLimits& limits)
      : source_(source), limits_(limits) {}

  std::vector<TokenLine> run() {
    std::vector<std::string_view> physical = split_lines(source_);
    if (physical.size() > limits_.max_lines)
      throw Error(ErrorCode::ProgramTooLarge,
                  "program has " + std::to_string(physical.size()) + " lines, limit is " +
                      std::to_string(limits_.max_lines),
                  {{"lines", physical.size()}, {"limit", limits_.max_lines}});
    std::vector<TokenLine> lines;
    lines.reserve(physical.size());
    for (std::size_t i = 0; i < physical.size(); ++i) {
      lines.push_back(lex_line(physical[i], i + 1));
      if (lines.back().size() > limits_.max_tokens_per_line)
        throw Error(ErrorCode::ProgramTooLarge,
                    "line " + std::to_string(i + 1) + " has too many tokens",
                    {{"line", i + 1},
                     {"tokens", lines.back().size()},
                     {"limit", limits_.max_tokens_per_line}});
    }
    if (in_block_comment_)
      lex_error(comment_line_, comment_col_, "unterminated block comment");
    return lines;
  }

 private:
  static std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      out.push_back(line);
      start = end + 1;
    }
    return out;
  }

  TokenLine lex_line(std::string_view text, std::size_t line_no) {
    TokenLine out;
    std::size_t i = 0;
    const std::size_t n = text.size();

    if (!in_block_comment_) {
      std::size_t first = 0;
      while (first < n && is_space(text[first])) ++first;
      if (first < n && text[first] == '#') {
        std::string chunk = collapse_whitespace(strip_line_comment(text.substr(first)));
        out.push_back({std::move(chunk), TokenKind::PreprocessorChunk});
        return out;
      }
    }

    while (i < n) {
      if (in_block_comment_) {
        std::size_t close = text.find("*/", i);
        if (close == std::string_view::npos) return out;
        in_block_comment_ = false;
        i = close + 2;
        continue;
      }
      char c = text[i];
      if (is_space(c)) {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < n && text[i + 1] == '/') break;
      if (c == '/' && i + 1 < n && text[i + 1] == '*') {
        in_block_comment_ = true;
        comment_line_ = line_no;
        comment_col_ = i + 1;
        i += 2;
        continue;
      }
      if (is_ident_start(c)) {
        std::size_t j = i;
        while (j < n && is_ident_char(text[j])) ++j;
        std::string word(text.substr(i, j - i));
        TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
        out.push_back({std::move(word), kind});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
        i = lex_number(text, i, out);
        continue;
      }
      if (c == '"' || c == '\'') {
        i = lex_literal(text, i, line_no, out);
        continue;
      }
      bool matched = false;
      for (std::string_view op : kOperators) {
        if (text.substr(i, op.size()) == op) {
          out.push_back({std::string(op), TokenKind::Operator});
          i += op.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (kPunctuators.find(c) != std::string_view::npos) {
        out.push_back({std::string(1, c), TokenKind::Punctuator});
        ++i;
        continue;
      }
      lex_error(line_no, i + 1, "illegal character");
    }
    return out;
  }

  // pp-number: digits, identifier characters, dots and signed exponents.
  static std::size_t lex_number(std::string_view text, std::size_t i, TokenLine& out) {
    std::size_t j = i;
    const std::size_t n = text.size();
    while (j < n) {
      char c = text[j];
      if ((c == '+' || c == '-') && j > i) {
        char prev = text[j - 1];
        if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
          ++j;
          continue;
        }
        break;
      }
      if (is_ident_char(c) || c == '.') {
        ++j;
        continue;
      }
      break;
    }
    std::string number(text.substr(i, j - i));
    const bool hex = number.size() > 1 && number[0] == '0' && (number[1] == 'x' || number[1] == 'X');
    bool is_float = number.find('.') != std::string::npos;
    if (hex)
      is_float = is_float || number.find_first_of("pP") != std::string::npos;
    else
      is_float = is_float || number.find_first_of("eE") != std::string::npos;
    out.push_back({std::move(number), is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral});
    return j;
  }

  static std::size_t lex_literal(std::string_view text, std::size_t i, std::size_t line_no,
                                 TokenLine& out) {
    const char quote = text[i];
    std::string literal(1, quote);
    std::size_t j = i + 1;
    const std::size_t n = text.size();
    while (j < n && text[j] != quote) {
      if (text[j] == '\\' && j + 1 < n) {
        if (is_space(text[j + 1])) {
          append_literal_char(literal, text[j + 1]);
        } else {
          literal += text[j];
          literal += text[j + 1];
        }
        j += 2;
        continue;
      }
      append_literal_char(literal, text[j]);
      ++j;
    }
    if (j >= n)
      lex_error(line_no, i + 1,
                quote == '"' ? "unterminated string literal" : "unterminated character literal");
    literal += quote;
    out.push_back({std::move(literal),
                   quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral});
    return j + 1;
  }

  std::string_view source_;
  TokenizeLimits limits_;
  bool in_block_comment_ = false;
  std::size_t comment_line_ = 0;
  std::size_t comment_col_ = 0;
};

// Second pass: collect struct/union/enum tags and typedef names, then mark
// every identifier spelling one of them as a TypeName.
void classify_type_names(std::vector<TokenLine>& lines) {
  std::vector<Token*> flat;
  for (auto& line : lines)
    for (auto& tok : line)
      if (tok.kind != TokenKind::PreprocessorChunk) flat.push_back(&tok);

  std::unordered_set<std::string> type_names;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const Token& tok = *flat[i];
    if (tok.kind != TokenKind::Keyword) continue;
    if (tok.text == "struct" || tok.text == "union" || tok.text == "enum") {
      if (i + 1 < flat.size() && flat[i + 1]->kind == TokenKind::Identifier)
        type_names.insert(flat[i + 1]->text);
    } else if (tok.text == "typedef") {
      int depth = 0;
      for (std::size_t j = i + 1; j < flat.size(); ++j) {
        const Token& t = *flat[j];
        if (t.kind == TokenKind::Punctuator) {
          if (t.text == "{" || t.text == "(" || t.text == "[") ++depth;
          else if (t.text == "}" || t.text == ")" || t.text == "]") depth = std::max(0, depth - 1);
          else if (t.text == ";" && depth == 0) break;
          continue;
        }
        if (depth != 0 || t.kind != TokenKind::Identifier) continue;
        const Token& prev = *flat[j - 1];
        const bool is_tag = prev.kind == TokenKind::Keyword &&
                            (prev.text == "struct" || prev.text == "union" || prev.text == "enum");
        if (!is_tag) type_names.insert(t.text);
      }
    }
  }
  if (type_names.empty()) return;
  for (Token* tok : flat)
    if (tok->kind == TokenKind::Identifier && type_names.count(tok->text))
      tok->kind = TokenKind::TypeName;
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::TypeName: return "TypeName";
    case TokenKind::Operator: return "Operator";
    case TokenKind::Punctuator: return "Punctuator";
    case TokenKind::IntLiteral: return "IntLiteral";
    case TokenKind::FloatLiteral: return "FloatLiteral";
    case TokenKind::StringLiteral: return "StringLiteral";
    case TokenKind::CharLiteral: return "CharLiteral";
    case TokenKind::PreprocessorChunk: return "PreprocessorChunk";
  }
  return "Identifier";
}

TokenKind token_kind_from_string(std::string_view name) {
  static constexpr std::array<TokenKind, 10> kAll = {
      TokenKind::Keyword,       TokenKind::Identifier,   TokenKind::TypeName,
      TokenKind::Operator,      TokenKind::Punctuator,   TokenKind::IntLiteral,
      TokenKind::FloatLiteral,  TokenKind::StringLiteral, TokenKind::CharLiteral,
      TokenKind::PreprocessorChunk};
  for (TokenKind k : kAll)
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::InvalidInput, "unknown token kind '" + std::string(name) + "'");
}

bool is_keyword(std::string_view text) {
  return std::find(kKeywords.begin(), kKeywords.end(), text) != kKeywords.end();
}

bool is_type_keyword(std::string_view text) {
  return std::find(kTypeKeywords.begin(), kTypeKeywords.end(), text) != kTypeKeywords.end();
}

bool is_punctuator(std::string_view text) {
  return text.size() == 1 && kPunctuators.find(text[0]) != std::string_view::npos;
}

const std::vector<std::string>& punctuator_alphabet() {
  static const std::vector<std::string> alphabet = [] {
    std::vector<std::string> out;
    for (char c : kPunctuators) out.emplace_back(1, c);
    return out;
  }();
  return alphabet;
}

TokenizedProgram tokenize(std::string_view source, std::string source_id,
                          const TokenizeLimits& limits) {
  Lexer lexer(source, limits);
  TokenizedProgram program;
  program.lines = lexer.run();
  program.source_id = std::move(source_id);
  classify_type_names(program.lines);
  return program;
}

std::string detokenize_line(const TokenLine& line) {
  std::string out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (i) out += ' ';
    out += line[i].text;
  }
  return out;
}

std::string detokenize(const TokenizedProgram& program) {
  std::string out;
  for (const auto& line : program.lines) {
    out += detokenize_line(line);
    out += '\n';
  }
  return out;
}

std::vector<std::string> token_texts(const TokenLine& line) {
  std::vector<std::string> out;
  out.reserve(line.size());
  for (const auto& t : line) out.push_back(t.text);
  return out;
}

nlohmann::ordered_json to_json(const Token& token) {
  return {{"text", token.text}, {"kind", std::string(to_string(token.kind))}};
}

nlohmann::ordered_json to_json(const TokenLine& line) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& t : line) out.push_back(to_json(t));
  return out;
}

nlohmann::ordered_json to_json(const TokenizedProgram& program) {
  nlohmann::ordered_json out;
  out["format_version"] = kFormatVersion;
  out["source_id"] = program.source_id;
  nlohmann::ordered_json lines = nlohmann::ordered_json::array();
  for (const auto& line : program.lines) lines.push_back(to_json(line));
  out["lines"] = std::move(lines);
  return out;
}

Token token_from_json(const nlohmann::json& j) {
  Token t{j.at("text").get<std::string>(), token_kind_from_string(j.at("kind").get<std::string>())};
  if (t.text.empty()) throw Error(ErrorCode::InvalidInput, "empty token text");
  return t;
}

TokenLine token_line_from_json(const nlohmann::json& j) {
  TokenLine line;
  for (const auto& t : j) line.push_back(token_from_json(t));
  return line;
}

TokenizedProgram program_from_json(const nlohmann::json& j) {
  require_format_version(j, "tokenized program");
  TokenizedProgram program;
  program.source_id = j.value("source_id", std::string{});
  for (const auto& line : j.at("lines")) program.lines.push_back(token_line_from_json(line));
  return program;
}

void require_format_version(const nlohmann::json& j, std::string_view what) {
  if (!j.is_object() || !j.contains("format_version"))
    throw Error(ErrorCode::UnsupportedVersion,
                std::string(what) + ": missing format_version");
  const auto& v = j.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion,
                std::string(what) + ": unsupported format_version " + v.dump(),
                {{"found", v}, {"supported", kFormatVersion}});
}

}  // namespace crepair
