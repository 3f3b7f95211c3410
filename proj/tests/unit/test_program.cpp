#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "doctest.h"

#include "crepair/error.hpp"
#include "crepair/program.hpp"
#include "support.hpp"

using namespace crepair;

namespace {

TokenLine only_line(std::string_view source) {
  auto p = tokenize(source);
  REQUIRE(p.line_count() == 1);
  return p.lines[0];
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("declaration tokens") {
  TokenLine expected{{"int", TokenKind::Keyword}, {"a", TokenKind::Identifier}, {";", TokenKind::Punctuator}};
  CHECK(only_line("int a;") == expected);
}

TEST_CASE("comment is dropped and operators are kinded") {
  TokenLine expected{{"a", TokenKind::Identifier}, {"=", TokenKind::Operator},
                     {"b", TokenKind::Identifier}, {"+", TokenKind::Operator},
                     {"1", TokenKind::IntLiteral}, {";", TokenKind::Punctuator}};
  CHECK(only_line("a = b + 1; // x") == expected);
}

TEST_CASE("unterminated string reports line and column") {
  try {
    tokenize("\"abc");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LexError);
    CHECK(e.details()["line"] == 1);
    CHECK(e.details()["col"] == 1);
  }
}

TEST_CASE("illegal character and unterminated block comment") {
  CHECK(code_of([] { tokenize("int a = 1 @ 2;"); }) == ErrorCode::LexError);
  CHECK(code_of([] { tokenize("int a; /* open"); }) == ErrorCode::LexError);
}

TEST_CASE("limits") {
  std::string many(401, '\n');
  CHECK(code_of([&] { tokenize(many); }) == ErrorCode::ProgramTooLarge);
  std::string wide;
  for (int i = 0; i < 121; ++i) wide += "a ";
  CHECK(code_of([&] { tokenize(wide); }) == ErrorCode::ProgramTooLarge);
  CHECK_NOTHROW(tokenize(std::string(400, '\n')));
}

TEST_CASE("literal kinds") {
  auto line = only_line("x = 1.5e3 + 0x1F + 'c' + 2.f;");
  CHECK(line[2].kind == TokenKind::FloatLiteral);
  CHECK(line[4].kind == TokenKind::IntLiteral);
  CHECK(line[6].kind == TokenKind::CharLiteral);
  CHECK(line[8].kind == TokenKind::FloatLiteral);
}

TEST_CASE("whitespace inside literals is escaped, never stored") {
  auto line = only_line("printf(\"a b\\tc\", ' ');");
  for (const Token& t : line)
    for (char c : t.text) CHECK_FALSE(std::isspace(static_cast<unsigned char>(c)));
  auto again = tokenize(detokenize_line(line));
  CHECK(again.lines[0] == line);
}

TEST_CASE("preprocessor line is a single chunk") {
  auto p = tokenize("#include   <stdio.h>  // io\nint x;\n");
  REQUIRE(p.line_count() == 2);
  REQUIRE(p.lines[0].size() == 1);
  CHECK(p.lines[0][0].kind == TokenKind::PreprocessorChunk);
  CHECK(p.lines[0][0].text == "#include <stdio.h>");
}

TEST_CASE("typedef and struct names become TypeName") {
  auto p = tokenize("typedef int myint;\nstruct node { int v; };\nmyint x;\nstruct node n;\n");
  CHECK(p.line(1)[2] == Token{"myint", TokenKind::TypeName});
  CHECK(p.line(2)[1] == Token{"node", TokenKind::TypeName});
  CHECK(p.line(3)[0] == Token{"myint", TokenKind::TypeName});
  CHECK(p.line(3)[1].kind == TokenKind::Identifier);
}

TEST_CASE("block comments keep line structure") {
  auto p = tokenize("int a; /* one\ntwo */ int b;\nint c;\n");
  REQUIRE(p.line_count() == 3);
  CHECK(p.line(1).size() == 3);
  CHECK(p.line(2).size() == 3);
  CHECK(p.line(3).size() == 3);
}

TEST_CASE("detokenize basics") {
  CHECK(detokenize(TokenizedProgram{}) == "");
  auto p = tokenize("int a;\n\nint b;\n");
  const std::string text = detokenize(p);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("round trip is a fixed point on the corpus") {
  for (const auto& p : testsupport::corpus()) {
    auto again = tokenize(detokenize(p), p.source_id);
    CHECK(again == p);
  }
}

TEST_CASE("JSON round trip") {
  const auto& p = testsupport::corpus().front();
  auto j = nlohmann::json::parse(to_json(p).dump());
  CHECK(j["format_version"] == 1);
  CHECK(program_from_json(j) == p);
  j["format_version"] = 99;
  CHECK(code_of([&] { program_from_json(j); }) == ErrorCode::UnsupportedVersion);
}

// Independent reference: clang's raw lexer. Texts and coarse classes must
// agree on every non-preprocessor line of the first 50 corpus files.
TEST_CASE("agrees with the clang raw lexer") {
  int status = 0;
  testsupport::run_capture("clang --version >/dev/null 2>&1", &status);
  if (status != 0) {
    MESSAGE("clang not available; skipping reference lexer cross-check");
    return;
  }
  const auto dir = testsupport::data_dir() / "corpus";
  std::size_t checked = 0;
  for (std::size_t f = 0; f < 50 && f < testsupport::corpus().size(); ++f) {
    const auto& program = testsupport::corpus()[f];
    const auto path = dir / (program.source_id + ".c");
    const std::string dump = testsupport::run_capture(
        "clang -fsyntax-only -Xclang -dump-raw-tokens '" + path.string() + "' 2>&1");
    std::map<std::size_t, std::vector<std::pair<std::string, std::string>>> reference;
    std::istringstream in(dump);
    std::string row;
    while (std::getline(in, row)) {
      const auto space = row.find(" '");
      if (space == std::string::npos || !std::islower(static_cast<unsigned char>(row[0]))) continue;
      const std::string kind = row.substr(0, space);
      if (kind == "unknown" || kind == "comment") continue;
      const auto end = row.rfind("'\t");
      const auto loc = row.find("Loc=<");
      if (end == std::string::npos || loc == std::string::npos) continue;
      const std::string text = row.substr(space + 2, end - space - 2);
      const auto colon = row.find(':', loc);
      const std::size_t line = std::stoul(row.substr(colon + 1));
      reference[line].emplace_back(kind, text);
    }
    for (LineIndex li = 1; li <= program.line_count(); ++li) {
      const auto& line = program.line(li);
      if (!line.empty() && line[0].kind == TokenKind::PreprocessorChunk) continue;
      const auto& ref = reference[li];
      REQUIRE_MESSAGE(ref.size() == line.size(), program.source_id, ":", li);
      for (std::size_t k = 0; k < line.size(); ++k) {
        const auto& [kind, text] = ref[k];
        const Token& t = line[k];
        if (t.kind != TokenKind::StringLiteral && t.kind != TokenKind::CharLiteral) CHECK(t.text == text);
        if (kind == "raw_identifier")
          CHECK((t.kind == TokenKind::Keyword || t.kind == TokenKind::Identifier ||
                 t.kind == TokenKind::TypeName));
        else if (kind == "numeric_constant")
          CHECK((t.kind == TokenKind::IntLiteral || t.kind == TokenKind::FloatLiteral));
        else if (kind == "string_literal")
          CHECK(t.kind == TokenKind::StringLiteral);
        else if (kind == "char_constant")
          CHECK(t.kind == TokenKind::CharLiteral);
        else
          CHECK((t.kind == TokenKind::Operator || t.kind == TokenKind::Punctuator));
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}
