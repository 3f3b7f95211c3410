#include "doctest.h"

#include "crepair/context.hpp"
#include "crepair/corruption.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/error.hpp"
#include "support.hpp"

using namespace crepair;

TEST_CASE("allowed matrix") {
  CHECK(is_allowed(ErrorCategory::Struct, MutationOp::ADD));
  CHECK(is_allowed(ErrorCategory::Struct, MutationOp::DEL));
  CHECK(is_allowed(ErrorCategory::Struct, MutationOp::REP));
  CHECK(is_allowed(ErrorCategory::Stmt, MutationOp::REP));
  CHECK(is_allowed(ErrorCategory::Decl, MutationOp::ADD));
  CHECK_FALSE(is_allowed(ErrorCategory::Decl, MutationOp::DEL));
  CHECK_FALSE(is_allowed(ErrorCategory::Decl, MutationOp::REP));
  CHECK_FALSE(is_allowed(ErrorCategory::TypeMismatch, MutationOp::REP));
  CHECK_FALSE(is_allowed(ErrorCategory::IdentifierMisuse, MutationOp::DEL));
}

TEST_CASE("Decl DEL is rejected") {
  Rng rng(1);
  try {
    corrupt_once(testsupport::corpus()[0], ErrorCategory::Decl, MutationOp::DEL, rng);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisallowedOp);
  }
}

TEST_CASE("every allowed pair yields a single-line record on the corpus") {
  for (std::size_t i = 0; i < 24; ++i) {
    const auto& p = testsupport::corpus()[i];
    for (ErrorCategory c : kAllCategories)
      for (MutationOp op : allowed_ops(c)) {
        if (!has_eligible_site(p, c, op)) continue;
        Rng rng(derive_seed(5, p.source_id, i));
        auto out = corrupt_once(p, c, op, rng);
        const auto& r = out.record;
        CHECK(r.category == c);
        CHECK(r.op == op);
        CHECK(r.original_line == p.line(r.line));
        CHECK(r.mutated_line == out.program.line(r.line));
        CHECK(r.mutated_line != r.original_line);
        const long delta = static_cast<long>(r.mutated_line.size()) - static_cast<long>(r.original_line.size());
        CHECK(delta == (op == MutationOp::ADD ? 1 : op == MutationOp::DEL ? -1 : 0));
        for (LineIndex l = 1; l <= p.line_count(); ++l)
          if (l != r.line) CHECK(out.program.line(l) == p.line(l));
      }
  }
}

TEST_CASE("corruption is deterministic and respects exclusions") {
  const auto& p = testsupport::corpus()[3];
  Rng a(42), b(42);
  auto x = corrupt_once(p, ErrorCategory::Stmt, MutationOp::DEL, a);
  auto y = corrupt_once(p, ErrorCategory::Stmt, MutationOp::DEL, b);
  CHECK(x.record == y.record);
  CHECK(x.program == y.program);

  std::set<LineIndex> all;
  for (LineIndex l = 1; l <= p.line_count(); ++l) all.insert(l);
  CHECK_FALSE(has_eligible_site(p, ErrorCategory::Stmt, MutationOp::DEL, all));
  try {
    corrupt_once(p, ErrorCategory::Stmt, MutationOp::DEL, a, all);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEligibleSite);
  }
}

TEST_CASE("deleting a literal in an increment breaks compilation") {
  auto p = testsupport::program_of({"int main ( void ) {", "int a = 0 ;", "a = a + 1 ;", "return a ;", "}"});
  Compiler cc;
  REQUIRE(cc.compile(detokenize(p)).success);
  Corruption broken{p, {}};
  broken.program.line(3).erase(broken.program.line(3).begin() + 4);
  CHECK(detokenize_line(broken.program.line(3)) == "a = a + ;");
  CHECK_FALSE(cc.compile(detokenize(broken.program)).success);
}

TEST_CASE("synthesis filters compiling variants and restores parents") {
  Compiler cc;
  SynthesisConfig config;
  config.variants_per_program = 4;
  config.seed = 9;
  std::vector<TokenizedProgram> parents(testsupport::corpus().begin(), testsupport::corpus().begin() + 6);
  SynthesisReport report;
  auto out = synthesize_corpus(parents, config, cc, &report);
  CHECK(report.variants_emitted == out.size());
  CHECK(out.size() <= 24);
  std::map<std::string, TokenizedProgram> by_id;
  for (const auto& p : parents) by_id[p.source_id] = p;
  for (const auto& b : out) {
    CHECK_FALSE(cc.compile(detokenize(b.program)).success);
    CHECK(b.corruptions.size() >= 1);
    CHECK(b.corruptions.size() <= 5);
    std::set<LineIndex> lines;
    for (const auto& c : b.corruptions) lines.insert(c.line);
    CHECK(lines.size() == b.corruptions.size());
    auto restored = restore_original(b);
    CHECK(restored == by_id[b.parent_id]);
    auto back = broken_program_from_json(nlohmann::json::parse(to_json(b).dump()));
    CHECK(back.program == b.program);
    CHECK(back.corruptions == b.corruptions);
  }
}

TEST_CASE("zero variants gives an empty stream") {
  Compiler cc;
  SynthesisConfig config;
  config.variants_per_program = 0;
  std::vector<TokenizedProgram> parents{testsupport::corpus()[0]};
  CHECK(synthesize_corpus(parents, config, cc).empty());
}

TEST_CASE("parent that does not compile is rejected") {
  Compiler cc;
  std::vector<TokenizedProgram> parents{testsupport::program_of({"int main ( void ) {", "return x ;", "}"})};
  try {
    synthesize_corpus(parents, SynthesisConfig{}, cc);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SourceDoesNotCompile);
  }
}

TEST_CASE("thread count does not change the output") {
  Compiler cc;
  SynthesisConfig config;
  config.variants_per_program = 3;
  std::vector<TokenizedProgram> parents(testsupport::corpus().begin(), testsupport::corpus().begin() + 8);
  auto serial = synthesize_corpus(parents, config, cc);
  config.threads = 3;
  auto parallel = synthesize_corpus(parents, config, cc);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(to_json(serial[i]).dump() == to_json(parallel[i]).dump());
}
