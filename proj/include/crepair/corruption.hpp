#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/program.hpp"
#include "crepair/rng.hpp"

namespace crepair {

class Compiler;

enum class ErrorCategory { Struct, Stmt, Decl, TypeMismatch, IdentifierMisuse };
enum class MutationOp { ADD, DEL, REP };

inline constexpr std::array<ErrorCategory, 5> kAllCategories = {
    ErrorCategory::Struct, ErrorCategory::Stmt, ErrorCategory::Decl,
    ErrorCategory::TypeMismatch, ErrorCategory::IdentifierMisuse};
inline constexpr std::array<MutationOp, 3> kAllOps = {MutationOp::ADD, MutationOp::DEL,
                                                      MutationOp::REP};

std::string_view to_string(ErrorCategory category);
std::string_view to_string(MutationOp op);
ErrorCategory category_from_string(std::string_view name);
MutationOp op_from_string(std::string_view name);

// Operand/operation matrix:
//   Struct {ADD, DEL, REP}   Stmt {ADD, DEL, REP}   Decl {ADD}
//   TypeMismatch {ADD, DEL}  IdentifierMisuse {ADD, REP}
std::span<const MutationOp> allowed_ops(ErrorCategory category);
bool is_allowed(ErrorCategory category, MutationOp op);

struct CorruptionRecord {
  LineIndex line = 0;
  ErrorCategory category = ErrorCategory::Struct;
  MutationOp op = MutationOp::ADD;
  TokenKind operand_kind = TokenKind::Punctuator;
  TokenLine original_line;
  TokenLine mutated_line;

  friend bool operator==(const CorruptionRecord&, const CorruptionRecord&) = default;
};

struct BrokenProgram {
  TokenizedProgram program;
  std::vector<CorruptionRecord> corruptions;
  std::uint64_t seed = 0;
  std::string parent_id;
  std::size_t variant_id = 0;
};

struct Corruption {
  TokenizedProgram program;
  CorruptionRecord record;
};

// Applies one token-level edit of the given category/op. Lines in `excluded`
// are never touched. Throws DisallowedOp or NoEligibleSite.
Corruption corrupt_once(const TokenizedProgram& program, ErrorCategory category, MutationOp op,
                        Rng& rng, const std::set<LineIndex>& excluded = {});

// True when corrupt_once would find at least one site.
bool has_eligible_site(const TokenizedProgram& program, ErrorCategory category, MutationOp op,
                       const std::set<LineIndex>& excluded = {});

// Restores every corrupted line to its original tokens.
TokenizedProgram restore_original(const BrokenProgram& broken);

struct CategoryMix {
  std::array<double, 5> weights{};  // indexed like kAllCategories

  // Proportional to the average error frequencies: struct 21.28, stmt 51.52,
  // decl 21.43, tm 2.17, im 3.60, renormalised.
  static CategoryMix defaults();
  std::array<double, 5> normalized() const;
};

struct SynthesisConfig {
  std::size_t variants_per_program = 50;
  std::size_t max_errors = 5;
  CategoryMix category_mix = CategoryMix::defaults();
  std::size_t retry_budget = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SynthesisReport {
  std::size_t parents = 0;
  std::size_t variants_requested = 0;
  std::size_t variants_emitted = 0;
  std::size_t candidates_generated = 0;
  std::size_t candidates_still_compiling = 0;
  std::size_t candidates_duplicate = 0;
  std::size_t variants_exhausted = 0;
  std::array<std::size_t, 5> category_counts{};
  std::array<std::size_t, 5> error_count_histogram{};  // index = errors - 1

  // Fraction of generated candidates that failed compilation and were kept.
  double retention_rate() const;
  nlohmann::ordered_json to_json() const;
};

using BrokenProgramSink = std::function<void(BrokenProgram&&)>;

// Streams broken variants of every parent in corpus order. Each variant draws
// from its own stream derived from (seed, source_id, variant index), so the
// output does not depend on `threads`. Throws SourceDoesNotCompile and
// ExhaustedRetries (a parent that yields no variant at all).
SynthesisReport synthesize_corpus(const std::vector<TokenizedProgram>& corpus,
                                  const SynthesisConfig& config, const Compiler& compiler,
                                  const BrokenProgramSink& sink);

std::vector<BrokenProgram> synthesize_corpus(const std::vector<TokenizedProgram>& corpus,
                                             const SynthesisConfig& config,
                                             const Compiler& compiler,
                                             SynthesisReport* report = nullptr);

nlohmann::ordered_json to_json(const CorruptionRecord& record);
CorruptionRecord corruption_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const BrokenProgram& broken);
BrokenProgram broken_program_from_json(const nlohmann::json& j);

}  // namespace crepair
