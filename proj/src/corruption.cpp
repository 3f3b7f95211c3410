#include "crepair/corruption.hpp"

#include <algorithm>
#include <condition_variable>
#include <optional>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "crepair/context.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/error.hpp"
#include "crepair/format.hpp"

namespace crepair {

namespace {

constexpr MutationOp kStructOps[] = {MutationOp::ADD, MutationOp::DEL, MutationOp::REP};
constexpr MutationOp kStmtOps[] = {MutationOp::ADD, MutationOp::DEL, MutationOp::REP};
constexpr MutationOp kDeclOps[] = {MutationOp::ADD};
constexpr MutationOp kTypeMismatchOps[] = {MutationOp::ADD, MutationOp::DEL};
constexpr MutationOp kIdentifierMisuseOps[] = {MutationOp::ADD, MutationOp::REP};

std::size_t category_index(ErrorCategory c) { return static_cast<std::size_t>(c); }

bool is_pp_line(const TokenLine& line) {
  return !line.empty() && line.front().kind == TokenKind::PreprocessorChunk;
}

bool is_type_token(const Token& t) {
  if (t.kind == TokenKind::TypeName) return true;
  return t.kind == TokenKind::Keyword && is_type_keyword(t.text) && t.text != "struct" &&
         t.text != "union" && t.text != "enum";
}

bool is_assignment(const Token& t) {
  static const std::unordered_set<std::string> ops = {"=",  "+=", "-=", "*=",  "/=", "%=",
                                                      "&=", "|=", "^=", "<<=", ">>="};
  return t.kind == TokenKind::Operator && ops.count(t.text);
}

using Pool = std::vector<Token>;

// Distinct tokens of the program, sorted by (kind, text) for determinism.
struct Pools {
  Pool punct_alphabet;
  Pool punct_in_program;
  std::map<TokenKind, Pool> by_kind;
  Pool stmt_operands;
  Pool types;
  Pool vars;
  Pool operators;
  Pool misuse_inserts;

  Pools(const TokenizedProgram& program, const SymbolTables& symbols) {
    for (const auto& p : punctuator_alphabet()) punct_alphabet.push_back({p, TokenKind::Punctuator});
    std::set<std::pair<int, std::string>> seen;
    for (const auto& line : program.lines) {
      if (is_pp_line(line)) continue;
      for (const Token& t : line) seen.emplace(static_cast<int>(t.kind), t.text);
    }
    for (const auto& [kind_int, text] : seen) {
      Token t{text, static_cast<TokenKind>(kind_int)};
      by_kind[t.kind].push_back(t);
      if (t.kind == TokenKind::Punctuator) punct_in_program.push_back(t);
      if (t.kind == TokenKind::Keyword || t.kind == TokenKind::Operator ||
          t.kind == TokenKind::TypeName || t.kind == TokenKind::Identifier)
        stmt_operands.push_back(t);
      if (is_type_token(t)) types.push_back(t);
      if (t.kind == TokenKind::Identifier && symbols.var_set.count(t.text)) vars.push_back(t);
      if (t.kind == TokenKind::Operator) operators.push_back(t);
    }
    misuse_inserts = operators;
    misuse_inserts.insert(misuse_inserts.end(), vars.begin(), vars.end());
  }

  const Pool& of_kind(TokenKind kind) const {
    static const Pool empty;
    auto it = by_kind.find(kind);
    return it == by_kind.end() ? empty : it->second;
  }
};

enum class EditType { Insert, Delete, Replace };

struct Edit {
  LineIndex line;
  std::size_t pos;
  EditType type;
  const Pool* choices;
  int group;
};

bool has_replacement(const Pool& pool, const Token& current) {
  return std::any_of(pool.begin(), pool.end(),
                     [&](const Token& t) { return t.text != current.text; });
}

bool is_stmt_operand(const Token& t) {
  return t.kind == TokenKind::Keyword || t.kind == TokenKind::Operator ||
         t.kind == TokenKind::TypeName || t.kind == TokenKind::Identifier;
}

// Closing paren matching the '(' at `open`, on the same line.
std::optional<std::size_t> matching_paren(const TokenLine& line, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < line.size(); ++i) {
    if (line[i].kind != TokenKind::Punctuator) continue;
    if (line[i].text == "(") ++depth;
    else if (line[i].text == ")" && --depth == 0) return i;
  }
  return std::nullopt;
}

std::vector<Edit> enumerate_edits(const TokenizedProgram& program, const SymbolTables& symbols,
                                  const Pools& pools, ErrorCategory category, MutationOp op,
                                  const std::set<LineIndex>& excluded) {
  std::vector<Edit> edits;
  for (LineIndex li = 1; li <= program.line_count(); ++li) {
    if (excluded.count(li)) continue;
    const TokenLine& line = program.line(li);
    if (line.empty() || is_pp_line(line)) continue;

    switch (category) {
      case ErrorCategory::Struct:
        for (std::size_t p = 0; p < line.size(); ++p) {
          if (line[p].kind != TokenKind::Punctuator) continue;
          if (op == MutationOp::ADD) {
            edits.push_back({li, p, EditType::Insert, &pools.punct_alphabet, 0});
            edits.push_back({li, p + 1, EditType::Insert, &pools.punct_alphabet, 0});
          } else if (op == MutationOp::DEL) {
            edits.push_back({li, p, EditType::Delete, nullptr, 0});
          } else if (has_replacement(pools.punct_in_program, line[p])) {
            edits.push_back({li, p, EditType::Replace, &pools.punct_in_program, 0});
          }
        }
        break;

      case ErrorCategory::Stmt:
        for (std::size_t p = 0; p < line.size(); ++p) {
          if (!is_stmt_operand(line[p])) continue;
          if (op == MutationOp::ADD) {
            edits.push_back({li, p, EditType::Insert, &pools.stmt_operands, 0});
            edits.push_back({li, p + 1, EditType::Insert, &pools.stmt_operands, 0});
          } else if (op == MutationOp::DEL) {
            edits.push_back({li, p, EditType::Delete, nullptr, 0});
          } else {
            const Pool& same = pools.of_kind(line[p].kind);
            if (has_replacement(same, line[p]))
              edits.push_back({li, p, EditType::Replace, &same, 0});
          }
        }
        break;

      case ErrorCategory::Decl: {
        if (op != MutationOp::ADD) break;
        const bool declaration = is_declaration_statement(line);
        if (declaration && !pools.types.empty()) {
          // Duplicate/conflicting type specifier: "int a ;" -> "float int a ;".
          for (std::size_t p = 0; p < line.size(); ++p)
            if (is_type_token(line[p])) {
              edits.push_back({li, p, EditType::Insert, &pools.types, 0});
              break;
            }
        }
        if (!declaration && line.size() >= 2 && line[0].kind == TokenKind::Identifier &&
            symbols.var_set.count(line[0].text) && is_assignment(line[1]) && !pools.types.empty()) {
          // Re-declaration at a use: "a = b ;" -> "int a = b ;".
          edits.push_back({li, 0, EditType::Insert, &pools.types, 1});
        }
        if (declaration && !pools.vars.empty()) {
          // Stray name after a declarator: "int a ;" -> "int a b ;".
          for (std::size_t p : declaring_positions(line)) {
            if (line[p].kind != TokenKind::Identifier || !symbols.var_set.count(line[p].text))
              continue;
            edits.push_back({li, p + 1, EditType::Insert, &pools.vars, 2});
          }
        }
        break;
      }

      case ErrorCategory::TypeMismatch: {
        if (op == MutationOp::REP) break;
        const auto declaring = declaring_positions(line);
        for (std::size_t p = 0; p + 1 < line.size(); ++p) {
          if (line[p].kind != TokenKind::Identifier || !symbols.func_set.count(line[p].text) ||
              line[p + 1].text != "(")
            continue;
          if (std::find(declaring.begin(), declaring.end(), p) != declaring.end()) continue;
          auto close = matching_paren(line, p + 1);
          if (!close) continue;
          const std::size_t first = p + 2;
          const std::size_t last = *close;  // exclusive
          if (op == MutationOp::ADD) {
            if (first == last) {
              if (!pools.vars.empty()) edits.push_back({li, first, EditType::Insert, &pools.vars, 0});
              continue;
            }
            // Argument boundaries at paren depth 1 relative to the call.
            std::vector<std::size_t> starts{first};
            std::vector<std::size_t> ends;
            int depth = 0;
            for (std::size_t q = first; q < last; ++q) {
              const Token& t = line[q];
              if (t.kind == TokenKind::Punctuator) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                else if (t.text == "," && depth == 0) {
                  ends.push_back(q);
                  starts.push_back(q + 1);
                }
              }
            }
            ends.push_back(last);
            if (!pools.types.empty())
              for (std::size_t s : starts) edits.push_back({li, s, EditType::Insert, &pools.types, 1});
            if (!pools.vars.empty())
              for (std::size_t e : ends) edits.push_back({li, e, EditType::Insert, &pools.vars, 2});
          } else {
            for (std::size_t q = first; q < last; ++q)
              if (line[q].kind == TokenKind::Identifier || is_type_token(line[q]))
                edits.push_back({li, q, EditType::Delete, nullptr, 0});
          }
        }
        break;
      }

      case ErrorCategory::IdentifierMisuse: {
        if (!is_declaration_statement(line)) break;
        for (std::size_t p = 0; p < line.size(); ++p) {
          const Token& t = line[p];
          if (op == MutationOp::ADD) {
            if (t.kind != TokenKind::Identifier || pools.misuse_inserts.empty()) continue;
            edits.push_back({li, p, EditType::Insert, &pools.misuse_inserts, 0});
            edits.push_back({li, p + 1, EditType::Insert, &pools.misuse_inserts, 0});
          } else if (op == MutationOp::REP) {
            if (t.kind == TokenKind::Operator && has_replacement(pools.operators, t))
              edits.push_back({li, p, EditType::Replace, &pools.operators, 0});
            else if (t.kind == TokenKind::Identifier && symbols.var_set.count(t.text) &&
                     has_replacement(pools.vars, t))
              edits.push_back({li, p, EditType::Replace, &pools.vars, 1});
          }
        }
        break;
      }
    }
  }
  return edits;
}

const Token& pick_token(const Pool& pool, Rng& rng, const Token* exclude) {
  if (!exclude) return pool[rng.uniform_index(pool.size())];
  std::vector<const Token*> options;
  for (const Token& t : pool)
    if (t.text != exclude->text) options.push_back(&t);
  return *options[rng.uniform_index(options.size())];
}

}  // namespace

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Struct: return "Struct";
    case ErrorCategory::Stmt: return "Stmt";
    case ErrorCategory::Decl: return "Decl";
    case ErrorCategory::TypeMismatch: return "TypeMismatch";
    case ErrorCategory::IdentifierMisuse: return "IdentifierMisuse";
  }
  return "Struct";
}

std::string_view to_string(MutationOp op) {
  switch (op) {
    case MutationOp::ADD: return "ADD";
    case MutationOp::DEL: return "DEL";
    case MutationOp::REP: return "REP";
  }
  return "ADD";
}

ErrorCategory category_from_string(std::string_view name) {
  for (ErrorCategory c : kAllCategories)
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::InvalidInput, "unknown error category '" + std::string(name) + "'");
}

MutationOp op_from_string(std::string_view name) {
  for (MutationOp op : kAllOps)
    if (to_string(op) == name) return op;
  throw Error(ErrorCode::InvalidInput, "unknown mutation op '" + std::string(name) + "'");
}

std::span<const MutationOp> allowed_ops(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Struct: return kStructOps;
    case ErrorCategory::Stmt: return kStmtOps;
    case ErrorCategory::Decl: return kDeclOps;
    case ErrorCategory::TypeMismatch: return kTypeMismatchOps;
    case ErrorCategory::IdentifierMisuse: return kIdentifierMisuseOps;
  }
  return {};
}

bool is_allowed(ErrorCategory category, MutationOp op) {
  auto ops = allowed_ops(category);
  return std::find(ops.begin(), ops.end(), op) != ops.end();
}

bool has_eligible_site(const TokenizedProgram& program, ErrorCategory category, MutationOp op,
                       const std::set<LineIndex>& excluded) {
  if (!is_allowed(category, op)) return false;
  const SymbolTables symbols = analyzer(program);
  const Pools pools(program, symbols);
  return !enumerate_edits(program, symbols, pools, category, op, excluded).empty();
}

Corruption corrupt_once(const TokenizedProgram& program, ErrorCategory category, MutationOp op,
                        Rng& rng, const std::set<LineIndex>& excluded) {
  if (!is_allowed(category, op))
    throw Error(ErrorCode::DisallowedOp,
                std::string(to_string(op)) + " is not allowed for " + std::string(to_string(category)),
                {{"category", std::string(to_string(category))}, {"op", std::string(to_string(op))}});

  const SymbolTables symbols = analyzer(program);
  const Pools pools(program, symbols);
  const std::vector<Edit> edits = enumerate_edits(program, symbols, pools, category, op, excluded);
  if (edits.empty())
    throw Error(ErrorCode::NoEligibleSite,
                "no eligible site for " + std::string(to_string(category)) + "/" +
                    std::string(to_string(op)),
                {{"category", std::string(to_string(category))}, {"op", std::string(to_string(op))},
                 {"source_id", program.source_id}});

  std::vector<int> groups;
  for (const Edit& e : edits)
    if (std::find(groups.begin(), groups.end(), e.group) == groups.end()) groups.push_back(e.group);
  std::sort(groups.begin(), groups.end());
  const int group = groups[rng.uniform_index(groups.size())];
  std::vector<const Edit*> in_group;
  for (const Edit& e : edits)
    if (e.group == group) in_group.push_back(&e);
  const Edit& edit = *in_group[rng.uniform_index(in_group.size())];

  Corruption out{program, {}};
  TokenLine& line = out.program.line(edit.line);
  CorruptionRecord& record = out.record;
  record.line = edit.line;
  record.category = category;
  record.op = op;
  record.original_line = line;
  switch (edit.type) {
    case EditType::Insert: {
      const Token& t = pick_token(*edit.choices, rng, nullptr);
      line.insert(line.begin() + static_cast<std::ptrdiff_t>(edit.pos), t);
      record.operand_kind = t.kind;
      break;
    }
    case EditType::Delete:
      record.operand_kind = line[edit.pos].kind;
      line.erase(line.begin() + static_cast<std::ptrdiff_t>(edit.pos));
      break;
    case EditType::Replace: {
      const Token& t = pick_token(*edit.choices, rng, &line[edit.pos]);
      record.operand_kind = line[edit.pos].kind;
      line[edit.pos] = t;
      break;
    }
  }
  record.mutated_line = line;
  return out;
}

TokenizedProgram restore_original(const BrokenProgram& broken) {
  TokenizedProgram program = broken.program;
  for (const auto& c : broken.corruptions) program.line(c.line) = c.original_line;
  program.source_id = broken.parent_id;
  return program;
}

CategoryMix CategoryMix::defaults() {
  return CategoryMix{{21.28, 51.52, 21.43, 2.17, 3.60}};
}

std::array<double, 5> CategoryMix::normalized() const {
  double total = 0.0;
  for (double w : weights) total += w;
  std::array<double, 5> out{};
  if (total <= 0.0) throw Error(ErrorCode::InvalidInput, "category mix has no positive weight");
  for (std::size_t i = 0; i < 5; ++i) out[i] = weights[i] / total;
  return out;
}

double SynthesisReport::retention_rate() const {
  return candidates_generated ? static_cast<double>(variants_emitted) /
                                    static_cast<double>(candidates_generated)
                              : 0.0;
}

nlohmann::ordered_json SynthesisReport::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["parents"] = parents;
  j["variants_requested"] = variants_requested;
  j["variants_emitted"] = variants_emitted;
  j["candidates_generated"] = candidates_generated;
  j["candidates_still_compiling"] = candidates_still_compiling;
  j["candidates_duplicate"] = candidates_duplicate;
  j["variants_exhausted"] = variants_exhausted;
  j["retention_rate"] = retention_rate();
  nlohmann::ordered_json cats;
  for (ErrorCategory c : kAllCategories)
    cats[std::string(to_string(c))] = category_counts[category_index(c)];
  j["category_counts"] = std::move(cats);
  j["error_count_histogram"] = error_count_histogram;
  return j;
}

namespace {

struct ParentResult {
  std::vector<BrokenProgram> variants;
  SynthesisReport report;
};

ParentResult synthesize_parent(const TokenizedProgram& parent, const SynthesisConfig& config,
                               const Compiler& compiler) {
  ParentResult result;
  SynthesisReport& report = result.report;
  report.parents = 1;
  report.variants_requested = config.variants_per_program;
  if (config.variants_per_program == 0) return result;

  const std::string parent_text = detokenize(parent);
  if (!compiler.compile(parent_text).success)
    throw Error(ErrorCode::SourceDoesNotCompile, "parent '" + parent.source_id + "' does not compile",
                {{"source_id", parent.source_id}});

  // Categories with at least one site anywhere; the mix is renormalised over them.
  std::array<double, 5> weights = config.category_mix.normalized();
  for (ErrorCategory c : kAllCategories) {
    bool any = false;
    for (MutationOp op : allowed_ops(c)) any = any || has_eligible_site(parent, c, op);
    if (!any) weights[category_index(c)] = 0.0;
  }
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w <= 0.0; }))
    throw Error(ErrorCode::NoEligibleSite, "parent '" + parent.source_id + "' has no corruptible site",
                {{"source_id", parent.source_id}});

  std::unordered_set<std::string> seen{parent_text};
  const std::size_t max_errors = std::clamp<std::size_t>(config.max_errors, 1, 5);
  for (std::size_t v = 0; v < config.variants_per_program; ++v) {
    const std::uint64_t seed = derive_seed(config.seed, "variant:" + parent.source_id, v);
    Rng rng(seed);
    const std::size_t count = 1 + rng.uniform_index(max_errors);
    std::vector<ErrorCategory> plan;
    for (std::size_t e = 0; e < count; ++e) plan.push_back(kAllCategories[rng.weighted_index(weights)]);

    bool emitted = false;
    for (std::size_t attempt = 0; attempt < config.retry_budget && !emitted; ++attempt) {
      TokenizedProgram program = parent;
      std::vector<CorruptionRecord> records;
      std::set<LineIndex> touched;
      for (ErrorCategory c : plan) {
        std::vector<MutationOp> ops;
        for (MutationOp op : allowed_ops(c))
          if (has_eligible_site(program, c, op, touched)) ops.push_back(op);
        if (ops.empty()) continue;
        Corruption step = corrupt_once(program, c, ops[rng.uniform_index(ops.size())], rng, touched);
        touched.insert(step.record.line);
        program = std::move(step.program);
        records.push_back(std::move(step.record));
      }
      if (records.empty()) continue;
      ++report.candidates_generated;
      std::string text = detokenize(program);
      if (seen.count(text)) {
        ++report.candidates_duplicate;
        continue;
      }
      if (compiler.compile(text).success) {
        ++report.candidates_still_compiling;
        continue;
      }
      seen.insert(std::move(text));
      std::sort(records.begin(), records.end(),
                [](const auto& a, const auto& b) { return a.line < b.line; });
      for (const auto& r : records) ++report.category_counts[category_index(r.category)];
      ++report.error_count_histogram[records.size() - 1];
      program.source_id = parent.source_id + "#" + std::to_string(v);
      result.variants.push_back(
          BrokenProgram{std::move(program), std::move(records), seed, parent.source_id, v});
      ++report.variants_emitted;
      emitted = true;
    }
    if (!emitted) ++report.variants_exhausted;
  }
  if (result.variants.empty())
    throw Error(ErrorCode::ExhaustedRetries,
                "no failing variant for '" + parent.source_id + "' within the retry budget",
                {{"source_id", parent.source_id}, {"retry_budget", config.retry_budget}});
  return result;
}

void merge(SynthesisReport& into, const SynthesisReport& from) {
  into.parents += from.parents;
  into.variants_requested += from.variants_requested;
  into.variants_emitted += from.variants_emitted;
  into.candidates_generated += from.candidates_generated;
  into.candidates_still_compiling += from.candidates_still_compiling;
  into.candidates_duplicate += from.candidates_duplicate;
  into.variants_exhausted += from.variants_exhausted;
  for (std::size_t i = 0; i < 5; ++i) {
    into.category_counts[i] += from.category_counts[i];
    into.error_count_histogram[i] += from.error_count_histogram[i];
  }
}

}  // namespace

SynthesisReport synthesize_corpus(const std::vector<TokenizedProgram>& corpus,
                                  const SynthesisConfig& config, const Compiler& compiler,
                                  const BrokenProgramSink& sink) {
  if (config.max_errors == 0 || config.max_errors > 5)
    throw Error(ErrorCode::InvalidInput, "max_errors must be in 1..5",
                {{"max_errors", config.max_errors}});
  SynthesisReport report;
  const unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    for (const auto& parent : corpus) {
      ParentResult r = synthesize_parent(parent, config, compiler);
      merge(report, r.report);
      for (auto& v : r.variants) sink(std::move(v));
    }
    return report;
  }

  // Workers fill per-parent slots; the caller's thread emits them in order.
  std::vector<std::optional<ParentResult>> slots(corpus.size());
  std::vector<std::exception_ptr> failures(corpus.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t index;
      {
        std::lock_guard lock(mutex);
        if (next >= corpus.size()) return;
        index = next++;
      }
      std::optional<ParentResult> r;
      std::exception_ptr failure;
      try {
        r = synthesize_parent(corpus[index], config, compiler);
      } catch (...) {
        failure = std::current_exception();
      }
      {
        std::lock_guard lock(mutex);
        slots[index] = std::move(r);
        failures[index] = failure;
        if (!slots[index]) slots[index].emplace();
      }
      ready.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  std::exception_ptr first_failure;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ParentResult r;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      if (failures[i]) {
        first_failure = failures[i];
        next = corpus.size();
        break;
      }
      r = std::move(*slots[i]);
      slots[i]->variants.clear();
    }
    merge(report, r.report);
    for (auto& v : r.variants) sink(std::move(v));
  }
  for (auto& t : pool) t.join();
  if (first_failure) std::rethrow_exception(first_failure);
  return report;
}

std::vector<BrokenProgram> synthesize_corpus(const std::vector<TokenizedProgram>& corpus,
                                             const SynthesisConfig& config,
                                             const Compiler& compiler, SynthesisReport* report) {
  std::vector<BrokenProgram> out;
  SynthesisReport r = synthesize_corpus(corpus, config, compiler,
                                        [&](BrokenProgram&& b) { out.push_back(std::move(b)); });
  if (report) *report = r;
  return out;
}

nlohmann::ordered_json to_json(const CorruptionRecord& record) {
  nlohmann::ordered_json j;
  j["line"] = record.line;
  j["category"] = std::string(to_string(record.category));
  j["op"] = std::string(to_string(record.op));
  j["operand_kind"] = std::string(to_string(record.operand_kind));
  j["original_line"] = to_json(record.original_line);
  j["mutated_line"] = to_json(record.mutated_line);
  return j;
}

CorruptionRecord corruption_from_json(const nlohmann::json& j) {
  CorruptionRecord r;
  r.line = j.at("line").get<LineIndex>();
  r.category = category_from_string(j.at("category").get<std::string>());
  r.op = op_from_string(j.at("op").get<std::string>());
  r.operand_kind = j.contains("operand_kind")
                       ? token_kind_from_string(j.at("operand_kind").get<std::string>())
                       : TokenKind::Identifier;
  r.original_line = token_line_from_json(j.at("original_line"));
  r.mutated_line = token_line_from_json(j.at("mutated_line"));
  return r;
}

nlohmann::ordered_json to_json(const BrokenProgram& broken) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["parent_id"] = broken.parent_id;
  j["variant_id"] = broken.variant_id;
  j["seed"] = broken.seed;
  nlohmann::ordered_json lines = nlohmann::ordered_json::array();
  for (const auto& line : broken.program.lines) lines.push_back(to_json(line));
  j["lines"] = std::move(lines);
  nlohmann::ordered_json corruptions = nlohmann::ordered_json::array();
  for (const auto& c : broken.corruptions) corruptions.push_back(to_json(c));
  j["corruptions"] = std::move(corruptions);
  return j;
}

BrokenProgram broken_program_from_json(const nlohmann::json& j) {
  require_format_version(j, "broken program");
  BrokenProgram b;
  b.parent_id = j.at("parent_id").get<std::string>();
  b.variant_id = j.at("variant_id").get<std::size_t>();
  b.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& line : j.at("lines")) b.program.lines.push_back(token_line_from_json(line));
  b.program.source_id = b.parent_id + "#" + std::to_string(b.variant_id);
  for (const auto& c : j.at("corruptions")) b.corruptions.push_back(corruption_from_json(c));
  return b;
}

}  // namespace crepair
