#include "crepair/context.hpp"

#include <algorithm>
#include <map>

#include "crepair/format.hpp"

namespace crepair {

namespace {

bool is_qualifier(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.text == "const" || t.text == "volatile" || t.text == "restrict");
}

bool is_storage_class(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.text == "static" || t.text == "extern" || t.text == "register" ||
          t.text == "auto" || t.text == "typedef" || t.text == "inline");
}

bool is_type_specifier(const Token& t) {
  return t.kind == TokenKind::TypeName ||
         (t.kind == TokenKind::Keyword && is_type_keyword(t.text));
}

bool is_tag_keyword(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.text == "struct" || t.text == "union" || t.text == "enum");
}

// Index of the nearest token before `pos` that is not a pointer star or a
// qualifier, or -1.
long skip_declarator_prefix(const TokenLine& line, std::size_t pos) {
  long p = static_cast<long>(pos) - 1;
  while (p >= 0 && ((line[p].kind == TokenKind::Operator && line[p].text == "*") ||
                    is_qualifier(line[p])))
    --p;
  return p;
}

}  // namespace

bool is_declaration_statement(const TokenLine& line) {
  for (const Token& t : line) {
    if (is_storage_class(t) || is_qualifier(t)) continue;
    return is_type_specifier(t);
  }
  return false;
}

std::vector<std::size_t> declaring_positions(const TokenLine& line) {
  std::vector<std::size_t> out;
  const bool declaration = is_declaration_statement(line);
  const bool typedef_line =
      !line.empty() && line.front().kind == TokenKind::Keyword && line.front().text == "typedef";
  int depth = 0;
  for (std::size_t j = 0; j < line.size(); ++j) {
    const Token& t = line[j];
    if (t.kind == TokenKind::Punctuator) {
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      else if (t.text == ")" || t.text == "]" || t.text == "}") depth = std::max(0, depth - 1);
      continue;
    }
    const Token* next = j + 1 < line.size() ? &line[j + 1] : nullptr;
    const Token* prev = j > 0 ? &line[j - 1] : nullptr;
    if (t.kind == TokenKind::Identifier) {
      long p = skip_declarator_prefix(line, j);
      if (p >= 0 && is_type_specifier(line[p]) && !is_tag_keyword(line[p])) {
        out.push_back(j);
      } else if (declaration && depth == 0 && p >= 0 && line[p].kind == TokenKind::Punctuator &&
                 line[p].text == ",") {
        out.push_back(j);
      }
    } else if (t.kind == TokenKind::TypeName) {
      const bool introduces_tag =
          prev && is_tag_keyword(*prev) &&
          (!next || (next->kind == TokenKind::Punctuator && (next->text == "{" || next->text == ";")));
      const bool names_typedef =
          next && next->kind == TokenKind::Punctuator && (next->text == ";" || next->text == ",") &&
          (typedef_line || (prev && prev->kind == TokenKind::Punctuator && prev->text == "}"));
      if (introduces_tag || names_typedef) out.push_back(j);
    }
  }
  return out;
}

Occurrence classify_occurrence(const TokenLine& line, std::string_view token) {
  for (std::size_t pos : declaring_positions(line))
    if (line[pos].text == token) return Occurrence::Declare;
  return Occurrence::Use;
}

SymbolTables analyzer(const TokenizedProgram& program) {
  SymbolTables tables;
  for (const auto& line : program.lines) {
    for (const Token& t : line)
      if (t.kind == TokenKind::TypeName) tables.type_set.insert(t.text);
    for (std::size_t pos : declaring_positions(line)) {
      const Token& t = line[pos];
      if (t.kind != TokenKind::Identifier) continue;
      const bool call_shape = pos + 1 < line.size() && line[pos + 1].text == "(";
      (call_shape ? tables.func_set : tables.var_set).insert(t.text);
    }
  }
  for (const auto& name : tables.type_set) {
    tables.var_set.erase(name);
    tables.func_set.erase(name);
  }
  for (const auto& name : tables.func_set) tables.var_set.erase(name);
  return tables;
}

void split_line_symbols(const TokenLine& line, const SymbolTables& tables,
                        std::vector<std::string>& vars_declare,
                        std::vector<std::string>& vars_use) {
  vars_declare.clear();
  vars_use.clear();
  const auto declaring = declaring_positions(line);
  std::set<std::string> declared_here;
  for (std::size_t pos : declaring) declared_here.insert(line[pos].text);
  std::set<std::string> seen;
  for (const Token& t : line) {
    if (t.kind != TokenKind::Identifier && t.kind != TokenKind::TypeName) continue;
    if (!tables.contains(t.text) || !seen.insert(t.text).second) continue;
    (declared_here.count(t.text) ? vars_declare : vars_use).push_back(t.text);
  }
}

TokenLine materialize_context(const TokenizedProgram& program, LineIndex anchor,
                              const std::vector<LineIndex>& lines,
                              std::size_t token_budget) {
  auto distance = [anchor](LineIndex l) { return l > anchor ? l - anchor : anchor - l; };
  std::vector<LineIndex> by_closeness = lines;
  std::stable_sort(by_closeness.begin(), by_closeness.end(), [&](LineIndex a, LineIndex b) {
    return distance(a) != distance(b) ? distance(a) < distance(b) : a < b;
  });
  std::vector<LineIndex> kept;
  std::size_t used = 0;
  for (LineIndex l : by_closeness) {
    const std::size_t size = program.line(l).size();
    if (used + size > token_budget) break;
    used += size;
    kept.push_back(l);
  }
  std::sort(kept.begin(), kept.end());
  TokenLine out;
  out.reserve(used);
  for (LineIndex l : kept) {
    const auto& tokens = program.line(l);
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

std::vector<LineContext> get_context(const TokenizedProgram& program, const SymbolTables& tables,
                                     std::size_t token_budget) {
  const std::size_t n = program.line_count();
  std::vector<LineContext> contexts(n);
  std::map<std::string, std::vector<LineIndex>> declare_lines;
  std::map<std::string, std::vector<LineIndex>> use_lines;
  for (std::size_t i = 0; i < n; ++i) {
    LineContext& ctx = contexts[i];
    ctx.line = i + 1;
    split_line_symbols(program.lines[i], tables, ctx.vars_declare, ctx.vars_use);
    for (const auto& name : ctx.vars_declare) declare_lines[name].push_back(ctx.line);
    for (const auto& name : ctx.vars_use) use_lines[name].push_back(ctx.line);
  }

  for (LineContext& ctx : contexts) {
    const LineIndex i = ctx.line;
    std::set<LineIndex> picked;

    // Declarations precede uses: search backward only.
    for (const auto& name : ctx.vars_use) {
      auto it = declare_lines.find(name);
      if (it == declare_lines.end()) continue;
      const auto& decl = it->second;
      auto upper = std::lower_bound(decl.begin(), decl.end(), i);
      if (upper != decl.begin()) picked.insert(*std::prev(upper));
    }

    // Nearest use in either direction; ties go to the earlier line.
    auto nearest_use = [&](const std::string& name) {
      auto it = use_lines.find(name);
      if (it == use_lines.end()) return;
      const auto& uses = it->second;
      auto pos = std::lower_bound(uses.begin(), uses.end(), i);
      LineIndex best = 0;
      std::size_t best_dist = 0;
      if (pos != uses.begin()) {
        best = *std::prev(pos);
        best_dist = i - best;
      }
      auto after = pos;
      if (after != uses.end() && *after == i) ++after;
      if (after != uses.end() && (best == 0 || *after - i < best_dist)) best = *after;
      if (best != 0) picked.insert(best);
    };
    for (const auto& name : ctx.vars_declare) nearest_use(name);
    for (const auto& name : ctx.vars_use) nearest_use(name);

    picked.erase(i);
    ctx.context_lines.assign(picked.begin(), picked.end());
    ctx.context_tokens = materialize_context(program, i, ctx.context_lines, token_budget);
  }
  return contexts;
}

nlohmann::ordered_json to_json(const LineContext& context) {
  nlohmann::ordered_json out;
  out["format_version"] = kFormatVersion;
  out["line"] = context.line;
  out["vars_declare"] = context.vars_declare;
  out["vars_use"] = context.vars_use;
  out["context_lines"] = context.context_lines;
  return out;
}

nlohmann::ordered_json to_json(const SymbolTables& tables) {
  nlohmann::ordered_json out;
  out["var_set"] = tables.var_set;
  out["func_set"] = tables.func_set;
  out["type_set"] = tables.type_set;
  return out;
}

}  // namespace crepair
