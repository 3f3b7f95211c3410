#include "crepair/dataset.hpp"

#include <map>
#include <unordered_map>
#include <unordered_set>

#include "crepair/error.hpp"
#include "crepair/format.hpp"
#include "crepair/io.hpp"
#include "crepair/rng.hpp"

namespace crepair {

std::string canonical_text(const TokenizedProgram& program) {
  std::unordered_map<std::string, std::string> names;
  TokenizedProgram renamed = program;
  for (auto& line : renamed.lines)
    for (Token& t : line) {
      if (t.kind != TokenKind::Identifier && t.kind != TokenKind::TypeName) continue;
      auto [it, inserted] = names.try_emplace(t.text, "id" + std::to_string(names.size()));
      t.text = it->second;
    }
  return detokenize(renamed);
}

std::string record_id(const BrokenProgram& record) {
  return record.parent_id + "#" + std::to_string(record.variant_id);
}

DatasetManifest dedup_split(const std::vector<BrokenProgram>& records, const SplitRatios& ratios,
                            std::uint64_t seed) {
  if (records.empty()) throw Error(ErrorCode::EmptyCorpus, "no records to split");
  const double total = ratios.train + ratios.validation + ratios.test;
  if (!(total > 0.0) || ratios.train < 0 || ratios.validation < 0 || ratios.test < 0)
    throw Error(ErrorCode::InvalidInput, "split ratios must be non-negative with a positive sum");

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.ratios = ratios;

  enum Split { Train, Validation, Test };
  std::vector<Split> assigned(records.size());
  std::vector<std::string> canonical(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double u = static_cast<double>(derive_seed(seed, "split:" + records[i].parent_id) >> 11) *
                     0x1.0p-53 * total;
    assigned[i] = u < ratios.train ? Train : u < ratios.train + ratios.validation ? Validation : Test;
    canonical[i] = canonical_text(records[i].program);
  }

  std::unordered_set<std::string> test_texts;
  std::unordered_set<std::string> held_out_texts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (assigned[i] == Test) test_texts.insert(canonical[i]);
    if (assigned[i] != Train) held_out_texts.insert(canonical[i]);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string id = record_id(records[i]);
    const bool clash = (assigned[i] == Train && held_out_texts.count(canonical[i])) ||
                       (assigned[i] == Validation && test_texts.count(canonical[i]));
    if (clash) {
      manifest.removed.push_back(id);
      continue;
    }
    (assigned[i] == Train ? manifest.train : assigned[i] == Validation ? manifest.validation
                                                                       : manifest.test)
        .push_back(id);
  }
  if (ratios.train > 0.0 && manifest.train.empty())
    throw Error(ErrorCode::EmptyAfterDedup, "training split is empty after deduplication",
                {{"records", records.size()}, {"removed", manifest.removed.size()}});
  return manifest;
}

DatasetSplits apply_manifest(const std::vector<BrokenProgram>& records,
                             const DatasetManifest& manifest) {
  std::unordered_map<std::string, int> where;
  for (const auto& id : manifest.train) where[id] = 0;
  for (const auto& id : manifest.validation) where[id] = 1;
  for (const auto& id : manifest.test) where[id] = 2;
  DatasetSplits splits;
  for (const auto& r : records) {
    auto it = where.find(record_id(r));
    if (it == where.end()) continue;
    (it->second == 0 ? splits.train : it->second == 1 ? splits.validation : splits.test).push_back(r);
  }
  return splits;
}

nlohmann::ordered_json to_json(const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = manifest.seed;
  j["corpus_paths"] = manifest.corpus_paths;
  j["ratios"] = {{"train", manifest.ratios.train},
                 {"validation", manifest.ratios.validation},
                 {"test", manifest.ratios.test}};
  j["dedup"] = {{"criterion", manifest.criterion},
                {"pairs_removed", manifest.pairs_removed()},
                {"removed", manifest.removed}};
  j["splits"] = {{"train", manifest.train},
                 {"validation", manifest.validation},
                 {"test", manifest.test}};
  return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  require_format_version(j, "dataset manifest");
  DatasetManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.corpus_paths = j.at("corpus_paths").get<std::vector<std::string>>();
  const auto& r = j.at("ratios");
  m.ratios = {r.at("train").get<double>(), r.at("validation").get<double>(),
              r.at("test").get<double>()};
  m.criterion = j.at("dedup").at("criterion").get<std::string>();
  m.removed = j.at("dedup").at("removed").get<std::vector<std::string>>();
  const auto& s = j.at("splits");
  m.train = s.at("train").get<std::vector<std::string>>();
  m.validation = s.at("validation").get<std::vector<std::string>>();
  m.test = s.at("test").get<std::vector<std::string>>();
  return m;
}

std::vector<BrokenProgram> read_broken_programs(const std::filesystem::path& path) {
  std::vector<BrokenProgram> out;
  read_jsonl(path, [&](const nlohmann::json& j) { out.push_back(broken_program_from_json(j)); });
  return out;
}

void write_broken_programs(const std::filesystem::path& path,
                           const std::vector<BrokenProgram>& records) {
  AtomicFile file(path);
  for (const auto& r : records) file.stream() << to_json(r).dump() << '\n';
  file.commit();
}

}  // namespace crepair
