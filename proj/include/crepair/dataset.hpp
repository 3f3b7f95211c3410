#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/corruption.hpp"
#include "crepair/program.hpp"

namespace crepair {

// Detokenized text with every Identifier/TypeName renamed to id0, id1, ...
// in order of first appearance. Two programs that differ only by a
// consistent renaming share a canonical text.
std::string canonical_text(const TokenizedProgram& program);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetManifest {
  std::vector<std::string> corpus_paths;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  // Record ids ("<parent>#<variant>") per split, in input order.
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::vector<std::string> removed;
  std::string criterion = "exact match after alpha-renaming";

  std::size_t pairs_removed() const { return removed.size(); }
};

std::string record_id(const BrokenProgram& record);

// Buckets by a seeded hash of parent_id so all variants of a parent share a
// split. A train (or validation) record whose canonical text occurs in a
// later split is dropped. Throws EmptyAfterDedup.
DatasetManifest dedup_split(const std::vector<BrokenProgram>& records, const SplitRatios& ratios,
                            std::uint64_t seed);

struct DatasetSplits {
  std::vector<BrokenProgram> train;
  std::vector<BrokenProgram> validation;
  std::vector<BrokenProgram> test;
};

DatasetSplits apply_manifest(const std::vector<BrokenProgram>& records,
                             const DatasetManifest& manifest);

nlohmann::ordered_json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

std::vector<BrokenProgram> read_broken_programs(const std::filesystem::path& path);
void write_broken_programs(const std::filesystem::path& path,
                           const std::vector<BrokenProgram>& records);

}  // namespace crepair
