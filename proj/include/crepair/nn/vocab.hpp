#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace crepair::nn {

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kSep = 4;
  // Normalization placeholders reserved per class, _<var1>_ .. _<varN>_.
  static constexpr std::size_t kPlaceholdersPerClass = 5;

  Vocabulary();

  // Tokens seen at least `min_count` times, most frequent first, ties in
  // lexicographic order, after the reserved symbols. max_size (0 = no limit)
  // caps the total including reserved ids. Throws EmptyCorpus.
  static Vocabulary build(const std::vector<std::string>& stream, std::size_t min_count = 2,
                          std::size_t max_size = 0);

  std::size_t size() const { return tokens_.size(); }
  int id(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t reserved_count() const { return reserved_; }

  nlohmann::ordered_json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  void push(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::size_t reserved_ = 0;
};

}  // namespace crepair::nn
