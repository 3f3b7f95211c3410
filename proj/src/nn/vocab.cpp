#include "crepair/nn/vocab.hpp"

#include <algorithm>
#include <map>

#include "crepair/diagnostics.hpp"
#include "crepair/error.hpp"

namespace crepair::nn {

Vocabulary::Vocabulary() {
  for (const char* t : {"<PAD>", "<UNK>", "<BOS>", "<EOS>", "<SEP>"}) push(t);
  for (const char* cls : {"var", "func", "type"})
    for (std::size_t i = 1; i <= kPlaceholdersPerClass; ++i) push(make_placeholder(cls, i));
  reserved_ = tokens_.size();
}

void Vocabulary::push(const std::string& token) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& stream, std::size_t min_count,
                             std::size_t max_size) {
  if (stream.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from no tokens");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : stream) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [t, c] : counts)
    if (c >= min_count) kept.emplace_back(t, c);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [t, c] : kept) {
    if (max_size && v.size() >= max_size) break;
    if (!v.contains(t)) v.push(t);
  }
  return v;
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

nlohmann::ordered_json Vocabulary::to_json() const {
  return nlohmann::ordered_json(std::vector<std::string>(tokens_.begin() + static_cast<long>(reserved_), tokens_.end()));
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  for (const auto& t : j) {
    const auto s = t.get<std::string>();
    if (v.contains(s)) throw Error(ErrorCode::InvalidInput, "duplicate vocabulary entry " + s);
    v.push(s);
  }
  return v;
}

}  // namespace crepair::nn
