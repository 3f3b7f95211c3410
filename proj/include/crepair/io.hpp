#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crepair/program.hpp"

namespace crepair {

std::string read_text_file(const std::filesystem::path& path);

// Output goes to a sibling temporary file that only replaces `path` on
// commit(). Destroying an uncommitted AtomicFile removes the temporary, so an
// aborted command never leaves a partial artifact behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path, bool binary = false);
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile();

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_text_file(const std::filesystem::path& path, std::string_view text);

// Calls `fn` for each non-empty line parsed as JSON.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&)>& fn);

// Tokenizes a .c file, or every .c file of a directory in name order. The
// source id is the file stem.
std::vector<TokenizedProgram> load_sources(const std::filesystem::path& path,
                                           const TokenizeLimits& limits = {});

}  // namespace crepair
