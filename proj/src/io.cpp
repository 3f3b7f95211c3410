#include "crepair/io.hpp"

#include <algorithm>
#include <sstream>
#include <unistd.h>

#include "crepair/error.hpp"

namespace crepair {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string(), {{"path", path.string()}});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

AtomicFile::AtomicFile(fs::path path, bool binary) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  temp_ = path_;
  temp_ += ".tmp." + std::to_string(::getpid());
  out_.open(temp_, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out_) throw Error(ErrorCode::Io, "cannot write " + temp_.string(), {{"path", path_.string()}});
}

AtomicFile::~AtomicFile() {
  if (committed_) return;
  out_.close();
  std::error_code ec;
  fs::remove(temp_, ec);
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "write failed for " + path_.string(), {{"path", path_.string()}});
  out_.close();
  std::error_code ec;
  fs::rename(temp_, path_, ec);
  if (ec)
    throw Error(ErrorCode::Io, "cannot rename onto " + path_.string() + ": " + ec.message(),
                {{"path", path_.string()}});
  committed_ = true;
}

void write_text_file(const fs::path& path, std::string_view text) {
  AtomicFile file(path, true);
  file.stream() << text;
  file.commit();
}

void read_jsonl(const fs::path& path, const std::function<void(const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string(), {{"path", path.string()}});
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, "malformed JSON record",
                  {{"path", path.string()}, {"line", number}, {"reason", e.what()}});
    }
    fn(j);
  }
}

std::vector<TokenizedProgram> load_sources(const fs::path& path, const TokenizeLimits& limits) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".c") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw Error(ErrorCode::Io, "no such file or directory: " + path.string(), {{"path", path.string()}});
  }
  std::vector<TokenizedProgram> programs;
  programs.reserve(files.size());
  for (const auto& f : files) programs.push_back(tokenize(read_text_file(f), f.stem().string(), limits));
  return programs;
}

}  // namespace crepair
