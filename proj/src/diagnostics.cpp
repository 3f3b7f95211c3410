#include "crepair/diagnostics.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "crepair/error.hpp"

extern char** environ;

namespace crepair {

namespace {

// Process-wide bound on concurrently running compiler processes.
class CompilerSlots {
 public:
  static CompilerSlots& instance() {
    static CompilerSlots slots;
    return slots;
  }

  void acquire(unsigned limit) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_use_ < limit; });
    ++in_use_;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      --in_use_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  unsigned in_use_ = 0;
};

class SlotGuard {
 public:
  explicit SlotGuard(unsigned limit) { CompilerSlots::instance().acquire(limit); }
  ~SlotGuard() { CompilerSlots::instance().release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
};

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned long> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("crepair-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::vector<std::string> child_environment() {
  std::vector<std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view entry(*e);
    if (entry.starts_with("LC_ALL=") || entry.starts_with("LANG=") ||
        entry.starts_with("LC_MESSAGES=") || entry.starts_with("LANGUAGE=") ||
        entry.starts_with("GCC_COLORS="))
      continue;
    env.emplace_back(entry);
  }
  env.emplace_back("LC_ALL=C");
  env.emplace_back("LANG=C");
  return env;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

struct Location {
  std::size_t line = 0;
  std::optional<int> column;
};

// "<file>:<line>[:<col>]" -> line/column.
std::optional<Location> parse_location(std::string_view prefix) {
  auto last = prefix.rfind(':');
  if (last == std::string_view::npos) return std::nullopt;
  std::string_view tail = prefix.substr(last + 1);
  std::string_view head = prefix.substr(0, last);
  if (!all_digits(tail)) return std::nullopt;
  auto before = head.rfind(':');
  if (before != std::string_view::npos && all_digits(head.substr(before + 1))) {
    return Location{std::stoul(std::string(head.substr(before + 1))), std::stoi(std::string(tail))};
  }
  return Location{std::stoul(std::string(tail)), std::nullopt};
}

std::vector<std::string> split_spaces(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Matches "_<classN>_" at `pos`; returns its length or 0.
std::size_t placeholder_length_at(std::string_view text, std::size_t pos) {
  if (text.substr(pos, 2) != "_<") return 0;
  std::size_t i = pos + 2;
  std::size_t letters = i;
  while (i < text.size() && std::islower(static_cast<unsigned char>(text[i]))) ++i;
  std::string_view cls = text.substr(letters, i - letters);
  if (cls != "var" && cls != "func" && cls != "type") return 0;
  std::size_t digits = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == digits || text.substr(i, 2) != ">_") return 0;
  return i + 2 - pos;
}

}  // namespace

CompilerConfig CompilerConfig::from_environment() {
  CompilerConfig config;
  if (const char* cc = std::getenv("CREPAIR_CC"); cc && *cc) config.path = cc;
  return config;
}

nlohmann::ordered_json to_json(const CompilerConfig& config) {
  nlohmann::ordered_json j;
  j["path"] = config.path;
  j["flags"] = config.flags;
  j["timeout_seconds"] = config.timeout_seconds;
  j["max_concurrent"] = config.max_concurrent;
  return j;
}

CompilerConfig compiler_config_from_json(const nlohmann::json& j) {
  CompilerConfig config = CompilerConfig::from_environment();
  if (j.contains("path")) config.path = j.at("path").get<std::string>();
  if (j.contains("flags")) config.flags = j.at("flags").get<std::vector<std::string>>();
  if (j.contains("timeout_seconds")) config.timeout_seconds = j.at("timeout_seconds").get<double>();
  if (j.contains("max_concurrent")) config.max_concurrent = j.at("max_concurrent").get<unsigned>();
  return config;
}

Compiler::Compiler(CompilerConfig config) : config_(std::move(config)) {}

CompileResult Compiler::compile(std::string_view source) const {
  TempDir dir;
  return compile(source, dir.path());
}

CompileResult Compiler::compile(std::string_view source,
                                const std::filesystem::path& workdir) const {
  const unsigned limit = config_.max_concurrent
                             ? config_.max_concurrent
                             : std::max(1u, std::thread::hardware_concurrency());
  SlotGuard slot(limit);

  std::filesystem::create_directories(workdir);
  const std::filesystem::path file = workdir / "prog.c";
  {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
    out.write(source.data(), static_cast<std::streamsize>(source.size()));
  }

  std::vector<std::string> args;
  args.push_back(config_.path);
  args.insert(args.end(), config_.flags.begin(), config_.flags.end());
  args.push_back(file.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::vector<std::string> env = child_environment();
  std::vector<char*> envp;
  for (auto& e : env) envp.push_back(e.data());
  envp.push_back(nullptr);

  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, "pipe failed");
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw Error(ErrorCode::CompilerUnavailable,
                "cannot run compiler '" + config_.path + "': " + std::strerror(rc),
                {{"path", config_.path}});
  }

  using clock = std::chrono::steady_clock;
  const auto deadline =
      clock::now() + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double>(config_.timeout_seconds));
  auto time_out = [&]() {
    ::kill(pid, SIGKILL);
    int ignored = 0;
    ::waitpid(pid, &ignored, 0);
    ::close(fds[0]);
    throw Error(ErrorCode::CompilerTimeout,
                "compiler exceeded " + std::to_string(config_.timeout_seconds) + " s",
                {{"seconds", config_.timeout_seconds}});
  };

  std::string output;
  char buffer[4096];
  pollfd pfd{fds[0], POLLIN, 0};
  while (true) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (remaining.count() <= 0) time_out();
    int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) continue;
    ssize_t got = ::read(fds[0], buffer, sizeof buffer);
    if (got > 0) {
      output.append(buffer, static_cast<std::size_t>(got));
      continue;
    }
    if (got < 0 && errno == EINTR) continue;
    break;
  }
  int status = 0;
  while (true) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) break;
    if (clock::now() > deadline) time_out();
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ::close(fds[0]);

  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (exit_code == 127 && output.find(config_.path) != std::string::npos &&
      output.find("error:") == std::string::npos)
    throw Error(ErrorCode::CompilerUnavailable, "compiler '" + config_.path + "' not runnable",
                {{"path", config_.path}});

  CompileResult result = parse_compiler_output(output);
  if (exit_code != 0 && result.error_count == 0) {
    Diagnostic synthetic;
    synthetic.reported_line = 1;
    synthetic.raw_message = "compiler exited with status " + std::to_string(exit_code);
    synthetic.normalized_message = split_spaces(synthetic.raw_message);
    result.diagnostics.push_back(std::move(synthetic));
    result.error_count = 1;
    result.success = false;
  }
  return result;
}

CompileResult parse_compiler_output(std::string_view output) {
  CompileResult result;
  std::size_t start = 0;
  while (start < output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string_view::npos) end = output.size();
    std::string_view line = output.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;

    static constexpr std::string_view kErrorTags[] = {": fatal error: ", ": error: "};
    bool handled = false;
    for (std::string_view tag : kErrorTags) {
      auto at = line.find(tag);
      if (at == std::string_view::npos) continue;
      auto location = parse_location(line.substr(0, at));
      if (!location) continue;
      Diagnostic d;
      d.reported_line = location->line;
      d.column = location->column;
      d.raw_message = std::string(line.substr(at + tag.size()));
      d.normalized_message = split_spaces(d.raw_message);
      result.diagnostics.push_back(std::move(d));
      handled = true;
      break;
    }
    if (handled) continue;
    static constexpr std::string_view kSkippedTags[] = {": warning: ", ": note: "};
    for (std::string_view tag : kSkippedTags) {
      auto at = line.find(tag);
      if (at != std::string_view::npos && parse_location(line.substr(0, at))) {
        handled = true;
        break;
      }
    }
    if (!handled) result.unparsed.emplace_back(line);
  }
  result.error_count = result.diagnostics.size();
  result.success = result.error_count == 0;
  return result;
}

bool is_placeholder(std::string_view text) {
  return !text.empty() && placeholder_length_at(text, 0) == text.size();
}

std::string make_placeholder(std::string_view cls, std::size_t index) {
  return "_<" + std::string(cls) + std::to_string(index) + ">_";
}

NormalizedMessage normalize_message(std::string_view raw, const SymbolTables& symbols) {
  NormalizedMessage out;
  std::map<std::string, std::string> assigned;
  std::size_t counts[3] = {0, 0, 0};
  static constexpr std::string_view kClasses[3] = {"var", "func", "type"};

  auto placeholder_for = [&](const std::string& name) -> const std::string* {
    int cls = -1;
    if (symbols.type_set.count(name)) cls = 2;
    else if (symbols.func_set.count(name)) cls = 1;
    else if (symbols.var_set.count(name)) cls = 0;
    if (cls < 0) return nullptr;
    auto it = assigned.find(name);
    if (it == assigned.end()) {
      std::string ph = make_placeholder(kClasses[cls], ++counts[cls]);
      out.id_map.emplace_back(ph, name);
      it = assigned.emplace(name, std::move(ph)).first;
    }
    return &it->second;
  };

  for (const std::string& chunk : split_spaces(raw)) {
    std::string token;
    std::size_t i = 0;
    while (i < chunk.size()) {
      if (!ident_char(chunk[i])) {
        token += chunk[i++];
        continue;
      }
      std::size_t j = i;
      while (j < chunk.size() && ident_char(chunk[j])) ++j;
      std::string word = chunk.substr(i, j - i);
      const std::string* ph = ident_start(word[0]) ? placeholder_for(word) : nullptr;
      token += ph ? *ph : word;
      i = j;
    }
    out.tokens.push_back(std::move(token));
  }
  return out;
}

std::string denormalize_token(std::string_view token, const IdMap& id_map) {
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    std::size_t len = placeholder_length_at(token, i);
    if (len == 0) {
      out += token[i++];
      continue;
    }
    std::string_view ph = token.substr(i, len);
    auto it = std::find_if(id_map.begin(), id_map.end(),
                           [&](const auto& entry) { return entry.first == ph; });
    if (it == id_map.end())
      throw Error(ErrorCode::UnknownPlaceholder, "unknown placeholder " + std::string(ph),
                  {{"name", std::string(ph)}});
    out += it->second;
    i += len;
  }
  return out;
}

std::string denormalize(const std::vector<std::string>& tokens, const IdMap& id_map) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += denormalize_token(tokens[i], id_map);
  }
  return out;
}

void normalize_diagnostics(CompileResult& result, const SymbolTables& symbols) {
  for (auto& d : result.diagnostics) {
    NormalizedMessage n = normalize_message(d.raw_message, symbols);
    d.normalized_message = std::move(n.tokens);
    d.id_map = std::move(n.id_map);
  }
}

std::vector<std::string> message_model_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& tok : tokens) {
    if (tok.empty()) continue;
    std::size_t begin = 0;
    std::size_t end = tok.size();
    std::vector<std::string> tail;
    while (begin < end && (tok[begin] == '\'' || tok[begin] == '"')) out.emplace_back(1, tok[begin++]);
    while (end > begin && (tok[end - 1] == '\'' || tok[end - 1] == '"' || tok[end - 1] == ',' ||
                           tok[end - 1] == ':'))
      tail.emplace_back(1, tok[--end]);
    if (end > begin) out.emplace_back(tok.substr(begin, end - begin));
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["reported_line"] = d.reported_line;
  j["column"] = d.column ? nlohmann::ordered_json(*d.column) : nlohmann::ordered_json(nullptr);
  j["raw_message"] = d.raw_message;
  j["normalized_message"] = d.normalized_message;
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for (const auto& [ph, name] : d.id_map) map[ph] = name;
  j["id_map"] = std::move(map);
  return j;
}

Diagnostic diagnostic_from_json(const nlohmann::json& j) {
  Diagnostic d;
  d.reported_line = j.at("reported_line").get<std::size_t>();
  if (j.contains("column") && !j.at("column").is_null()) d.column = j.at("column").get<int>();
  d.raw_message = j.at("raw_message").get<std::string>();
  d.normalized_message = j.at("normalized_message").get<std::vector<std::string>>();
  // nlohmann::json sorts object keys; restore first-appearance order by the
  // placeholder indices, which number in appearance order per class.
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [ph, name] : j.at("id_map").items()) entries.emplace_back(ph, name.get<std::string>());
  std::map<std::string, std::size_t> first_seen;
  std::size_t pos = 0;
  for (const auto& tok : d.normalized_message)
    for (std::size_t i = 0; i < tok.size(); ++i)
      if (std::size_t len = placeholder_length_at(tok, i)) {
        first_seen.emplace(tok.substr(i, len), pos++);
        i += len - 1;
      }
  std::stable_sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    auto fa = first_seen.count(a.first) ? first_seen[a.first] : SIZE_MAX;
    auto fb = first_seen.count(b.first) ? first_seen[b.first] : SIZE_MAX;
    return fa < fb;
  });
  d.id_map = std::move(entries);
  return d;
}

}  // namespace crepair
