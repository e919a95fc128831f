#include "run.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include <json.hpp>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"

namespace moocscope::cli {

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / ".moocscope.lock") {
  fs::create_directories(dir);
  // "x" makes fopen fail when the file exists, so two runs cannot both win.
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (f == nullptr)
    throw IoError("output directory " + dir.string() + " is locked by another run (remove " + path_.string() +
                  " if that run died)");
  std::fprintf(f, "%ld\n", static_cast<long>(std::time(nullptr)));
  std::fclose(f);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

std::string run_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Run::Run(std::string stage, fs::path out_dir, std::string config_snapshot, std::vector<std::string> command_line,
         std::string config_file)
    : stage_(std::move(stage)),
      out_dir_(std::move(out_dir)),
      config_snapshot_(std::move(config_snapshot)),
      command_line_(std::move(command_line)),
      config_file_(std::move(config_file)) {}

const fs::path& Run::input(const fs::path& path, const std::string& field) {
  if (!fs::is_regular_file(path)) throw ConfigError(field + ": file not found: " + path.string());
  inputs_.emplace_back(fs::absolute(path).lexically_normal().string(), sha256_file(path));
  return path;
}

void Run::write(const std::string& name, std::string_view content) {
  write_text_file(out(name), content);
  outputs_.emplace_back(name, sha256_hex(content));
}

void Run::finish() {
  nlohmann::ordered_json j;
  j["stage"] = stage_;
  j["tool_version"] = MOOCSCOPE_VERSION;
  j["created_at"] = run_timestamp();
  j["command_line"] = command_line_;
  if (config_file_.empty()) {
    j["config_file"] = nullptr;
  } else {
    j["config_file"] = {{"path", config_file_}, {"sha256", sha256_file(config_file_)}};
  }
  j["config_digest"] = sha256_hex(config_snapshot_);
  j["config"] = config_snapshot_;
  auto seeds = nlohmann::ordered_json::object();
  for (const auto& [k, v] : seeds_) seeds[k] = v;
  j["seeds"] = seeds;
  auto files = [](const auto& list) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [p, d] : list) arr.push_back({{"path", p}, {"sha256", d}});
    return arr;
  };
  j["inputs"] = files(inputs_);
  j["outputs"] = files(outputs_);
  auto notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : notes_) notes[k] = v;
  j["summary"] = notes;
  write_text_file(out(stage_ + ".manifest.json"), j.dump(2) + "\n");
}

std::vector<std::string> verify_manifest(const fs::path& manifest) {
  const auto j = nlohmann::json::parse(read_text_file(manifest), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw IoError(manifest.string() + " is not a manifest");
  std::vector<std::string> problems;
  auto check = [&](const fs::path& p, const std::string& want) {
    if (!fs::is_regular_file(p)) {
      problems.push_back(p.string() + ": missing");
      return;
    }
    if (sha256_file(p) != want) problems.push_back(p.string() + ": digest mismatch");
  };
  for (const auto& f : j.at("inputs")) check(f.at("path").get<std::string>(), f.at("sha256").get<std::string>());
  const auto dir = manifest.parent_path();
  for (const auto& f : j.at("outputs")) check(dir / f.at("path").get<std::string>(), f.at("sha256").get<std::string>());
  if (j.contains("config") && j.contains("config_digest") &&
      sha256_hex(j.at("config").get<std::string>()) != j.at("config_digest").get<std::string>())
    problems.push_back("config snapshot does not match config_digest");
  return problems;
}

}  // namespace moocscope::cli
