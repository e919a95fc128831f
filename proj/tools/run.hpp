#pragma once

// Per-stage run bookkeeping: output directory lock, input/output digests and
// the manifest written next to the artifacts.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace moocscope::cli {

namespace fs = std::filesystem;

/// Invalid configuration; reported with exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Holds `<dir>/.moocscope.lock` for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH when set, else the clock.
std::string run_timestamp();

class Run {
 public:
  /// `config_snapshot` is the effective option set in config-file syntax.
  Run(std::string stage, fs::path out_dir, std::string config_snapshot, std::vector<std::string> command_line,
      std::string config_file);

  const fs::path& out_dir() const { return out_dir_; }
  fs::path out(const std::string& name) const { return out_dir_ / name; }

  /// Records an input file and its digest; throws ConfigError if missing.
  const fs::path& input(const fs::path& path, const std::string& field);
  void write(const std::string& name, std::string_view content);
  void seed(const std::string& name, std::uint64_t value) { seeds_.emplace_back(name, value); }
  void note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

  /// Writes `<stage>.manifest.json`.
  void finish();

 private:
  std::string stage_;
  fs::path out_dir_;
  std::string config_snapshot_;
  std::vector<std::string> command_line_;
  std::string config_file_;
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
  std::vector<std::pair<std::string, std::string>> notes_;
};

/// Re-hashes every input and output listed in a manifest. Returns the
/// mismatch descriptions (empty when everything matches).
std::vector<std::string> verify_manifest(const fs::path& manifest);

}  // namespace moocscope::cli
