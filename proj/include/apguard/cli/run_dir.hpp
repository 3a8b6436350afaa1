#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace apguard::cli {

std::string sha256_file(const std::filesystem::path& path);

// Output directory of one command. Artifacts are written into a hidden
// staging directory and only moved into place by commit(); a RunDir destroyed
// without commit() leaves no partial output behind.
class RunDir {
 public:
  RunDir(std::filesystem::path out, std::string command);
  ~RunDir();
  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;

  const std::filesystem::path& out() const noexcept { return out_; }

  // Where to write artifact `name` (may contain '/'); parent directories are created.
  std::filesystem::path stage(const std::string& name);

  void record_input(const std::string& role, const std::filesystem::path& path);
  void record_option(const std::string& name, const std::string& value);

  // Moves artifacts into place and writes manifest.json: the config snapshot,
  // options, inputs and artifacts with SHA-256 digests and byte counts.
  void commit(const std::string& config_snapshot, std::uint64_t seed);

 private:
  std::filesystem::path out_;
  std::filesystem::path staging_;
  std::string command_;
  bool created_out_ = false;
  bool committed_ = false;
  std::vector<std::string> artifacts_;
  std::vector<std::pair<std::string, std::filesystem::path>> inputs_;
  std::vector<std::pair<std::string, std::string>> options_;
};

}  // namespace apguard::cli
