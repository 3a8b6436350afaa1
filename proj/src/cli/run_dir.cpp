#include "apguard/cli/run_dir.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>
#include <unistd.h>

#include "apguard/errors.hpp"
#include "json.hpp"

namespace apguard::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

RunDir::RunDir(fs::path out, std::string command) : out_(std::move(out)), command_(std::move(command)) {
  if (!fs::exists(out_)) {
    fs::create_directories(out_);
    created_out_ = true;
  } else if (!fs::is_directory(out_)) {
    throw Error("output path " + out_.string() + " is not a directory");
  }
  staging_ = out_ / (".staging-" + command_ + "-" + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

RunDir::~RunDir() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
  if (!committed_ && created_out_ && fs::is_empty(out_, ec)) fs::remove(out_, ec);
}

fs::path RunDir::stage(const std::string& name) {
  if (std::find(artifacts_.begin(), artifacts_.end(), name) == artifacts_.end())
    artifacts_.push_back(name);
  fs::path p = staging_ / name;
  fs::create_directories(p.parent_path());
  return p;
}

void RunDir::record_input(const std::string& role, const fs::path& path) {
  inputs_.emplace_back(role, path);
}

void RunDir::record_option(const std::string& name, const std::string& value) {
  options_.emplace_back(name, value);
}

void RunDir::commit(const std::string& config_snapshot, std::uint64_t seed) {
  nlohmann::ordered_json manifest;
  manifest["tool"] = "apguard";
  manifest["command"] = command_;
  manifest["seed"] = seed;
  manifest["config"] = config_snapshot;
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  for (const auto& [k, v] : options_) options[k] = v;
  manifest["options"] = options;
  manifest["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [role, path] : inputs_) {
    manifest["inputs"].push_back({{"role", role},
                                  {"path", path.string()},
                                  {"sha256", sha256_file(path)},
                                  {"bytes", fs::file_size(path)}});
  }
  manifest["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& name : artifacts_) {
    const fs::path p = staging_ / name;
    if (!fs::exists(p)) throw Error("artifact " + name + " was never written");
    manifest["artifacts"].push_back(
        {{"name", name}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
  }
  {
    std::ofstream m(staging_ / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << '\n';
    if (!m) throw Error("cannot write manifest");
  }
  for (const auto& name : artifacts_) {
    const fs::path dest = out_ / name;
    fs::create_directories(dest.parent_path());
    fs::rename(staging_ / name, dest);
  }
  fs::rename(staging_ / "manifest.json", out_ / "manifest.json");
  committed_ = true;
}

}  // namespace apguard::cli
