#include "hpe_cli/manifest.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

#include "hpe/trajectory_io.hpp"

namespace hpe::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 init failed");
  }
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    if (is.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_files(const std::filesystem::path& dir,
                            const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) {
    const auto full = dir / p;
    files.push_back({p.generic_string(), std::filesystem::file_size(full), sha256_file(full)});
  }
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "hpe";
  j["version"] = tool_version;
  j["subcommand"] = subcommand;
  j["arguments"] = arguments;
  j["config"] = nlohmann::ordered_json::parse(sim_config_json(config));
  j["master_seed"] = config.master_seed;
  j["started"] = started;
  j["finished"] = finished;
  auto& inv = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    inv.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  return j.dump(2);
}

void RunManifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "manifest.json");
  if (!os) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  os << to_json() << '\n';
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw std::runtime_error("cannot read " + (dir / "manifest.json").string());
  const auto j = nlohmann::json::parse(is);
  std::vector<std::string> bad;
  for (const auto& f : j.at("files")) {
    const auto rel = f.at("path").get<std::string>();
    const auto full = dir / rel;
    if (!std::filesystem::exists(full) || sha256_file(full) != f.at("sha256").get<std::string>()) {
      bad.push_back(rel);
    }
  }
  return bad;
}

}  // namespace hpe::cli
