#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hpe/dynamics.hpp"

namespace hpe::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestFile {
  std::string path;  ///< relative to the output directory
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  SimConfig config;
  std::string tool_version;
  std::string started;  ///< UTC, ISO 8601
  std::string finished;
  std::vector<ManifestFile> files;

  /// Hashes every path (relative to dir) into `files`.
  void add_files(const std::filesystem::path& dir, const std::vector<std::filesystem::path>& paths);
  std::string to_json() const;
  void write(const std::filesystem::path& dir) const;
};

std::string utc_timestamp();

/// Recomputes every listed checksum from dir/manifest.json; returns the paths
/// that are missing or differ.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace hpe::cli
