#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "hpe/dynamics.hpp"

namespace hpe::cli {

/// Raised for anything wrong with user-supplied configuration; maps to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config file format: one `key: value` or `key = value` per line, `#` starts a
// comment. Required: theta, m, T, dt, seed, ensemble. Optional: scheme,
// record_stride, fast. Unknown and repeated keys are rejected.
SimConfig parse_config(std::istream& is, const std::string& source = "config");
SimConfig load_config(const std::filesystem::path& path);

/// Command-line values; each set field overrides the file.
struct ConfigOverrides {
  std::optional<double> theta;
  std::optional<int> m;
  std::optional<double> T;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> ensemble;
  std::optional<std::string> scheme;
  std::optional<int> record_stride;
  bool fast = false;
};

/// File (if given) or SimConfig defaults, then overrides, then validate().
/// Throws ConfigError.
SimConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const ConfigOverrides& overrides);

}  // namespace hpe::cli
