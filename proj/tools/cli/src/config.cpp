#include "hpe_cli/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace hpe::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const char* type) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key '" + key + "': expected " + type + ", got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

void validate(const SimConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

SimConfig parse_config(std::istream& is, const std::string& source) {
  static const std::set<std::string> required{"theta", "m", "T", "dt", "seed", "ensemble"};
  static const std::set<std::string> optional{"scheme", "record_stride", "fast"};
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto sep = line.find_first_of(":=");
    if (sep == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key: value'");
    }
    const std::string key = trim(line.substr(0, sep));
    const std::string value = trim(line.substr(sep + 1));
    if (!required.contains(key) && !optional.contains(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
    if (!values.emplace(key, value).second) {
      throw ConfigError("config key '" + key + "' given more than once");
    }
  }
  for (const auto& key : required) {
    if (!values.contains(key)) throw ConfigError("config is missing required key '" + key + "'");
  }
  SimConfig cfg;
  cfg.theta = parse_number<double>("theta", values["theta"], "a real number");
  cfg.m = parse_number<int>("m", values["m"], "an integer");
  cfg.T = parse_number<double>("T", values["T"], "a real number");
  cfg.dt = parse_number<double>("dt", values["dt"], "a real number");
  cfg.master_seed = parse_number<std::uint64_t>("seed", values["seed"], "an unsigned integer");
  cfg.ensemble = parse_number<int>("ensemble", values["ensemble"], "an integer");
  if (values.contains("scheme")) {
    try {
      cfg.scheme = parse_scheme(values["scheme"]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'scheme': ") + e.what());
    }
  }
  if (values.contains("record_stride")) {
    cfg.record_stride = parse_number<int>("record_stride", values["record_stride"], "an integer");
  }
  if (values.contains("fast")) cfg.fast_nonlinearity = parse_bool("fast", values["fast"]);
  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  return parse_config(is, path.string());
}

SimConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const ConfigOverrides& o) {
  SimConfig cfg = file ? load_config(*file) : SimConfig{};
  if (o.theta) cfg.theta = *o.theta;
  if (o.m) cfg.m = *o.m;
  if (o.T) cfg.T = *o.T;
  if (o.dt) cfg.dt = *o.dt;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.ensemble) cfg.ensemble = *o.ensemble;
  if (o.record_stride) cfg.record_stride = *o.record_stride;
  if (o.scheme) {
    try {
      cfg.scheme = parse_scheme(*o.scheme);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--scheme: ") + e.what());
    }
  }
  if (o.fast) cfg.fast_nonlinearity = true;
  validate(cfg);
  return cfg;
}

}  // namespace hpe::cli
