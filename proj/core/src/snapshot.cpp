#include "hpe/snapshot.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpe/format.hpp"

namespace hpe {

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("snapshot line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

long long header_value(const std::string& tok, const std::string& key, std::size_t line_no) {
  if (tok.rfind(key + "=", 0) != 0) malformed(line_no, "expected '" + key + "=<int>'");
  try {
    return parse_integer(std::string_view(tok).substr(key.size() + 1));
  } catch (const std::invalid_argument&) {
    malformed(line_no, "bad value in '" + tok + "'");
  }
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& field) {
  const auto modes = modes_within(field.cutoff());
  os << "m=" << field.cutoff() << " count=" << modes.size() << '\n';
  for (const auto& k : modes) {
    os << k.k1() << ' ' << k.k2() << ' ' << format_double(field[k]) << '\n';
  }
}

SpectralField read_snapshot(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) malformed(line_no, "missing header");
  const auto head = tokens(line);
  if (head.size() != 2) malformed(line_no, "header must be 'm=<int> count=<int>'");
  const auto m = header_value(head[0], "m", line_no);
  const auto count = header_value(head[1], "count", line_no);
  if (m < 1) malformed(line_no, "cutoff must be >= 1");
  if (count < 0) malformed(line_no, "negative count");

  const int mi = static_cast<int>(m);
  std::vector<double> dense(static_cast<std::size_t>(m * m), 0.0);
  std::set<std::pair<long long, long long>> seen;
  long long read = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) malformed(line_no, "expected 'k1 k2 value'");
    long long k1 = 0, k2 = 0;
    double value = 0.0;
    try {
      k1 = parse_integer(tok[0]);
      k2 = parse_integer(tok[1]);
      value = parse_double(tok[2]);
    } catch (const std::invalid_argument& e) {
      malformed(line_no, e.what());
    }
    if (k1 < 1 || k2 < 1 || k1 > m || k2 > m || k1 * k1 + k2 * k2 > m * m) {
      malformed(line_no, "mode (" + tok[0] + "," + tok[1] + ") outside |k| <= " +
                             std::to_string(m));
    }
    if (!seen.emplace(k1, k2).second) malformed(line_no, "duplicate mode");
    dense[dense_index(mi, static_cast<int>(k1), static_cast<int>(k2))] = value;
    ++read;
  }
  if (read != count) {
    throw std::runtime_error("snapshot declares count=" + std::to_string(count) + " but has " +
                             std::to_string(read) + " entries");
  }
  try {
    return SpectralField::from_dense(mi, std::move(dense));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const SpectralField& field) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_snapshot(os, field);
}

SpectralField load_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_snapshot(is);
}

}  // namespace hpe
