#include "hpe/modes.hpp"

#include <cmath>
#include <stdexcept>

namespace hpe {

ModeIndex::ModeIndex(int k1, int k2) : k1_(k1), k2_(k2) {
  if (k1 < 1 || k2 < 1) {
    throw std::invalid_argument("mode index (" + std::to_string(k1) + "," +
                                std::to_string(k2) +
                                ") must have positive components");
  }
}

double ModeIndex::norm() const { return std::sqrt(static_cast<double>(norm2())); }

std::string ModeIndex::to_string() const {
  return "(" + std::to_string(k1_) + "," + std::to_string(k2_) + ")";
}

SignedModeIndex::SignedModeIndex(int h1, int h2) : h1_(h1), h2_(h2) {
  if (h1 == 0 || h2 == 0) {
    throw std::invalid_argument("signed mode index (" + std::to_string(h1) + "," +
                                std::to_string(h2) + ") has a zero component");
  }
}

ModeIndex SignedModeIndex::folded() const {
  return ModeIndex(std::abs(h1_), std::abs(h2_));
}

std::vector<ModeIndex> modes_within(int m) {
  std::vector<ModeIndex> out;
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (in_disk(k1, k2, m)) out.emplace_back(k1, k2);
    }
  }
  return out;
}

std::size_t mode_count(int m) {
  std::size_t n = 0;
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (in_disk(k1, k2, m)) ++n;
    }
  }
  return n;
}

}  // namespace hpe
