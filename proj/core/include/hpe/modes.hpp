#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hpe {

/// Sine-basis wavenumber k = (k1, k2) with k1, k2 >= 1.
class ModeIndex {
 public:
  /// Throws std::invalid_argument unless both components are positive.
  ModeIndex(int k1, int k2);

  int k1() const { return k1_; }
  int k2() const { return k2_; }

  /// |k|^2 = k1^2 + k2^2
  std::int64_t norm2() const {
    return std::int64_t{k1_} * k1_ + std::int64_t{k2_} * k2_;
  }
  double norm() const;

  bool within(int m) const { return norm2() <= std::int64_t{m} * m; }

  std::string to_string() const;

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;

 private:
  int k1_;
  int k2_;
};

/// Index h in (Z \ {0})^2, used by the sign-extended convolution sums.
class SignedModeIndex {
 public:
  SignedModeIndex(int h1, int h2);

  int h1() const { return h1_; }
  int h2() const { return h2_; }
  std::int64_t norm2() const {
    return std::int64_t{h1_} * h1_ + std::int64_t{h2_} * h2_;
  }
  /// sign(h1 h2)
  int sign() const { return (h1_ > 0) == (h2_ > 0) ? 1 : -1; }
  /// (|h1|, |h2|)
  ModeIndex folded() const;

  friend auto operator<=>(const SignedModeIndex&, const SignedModeIndex&) = default;

 private:
  int h1_;
  int h2_;
};

/// All modes with |k| <= m, in k1-major order.
std::vector<ModeIndex> modes_within(int m);

/// Number of modes with |k| <= m.
std::size_t mode_count(int m);

/// Position of (k1, k2) in the dense [1..m] x [1..m] layout.
inline std::size_t dense_index(int m, int k1, int k2) {
  return static_cast<std::size_t>(k1 - 1) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(k2 - 1);
}

inline bool in_disk(int k1, int k2, int m) {
  return std::int64_t{k1} * k1 + std::int64_t{k2} * k2 <= std::int64_t{m} * m;
}

}  // namespace hpe
