#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "hpe/spectral_field.hpp"

namespace hpe {

enum class NonlinearityMethod { direct, fast };

std::string_view to_string(NonlinearityMethod method);

struct NonlinearityResult {
  SpectralField field;  ///< B^m(omega), cutoff m
  NonlinearityMethod method;
  int cutoff;
};

/// B_k(pi_m omega) = sum_{h} omega_h omega_{k-h} (k . h^perp) / h2^2 over
/// h, k-h in (Z\{0})^2 with |h|, |k-h| <= m and sign-extended coefficients.
/// Reference implementation; throws std::invalid_argument when |k| > m.
double b_mode(const SpectralField& field, const ModeIndex& k, int m);

/// B^m = pi_m B(pi_m omega) assembled mode by mode from b_mode. O(m^4).
NonlinearityResult b_truncated(const SpectralField& field, int m);

/// Same value as b_truncated through two zero-padded FFT convolutions.
NonlinearityResult b_fast(const SpectralField& field, int m);

/// <omega, B^m(omega)> on pi_m omega; vanishes identically.
double enstrophy_pairing(const SpectralField& field, int m);

/// B^m folded onto N_0^2 pairs: B_k = sum c * omega_a * omega_b, precomputed
/// once per cutoff. Evaluation cost equals the number of stored triples.
class InteractionTable {
 public:
  explicit InteractionTable(int m);

  int cutoff() const { return m_; }
  std::size_t size() const { return coeff_.size(); }

  /// `in` and `out` are dense m*m arrays (k1-major); `in` must vanish outside
  /// the disk.
  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  int m_;
  std::vector<std::uint32_t> row_offsets_;  // per output dense index
  std::vector<std::uint32_t> a_;
  std::vector<std::uint32_t> b_;
  std::vector<double> coeff_;
};

/// FFT implementation of B^m:
///   B_k = -k1 (E/h2 * E)_k + k2 (h1 E/h2^2 * E)_k
/// with E the sign-extended field on [-m, m]^2 and * a linear convolution,
/// computed on a periodic grid of size P >= 3m + 1 (no image of a retained
/// output k in [1, m]^2 lies inside the convolution support [-2m, 2m]).
/// Owns FFTW plans and buffers; one instance per thread.
class FastNonlinearity {
 public:
  explicit FastNonlinearity(int m);
  ~FastNonlinearity();
  FastNonlinearity(FastNonlinearity&&) noexcept;
  FastNonlinearity& operator=(FastNonlinearity&&) noexcept;
  FastNonlinearity(const FastNonlinearity&) = delete;
  FastNonlinearity& operator=(const FastNonlinearity&) = delete;

  int cutoff() const;
  int grid_size() const;

  void apply(std::span<const double> in, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Smallest n >= target whose only prime factors are 2, 3, 5, 7.
int smooth_fft_size(int target);

/// Checks b_fast against b_truncated on one white-noise sample at cutoff m
/// (max abs deviation <= max(1e-10, 1e-14 max|B|)). Throws std::runtime_error
/// on mismatch.
/// Results are cached per cutoff for the lifetime of the process.
void verify_fast_path(int m);

/// Dispatches to InteractionTable (direct) or FastNonlinearity (fast).
class NonlinearityEvaluator {
 public:
  NonlinearityEvaluator(int m, NonlinearityMethod method);
  ~NonlinearityEvaluator();
  NonlinearityEvaluator(NonlinearityEvaluator&&) noexcept;
  NonlinearityEvaluator& operator=(NonlinearityEvaluator&&) noexcept;

  int cutoff() const { return m_; }
  NonlinearityMethod method() const { return method_; }

  void apply(std::span<const double> in, std::span<double> out);

 private:
  int m_;
  NonlinearityMethod method_;
  std::shared_ptr<const InteractionTable> table_;
  std::unique_ptr<FastNonlinearity> fast_;
};

/// Shared, lazily built interaction table for cutoff m.
std::shared_ptr<const InteractionTable> shared_interaction_table(int m);

}  // namespace hpe
