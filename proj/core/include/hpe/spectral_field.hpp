#pragma once

#include <limits>
#include <map>
#include <span>
#include <vector>

#include "hpe/modes.hpp"

namespace hpe {

using ModeCoefficients = std::map<ModeIndex, double>;

/// Real sine-basis field omega = sum_k omega_k e_k, e_k = sin(k1 x) sin(k2 z) / pi,
/// truncated to |k| <= m.
///
/// Coefficients live in a dense [1..m] x [1..m] array; entries outside the
/// disk |k| <= m are always zero. Lookups outside the stored set return 0.
class SpectralField {
 public:
  /// Zero field with cutoff m (m >= 1).
  explicit SpectralField(int m);

  /// Takes a dense m*m array in k1-major order. Rejects non-finite values and
  /// nonzero entries outside the disk.
  static SpectralField from_dense(int m, std::vector<double> dense);

  int cutoff() const { return m_; }

  double operator[](const ModeIndex& k) const { return at(k.k1(), k.k2()); }

  /// Coefficient at (k1, k2); zero for anything outside [1..m]^2 or the disk.
  double at(int k1, int k2) const {
    if (k1 < 1 || k2 < 1 || k1 > m_ || k2 > m_) return 0.0;
    return coeffs_[dense_index(m_, k1, k2)];
  }

  std::span<const double> dense() const { return coeffs_; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  SpectralField(int m, std::vector<double> dense);

  int m_;
  std::vector<double> coeffs_;
};

struct NormSpec {
  double p = 2.0;  ///< in [1, inf]
  double alpha = 0.0;

  static constexpr double infinity = std::numeric_limits<double>::infinity();
};

struct PhysicalPoint {
  double x = 0.0;
  double z = 0.0;
};

/// Vorticity and velocity (v, w) = grad^perp A(omega) at one point.
struct PhysicalValue {
  double omega = 0.0;
  double v = 0.0;
  double w = 0.0;
};

/// Validated construction; throws std::invalid_argument naming the offending
/// index or value.
SpectralField make_field(int m, const ModeCoefficients& coeffs);

/// sign(h1 h2) * omega_(|h1|,|h2|), zero when the folded index exceeds the cutoff.
double extend_coefficient(const SpectralField& field, const SignedModeIndex& h);

/// Projection pi_{m'}; the result has cutoff min(m, m').
SpectralField project(const SpectralField& field, int m_prime);

/// Fourier-Lebesgue norm (sum |k|^{alpha p} |omega_k|^p)^{1/p}, or
/// sup_k |k|^alpha |omega_k| for p = inf.
double fl_norm(const SpectralField& field, const NormSpec& spec);

/// Inverse of -d_z^2 with Dirichlet data in z: omega_k / k2^2.
SpectralField apply_A(const SpectralField& field);

/// Diagonal action of (-Laplacian)^s: omega_k |k|^{2s}.
SpectralField multiplier(const SpectralField& field, double s);

/// Direct series evaluation of omega, v = -d_z A(omega), w = d_x A(omega).
std::vector<PhysicalValue> evaluate_physical(const SpectralField& field,
                                             std::span<const PhysicalPoint> points);

}  // namespace hpe
