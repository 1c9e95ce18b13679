#pragma once

#include <map>
#include <utility>

#include "hpe/spectral_field.hpp"

namespace hpe {

/// Second-chaos functional F(omega) = sum_{a<=b} Q_ab (2 - delta_ab) w_a w_b + c.
///
/// Q is stored once per unordered pair {a, b} (key with a <= b). As a matrix
/// it is symmetric, so the value is also omega^T Q omega + c with every
/// off-diagonal entry appearing twice. This is the only place the
/// multiplicity convention is fixed; everything else goes through add().
class QuadraticForm {
 public:
  using Key = std::pair<ModeIndex, ModeIndex>;

  explicit QuadraticForm(int m, double constant = 0.0);

  int cutoff() const { return m_; }
  double constant() const { return constant_; }
  void add_constant(double c) { constant_ += c; }

  /// Q_{ab} += v. Throws std::invalid_argument if |a| or |b| exceeds the cutoff.
  void add(const ModeIndex& a, const ModeIndex& b, double v);

  /// Q_{ab} (0 when absent), symmetric in a, b.
  double coefficient(const ModeIndex& a, const ModeIndex& b) const;

  const std::map<Key, double>& entries() const { return entries_; }
  double max_abs_coefficient() const;

  bool operator==(const QuadraticForm&) const = default;

 private:
  int m_;
  double constant_;
  std::map<Key, double> entries_;
};

struct GeneratorParams {
  double theta = 2.5;  ///< dissipation exponent, > 0; viscosity fixed to 1

  /// Throws std::invalid_argument unless theta > 0 and finite.
  void validate() const;
  /// |k|^{2 theta}
  double eigenvalue(const ModeIndex& k) const;
};

/// Throws std::invalid_argument if the field cutoff is below the form cutoff.
double evaluate_form(const QuadraticForm& qf, const SpectralField& field);

/// L_theta F: off-diagonal entries scale by -(|a|^{2t} + |b|^{2t}); diagonal
/// entries by -2|a|^{2t}, with 2|a|^{2t} Q_aa moved into the constant.
QuadraticForm generator_apply(const QuadraticForm& qf, const GeneratorParams& params);

/// E_theta(F, G) = sum_c |c|^{2t} (d_c F)(d_c G), d_c F = 2 sum_b Q_cb w_b.
QuadraticForm carre_du_champ(const QuadraticForm& f, const QuadraticForm& g,
                             const GeneratorParams& params);

/// Exact Gaussian moments under the white-noise measure.
double gaussian_mean(const QuadraticForm& f);
double gaussian_product_mean(const QuadraticForm& f, const QuadraticForm& g);
/// E_mu[E_theta(F, G)] = 4 sum_c |c|^{2t} sum_b Q_cb R_cb.
double expected_carre_du_champ(const QuadraticForm& f, const QuadraticForm& g,
                               const GeneratorParams& params);

/// max_{a<=b} |Q_ab - R_ab| together with the constants.
double max_coefficient_difference(const QuadraticForm& f, const QuadraticForm& g);

}  // namespace hpe
