#pragma once

#include "hpe/quadratic_form.hpp"

namespace hpe {

/// B_k^m as a form on N_0^2 pairs: evaluate_form(b_mode_as_form(k, m), w)
/// equals b_mode(w, k, m). Throws std::invalid_argument when |k| > m.
QuadraticForm b_mode_as_form(const ModeIndex& k, int m);

/// Solution of L_theta H = B_k^m on the second chaos,
///   H_k^m = -sum_{h+l=k} w_h w_l (l . h^perp) / (h2^2 (|h|^{2t} + |l|^{2t}))
/// over h, l in (Z\{0})^2 with |h|, |l| <= m. Zero form when |k| > m.
QuadraticForm h_poisson(const ModeIndex& k, int m, const GeneratorParams& params);

/// max |L_theta H_k^m - B_k^m| over coefficients, relative to max |B_k^m|
/// (0 when B_k^m is the zero form). Outside the disk both sides vanish.
double poisson_residual(const ModeIndex& k, int m, const GeneratorParams& params);

/// E_mu[E_theta(H_k^m)] as a direct sum over h with k - h in (Z\{0})^2:
///   sum |h|^{2t} [ (k . h^perp)(1/h2^2 - 1/l2^2) / (|h|^{2t} + |l|^{2t}) ]^2.
/// Requires |k| <= m.
double expected_carre(const ModeIndex& k, int m, const GeneratorParams& params);

/// E_mu[E_theta(H_k^n - H_k^m)]: the same sum restricted to terms with
/// max(|h|, |l|) > m. Requires n > m and |k| <= m.
double expected_carre_increment(const ModeIndex& k, int n, int m, const GeneratorParams& params);

}  // namespace hpe
