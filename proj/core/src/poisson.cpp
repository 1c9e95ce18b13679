#include "hpe/poisson.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hpe {

namespace {

// Calls fn(a, b, sign, kernel) for each h in (Z\{0})^2 with
// l = k - h in (Z\{0})^2 and |h|, |l| <= m; a = |h|, b = |l| componentwise,
// sign = sign(h1 h2) sign(l1 l2), kernel = (k . h^perp) / h2^2.
template <class Fn>
void for_each_interaction(const ModeIndex& k, int m, Fn&& fn) {
  const int k1 = k.k1();
  const int k2 = k.k2();
  for (int h1 = -m; h1 <= m; ++h1) {
    if (h1 == 0) continue;
    for (int h2 = -m; h2 <= m; ++h2) {
      if (h2 == 0 || !in_disk(h1, h2, m)) continue;
      const int l1 = k1 - h1;
      const int l2 = k2 - h2;
      if (l1 == 0 || l2 == 0 || !in_disk(l1, l2, m)) continue;
      const int sign = ((h1 > 0) == (h2 > 0) ? 1 : -1) * ((l1 > 0) == (l2 > 0) ? 1 : -1);
      const double kernel =
          static_cast<double>(-k1 * h2 + k2 * h1) / (static_cast<double>(h2) * h2);
      fn(ModeIndex(std::abs(h1), std::abs(h2)), ModeIndex(std::abs(l1), std::abs(l2)), sign,
         kernel);
    }
  }
}

// Adds the Z_0^2 pair term c * w_a * w_b to a form under the a<=b convention.
void add_pair_term(QuadraticForm& qf, const ModeIndex& a, const ModeIndex& b, double c) {
  qf.add(a, b, a == b ? c : 0.5 * c);
}

void require_in_cutoff(const char* what, const ModeIndex& k, int m) {
  if (!k.within(m)) {
    throw std::invalid_argument(std::string(what) + ": mode " + k.to_string() +
                                " exceeds cutoff m=" + std::to_string(m));
  }
}

double carre_sum(const ModeIndex& k, int n, int m_floor, const GeneratorParams& params) {
  const double t = params.theta;
  const double k1 = k.k1();
  const double k2 = k.k2();
  double acc = 0.0;
  for (int h1 = -n; h1 <= n; ++h1) {
    if (h1 == 0) continue;
    for (int h2 = -n; h2 <= n; ++h2) {
      if (h2 == 0 || !in_disk(h1, h2, n)) continue;
      const int l1 = k.k1() - h1;
      const int l2 = k.k2() - h2;
      if (l1 == 0 || l2 == 0 || !in_disk(l1, l2, n)) continue;
      if (m_floor > 0 && in_disk(h1, h2, m_floor) && in_disk(l1, l2, m_floor)) continue;
      const double lh = std::pow(static_cast<double>(h1 * h1 + h2 * h2), t);
      const double ll = std::pow(static_cast<double>(l1 * l1 + l2 * l2), t);
      const double kperp = -k1 * h2 + k2 * h1;
      const double g = kperp * (1.0 / (static_cast<double>(h2) * h2) -
                                1.0 / (static_cast<double>(l2) * l2)) /
                       (lh + ll);
      acc += lh * g * g;
    }
  }
  return acc;
}

}  // namespace

QuadraticForm b_mode_as_form(const ModeIndex& k, int m) {
  require_in_cutoff("b_mode_as_form", k, m);
  QuadraticForm qf(m);
  for_each_interaction(k, m,
                       [&](const ModeIndex& a, const ModeIndex& b, int sign, double kernel) { add_pair_term(qf, a, b, sign * kernel); });
  return qf;
}

QuadraticForm h_poisson(const ModeIndex& k, int m, const GeneratorParams& params) {
  params.validate();
  QuadraticForm qf(m);
  if (!k.within(m)) return qf;
  for_each_interaction(k, m,
                       [&](const ModeIndex& a, const ModeIndex& b, int sign, double kernel) {
                         const double denom = params.eigenvalue(a) + params.eigenvalue(b);
                         add_pair_term(qf, a, b, -sign * kernel / denom);
                       });
  return qf;
}

double poisson_residual(const ModeIndex& k, int m, const GeneratorParams& params) {
  const QuadraticForm lh = generator_apply(h_poisson(k, m, params), params);
  // pi_m B vanishes outside the disk, matching the zero Poisson solution there.
  const QuadraticForm b = k.within(m) ? b_mode_as_form(k, m) : QuadraticForm(m);
  const double scale = b.max_abs_coefficient();
  const double diff = max_coefficient_difference(lh, b);
  return scale > 0.0 ? diff / scale : diff;
}

double expected_carre(const ModeIndex& k, int m, const GeneratorParams& params) {
  params.validate();
  require_in_cutoff("expected_carre", k, m);
  return carre_sum(k, m, 0, params);
}

double expected_carre_increment(const ModeIndex& k, int n, int m, const GeneratorParams& params) {
  params.validate();
  if (n <= m) {
    throw std::invalid_argument("expected_carre_increment: need n > m, got n=" +
                                std::to_string(n) + ", m=" + std::to_string(m));
  }
  require_in_cutoff("expected_carre_increment", k, m);
  return carre_sum(k, n, m, params);
}

}  // namespace hpe
