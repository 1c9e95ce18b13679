#include <doctest.h>

#include <cmath>
#include <random>

#include "hpe/measure.hpp"
#include "hpe/nonlinearity.hpp"
#include "hpe/poisson.hpp"
#include "hpe/rng.hpp"

using namespace hpe;

namespace {

QuadraticForm random_form(int m, unsigned seed, int terms = 12) {
  std::mt19937 gen(seed);
  const auto modes = modes_within(m);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  std::normal_distribution<double> val;
  QuadraticForm qf(m, val(gen));
  for (int t = 0; t < terms; ++t) qf.add(modes[pick(gen)], modes[pick(gen)], val(gen));
  qf.add(modes[0], modes[0], val(gen));
  return qf;
}

// Full double sum over ordered pairs of the symmetric matrix.
double polynomial_oracle(const QuadraticForm& qf, const SpectralField& w) {
  const auto modes = modes_within(qf.cutoff());
  double acc = qf.constant();
  for (const auto& a : modes) {
    for (const auto& b : modes) acc += qf.coefficient(a, b) * w[a] * w[b];
  }
  return acc;
}

}  // namespace

TEST_CASE("evaluate_form") {
  QuadraticForm sq(2);
  sq.add(ModeIndex(1, 1), ModeIndex(1, 1), 1.0);
  CHECK(evaluate_form(sq, make_field(2, {{ModeIndex(1, 1), 3.0}})) == 9.0);

  const QuadraticForm c(4, 2.5);
  CHECK(evaluate_form(c, sample_mu(4, 1)) == 2.5);

  for (unsigned s = 0; s < 10; ++s) {
    const auto qf = random_form(3, s);
    const auto w = sample_mu(3, s);
    CHECK(evaluate_form(qf, w) == doctest::Approx(polynomial_oracle(qf, w)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(evaluate_form(QuadraticForm(5), SpectralField(4)), std::invalid_argument);
  CHECK_THROWS_AS(sq.add(ModeIndex(3, 3), ModeIndex(1, 1), 1.0), std::invalid_argument);
}

TEST_CASE("generator on the second chaos") {
  const GeneratorParams p{2.5};
  const ModeIndex a(1, 1), b(1, 2);
  QuadraticForm sq(3);
  sq.add(a, a, 1.0);
  const auto lsq = generator_apply(sq, p);
  CHECK(lsq.coefficient(a, a) == doctest::Approx(-2.0 * std::pow(2.0, 2.5)));
  CHECK(lsq.constant() == doctest::Approx(2.0 * std::pow(2.0, 2.5)));

  QuadraticForm cross(3);
  cross.add(a, b, 0.5);  // value w_a w_b
  const auto lc = generator_apply(cross, p);
  CHECK(lc.coefficient(a, b) == doctest::Approx(-(std::pow(2.0, 2.5) + std::pow(5.0, 2.5)) * 0.5));
  CHECK(lc.constant() == 0.0);

  for (unsigned s = 0; s < 20; ++s) {
    CHECK(std::abs(gaussian_mean(generator_apply(random_form(5, s), p))) < 1e-10);
  }

  // Monte Carlo agreement of E[L F] = 0 in a 4-sigma band.
  const auto f = random_form(4, 99);
  const auto lf = generator_apply(f, p);
  const std::size_t n = 4000;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double x = evaluate_form(lf, sample_mu(4, rng::replica_seed(3, r)));
    mean += x;
    m2 += x * x;
  }
  mean /= double(n);
  CHECK(std::abs(mean) <= 4.0 * std::sqrt((m2 / double(n) - mean * mean) / double(n)));

  CHECK_THROWS_AS(generator_apply(sq, GeneratorParams{0.0}), std::invalid_argument);
}

TEST_CASE("carre du champ") {
  const GeneratorParams p{2.5};
  const ModeIndex a(1, 1);
  QuadraticForm sq(3);
  sq.add(a, a, 1.0);
  const auto e = carre_du_champ(sq, sq, p);
  CHECK(e.coefficient(a, a) == doctest::Approx(4.0 * std::pow(2.0, 2.5)));
  CHECK(e.entries().size() == 1);

  for (unsigned s = 0; s < 10; ++s) {
    const auto f = random_form(5, s);
    const auto g = random_form(5, 100 + s);
    CHECK(carre_du_champ(f, g, p) == carre_du_champ(g, f, p));

    // Gaussian integration by parts in closed form.
    const double lhs = gaussian_product_mean(f, generator_apply(g, p));
    const double rhs = gaussian_mean(carre_du_champ(f, g, p));
    CHECK(lhs + rhs == doctest::Approx(0.0).scale(std::abs(rhs)).epsilon(1e-10));
    CHECK(expected_carre_du_champ(f, g, p) == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("closed-form moments agree with Monte Carlo") {
  const auto f = random_form(4, 5);
  const auto g = random_form(4, 6);
  const std::size_t n = 20000;
  double sf = 0.0, sfg = 0.0, sfg2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto w = sample_mu(4, rng::replica_seed(12, r));
    const double x = evaluate_form(f, w);
    const double y = evaluate_form(g, w);
    sf += x;
    sfg += x * y;
    sfg2 += x * y * x * y;
  }
  const double mfg = sfg / double(n);
  const double se = std::sqrt((sfg2 / double(n) - mfg * mfg) / double(n));
  CHECK(std::abs(mfg - gaussian_product_mean(f, g)) <= 4.0 * se);
}

TEST_CASE("B_k as a quadratic form") {
  const int m = 8;
  const auto modes = modes_within(m);
  std::vector<QuadraticForm> forms;
  for (const auto& k : modes) forms.push_back(b_mode_as_form(k, m));
  for (int s = 0; s < 50; ++s) {
    const auto w = sample_mu(m, 900 + s);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      CHECK(evaluate_form(forms[i], w) ==
            doctest::Approx(b_mode(w, modes[i], m)).epsilon(1e-12).scale(1.0));
    }
  }
  for (const auto& qf : forms) CHECK(gaussian_mean(qf) == 0.0);
  CHECK_THROWS_AS(b_mode_as_form(ModeIndex(6, 6), m), std::invalid_argument);
}

TEST_CASE("Poisson solution") {
  for (double theta : {2.25, 2.5, 3.0, 3.5}) {
    const GeneratorParams p{theta};
    for (const auto& k : modes_within(8)) CHECK(poisson_residual(k, 16, p) <= 1e-12);
  }
  for (int m = 1; m <= 10; ++m) {
    for (const auto& k : modes_within(m)) CHECK(poisson_residual(k, m, GeneratorParams{2.25}) <= 1e-12);
  }
  // No mode satisfies |k| <= 1, so both sides vanish at m=1.
  CHECK(poisson_residual(ModeIndex(1, 1), 1, {2.5}) == 0.0);
  CHECK(h_poisson(ModeIndex(1, 1), 1, {2.5}).entries().empty());

  CHECK(h_poisson(ModeIndex(5, 5), 6, {2.5}).entries().empty());

  const double c4 = h_poisson(ModeIndex(1, 1), 8, {4.0}).max_abs_coefficient();
  const double c8 = h_poisson(ModeIndex(1, 1), 8, {8.0}).max_abs_coefficient();
  CHECK(c8 > 0.0);
  CHECK(c8 <= std::pow(4.0, -4.0) * c4);
}

TEST_CASE("expected carre du champ of the Poisson solution") {
  const GeneratorParams p{2.5};
  // Direct sum against the form route.
  for (int m : {3, 6, 10}) {
    for (const auto& k : modes_within(m)) {
      const auto h = h_poisson(k, m, p);
      CHECK(expected_carre(k, m, p) ==
            doctest::Approx(expected_carre_du_champ(h, h, p)).epsilon(1e-11));
    }
  }

  // Monte Carlo over mu at k=(1,1), m=8.
  const ModeIndex k(1, 1);
  const auto h = h_poisson(k, 8, p);
  const auto e = carre_du_champ(h, h, p);
  const std::size_t n = 10000;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double x = evaluate_form(e, sample_mu(8, rng::replica_seed(44, r)));
    mean += x;
    m2 += x * x;
  }
  mean /= double(n);
  const double se = std::sqrt((m2 / double(n) - mean * mean) / double(n));
  CHECK(std::abs(mean - expected_carre(k, 8, p)) <= 4.0 * se);

  double prev = INFINITY;
  for (double theta = 2.1; theta < 4.0; theta += 0.25) {
    const double v = expected_carre(ModeIndex(2, 1), 12, {theta});
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("increment of the Poisson solution") {
  const GeneratorParams p{2.5};
  CHECK_THROWS_AS(expected_carre_increment(ModeIndex(1, 1), 8, 8, p), std::invalid_argument);
  for (int m : {4, 7}) {
    const ModeIndex k(1, 2);
    const double inc = expected_carre_increment(k, 2 * m, m, p);
    CHECK(inc >= 0.0);
    // The increment form H^n - H^m through the generic form route.
    auto diff = h_poisson(k, 2 * m, p);
    const auto low = h_poisson(k, m, p);
    for (const auto& [key, q] : low.entries()) diff.add(key.first, key.second, -q);
    CHECK(inc == doctest::Approx(expected_carre_du_champ(diff, diff, p)).epsilon(1e-10));
  }
}
