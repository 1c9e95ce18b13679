#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "hpe/measure.hpp"
#include "hpe/nonlinearity.hpp"
#include "hpe/rng.hpp"

using namespace hpe;

namespace {

// Independent enumeration of the sum over h in [-m, m]^2 minus the axes.
double brute_force_b(const SpectralField& w, int k1, int k2, int m) {
  auto ext = [&](int a, int b) {
    if (a == 0 || b == 0) return 0.0;
    if (a * a + b * b > m * m) return 0.0;
    const double s = (a > 0) == (b > 0) ? 1.0 : -1.0;
    return s * w.at(std::abs(a), std::abs(b));
  };
  double acc = 0.0;
  for (int h1 = -m; h1 <= m; ++h1) {
    for (int h2 = -m; h2 <= m; ++h2) {
      const double wh = ext(h1, h2);
      const double wl = ext(k1 - h1, k2 - h2);
      if (wh == 0.0 || wl == 0.0) continue;
      acc += wh * wl * (-k1 * h2 + k2 * h1) / double(h2 * h2);
    }
  }
  return acc;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dense().size(); ++i) {
    d = std::max(d, std::abs(a.dense()[i] - b.dense()[i]));
  }
  return d;
}

// Projection of grad^perp A(w) . grad w onto e_k by trapezoid quadrature on a
// grid fine enough to integrate the cubic products exactly.
double physical_projection(const SpectralField& w, int k1, int k2, int n) {
  const int m = w.cutoff();
  const double h = 2.0 * std::numbers::pi / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = i * h;
      const double z = j * h;
      double wx = 0.0, wz = 0.0, v = 0.0, ww = 0.0;
      for (const auto& k : modes_within(m)) {
        const double c = w[k] / std::numbers::pi;
        const double a = k.k1(), b = k.k2();
        const double sx = std::sin(a * x), cx = std::cos(a * x);
        const double sz = std::sin(b * z), cz = std::cos(b * z);
        wx += c * a * cx * sz;
        wz += c * b * sx * cz;
        v -= c / b * sx * cz;
        ww += c * a / (b * b) * cx * sz;
      }
      const double ek = std::sin(k1 * x) * std::sin(k2 * z) / std::numbers::pi;
      acc += (v * wx + ww * wz) * ek;
    }
  }
  return acc * h * h;
}

}  // namespace

TEST_CASE("b_mode basic cases") {
  const SpectralField zero(6);
  for (const auto& k : modes_within(6)) CHECK(b_mode(zero, k, 6) == 0.0);

  const auto e11 = make_field(4, {{ModeIndex(1, 1), 1.0}});
  for (const auto& k : modes_within(4)) CHECK(b_mode(e11, k, 4) == 0.0);

  const auto two = make_field(4, {{ModeIndex(1, 1), 1.0}, {ModeIndex(2, 1), 1.0}});
  CHECK(b_mode(two, ModeIndex(1, 2), 4) == doctest::Approx(brute_force_b(two, 1, 2, 4)));

  CHECK_THROWS_AS(b_mode(two, ModeIndex(3, 3), 4), std::invalid_argument);
}

TEST_CASE("b_mode matches brute force on random fields") {
  for (int s = 0; s < 5; ++s) {
    const auto w = sample_mu(7, 40 + s);
    for (const auto& k : modes_within(7)) {
      CHECK(b_mode(w, k, 7) == doctest::Approx(brute_force_b(w, k.k1(), k.k2(), 7)).epsilon(1e-12));
    }
  }
}

TEST_CASE("b_truncated") {
  const auto w = sample_mu(10, 8);
  const auto a = b_truncated(w, 10);
  CHECK(a.method == NonlinearityMethod::direct);
  CHECK(a.cutoff == 10);
  CHECK(a.field == b_truncated(w, 10).field);
  CHECK(b_truncated(w, 1).field == SpectralField(1));

  // B^m only sees pi_m w.
  CHECK(b_truncated(w, 6).field == b_truncated(project(w, 6), 6).field);
}

TEST_CASE("enstrophy pairing vanishes") {
  for (int s = 0; s < 100; ++s) {
    const auto w = sample_mu(16, 1000 + s);
    const auto b = b_truncated(w, 16).field;
    const double scale = fl_norm(w, {}) * fl_norm(w, {}) * fl_norm(b, {});
    CHECK(std::abs(enstrophy_pairing(w, 16)) <= 1e-10 * scale);
  }
  CHECK(enstrophy_pairing(SpectralField(5), 5) == 0.0);
  const auto two = make_field(4, {{ModeIndex(1, 1), 1.0}, {ModeIndex(2, 1), 1.0}});
  CHECK(std::abs(enstrophy_pairing(two, 4)) < 1e-14);
}

TEST_CASE("physical-space oracle") {
  // B_k carries 4 pi times the L2 projection of grad^perp A(w) . grad w.
  for (int s = 0; s < 3; ++s) {
    const auto w = sample_mu(4, 300 + s);
    for (const auto& k : modes_within(4)) {
      const double phys = 4.0 * std::numbers::pi * physical_projection(w, k.k1(), k.k2(), 16);
      CHECK(b_mode(w, k, 4) == doctest::Approx(phys).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("skew symmetry of the transport operator under mu") {
  // G F = sum_i d_i F B_{k_i}; for F = w_a w_b and G = w_c:
  // E[F G G'] + E[G' G F] should vanish. Check F = w_(1,1) w_(1,2), G = w_(2,3).
  const int m = 6;
  const ModeIndex a(1, 1), b(1, 2), c(2, 3);
  const std::size_t n = 20000;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto w = sample_mu(m, rng::replica_seed(77, r));
    const auto bm = b_truncated(w, m).field;
    const double f = w[a] * w[b];
    const double g = w[c];
    const double gf = w[b] * bm[a] + w[a] * bm[b];
    const double gg = bm[c];
    const double x = f * gg + g * gf;
    mean += x;
    m2 += x * x;
  }
  mean /= double(n);
  const double se = std::sqrt((m2 / double(n) - mean * mean) / double(n));
  CHECK(std::abs(mean) <= 4.0 * se);
}

TEST_CASE("fast path equals direct sum") {
  CHECK(smooth_fft_size(25) == 25);
  CHECK(smooth_fft_size(97) == 98);
  CHECK(smooth_fft_size(11) == 12);
  CHECK(b_fast(SpectralField(8), 8).field == SpectralField(8));
  for (int m : {1, 2, 3, 8, 16}) {
    for (int s = 0; s < 3; ++s) {
      const auto w = sample_mu(m, 70 + s);
      const auto fast = b_fast(w, m);
      CHECK(fast.method == NonlinearityMethod::fast);
      CHECK(max_abs_diff(fast.field, b_truncated(w, m).field) <= 1e-10);
    }
  }
  for (int m : {32, 64}) {
    const auto w = sample_mu(m, 5);
    CHECK(max_abs_diff(b_fast(w, m).field, b_truncated(w, m).field) <= 1e-10);
  }
  CHECK_NOTHROW(verify_fast_path(12));
}

TEST_CASE("interaction table equals direct sum") {
  for (int m : {1, 5, 12}) {
    const auto w = sample_mu(m, 3);
    const InteractionTable table(m);
    std::vector<double> out(w.dense().size());
    table.apply(w.dense(), out);
    const auto direct = b_truncated(w, m).field;
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == doctest::Approx(direct.dense()[i]).epsilon(1e-12).scale(1.0));
    }
  }
  NonlinearityEvaluator ev(6, NonlinearityMethod::fast);
  std::vector<double> in(36, 0.0), out(36, 0.0);
  CHECK_THROWS_AS(ev.apply(std::span<const double>(in.data(), 35), out), std::invalid_argument);
}

TEST_CASE("fast path at m=128 beats direct at m=64") {
  using clock = std::chrono::steady_clock;
  const auto w64 = sample_mu(64, 1);
  const auto w128 = sample_mu(128, 1);
  auto t0 = clock::now();
  const auto direct = b_truncated(w64, 64);
  const auto t_direct = clock::now() - t0;
  t0 = clock::now();
  const auto fast = b_fast(w128, 128);
  const auto t_fast = clock::now() - t0;
  CHECK(t_fast < t_direct);
}
