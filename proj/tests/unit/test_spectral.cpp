#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hpe/format.hpp"
#include "hpe/measure.hpp"
#include "hpe/snapshot.hpp"
#include "hpe/spectral_field.hpp"

using namespace hpe;

namespace {

SpectralField random_field(int m, std::uint64_t seed, double scale = 1.0) {
  auto f = sample_mu(m, seed);
  std::vector<double> d(f.dense().begin(), f.dense().end());
  for (auto& v : d) v *= scale;
  return SpectralField::from_dense(m, std::move(d));
}

// Periodic trapezoid rule on [0, 2pi]^2, exact for trigonometric polynomials
// of degree < n per axis.
template <class Fn>
double quad2(int n, Fn&& fn) {
  const double h = 2.0 * std::numbers::pi / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) acc += fn(i * h, j * h);
  }
  return acc * h * h;
}

}  // namespace

TEST_CASE("mode index validation") {
  CHECK_THROWS_AS(ModeIndex(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ModeIndex(1, -2), std::invalid_argument);
  CHECK_THROWS_AS(SignedModeIndex(0, 3), std::invalid_argument);
  CHECK(ModeIndex(3, 4).norm() == doctest::Approx(5.0));
  CHECK(ModeIndex(3, 4).within(5));
  CHECK_FALSE(ModeIndex(3, 4).within(4));
  CHECK(mode_count(1) == 0);
  CHECK(mode_count(2) == 1);
  CHECK(modes_within(3).size() == mode_count(3));
}

TEST_CASE("make_field") {
  const auto zero = make_field(4, {});
  for (double c : zero.dense()) CHECK(c == 0.0);

  const auto e11 = make_field(2, {{ModeIndex(1, 1), 1.0}});
  CHECK(e11[ModeIndex(1, 1)] == 1.0);
  CHECK(e11.at(7, 7) == 0.0);

  CHECK_THROWS_WITH_AS(make_field(2, {{ModeIndex(3, 3), 1.0}}),
                       doctest::Contains("(3,3)"), std::invalid_argument);
  CHECK_THROWS_AS(make_field(4, {{ModeIndex(1, 1), std::nan("")}}), std::invalid_argument);
  CHECK_THROWS_AS(make_field(4, {{ModeIndex(1, 1), INFINITY}}), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField(0), std::invalid_argument);
}

TEST_CASE("sign extension") {
  const auto f = make_field(4, {{ModeIndex(1, 2), 3.0}});
  CHECK(extend_coefficient(f, SignedModeIndex(-1, 2)) == -3.0);
  CHECK(extend_coefficient(f, SignedModeIndex(-1, -2)) == 3.0);
  CHECK(extend_coefficient(f, SignedModeIndex(5, 5)) == 0.0);

  const auto g = random_field(6, 11);
  for (int h1 = -7; h1 <= 7; ++h1) {
    for (int h2 = -7; h2 <= 7; ++h2) {
      if (h1 == 0 || h2 == 0) continue;
      const double e = extend_coefficient(g, SignedModeIndex(h1, h2));
      CHECK(extend_coefficient(g, SignedModeIndex(-h1, h2)) == -e);
      CHECK(extend_coefficient(g, SignedModeIndex(h1, -h2)) == -e);
    }
  }
}

TEST_CASE("projection") {
  const auto f = random_field(7, 3);
  CHECK(project(f, 7) == f);
  CHECK(project(f, 20) == f);

  const auto g = make_field(5, {{ModeIndex(1, 1), 1.0}, {ModeIndex(3, 3), 2.0}});
  const auto pg = project(g, 2);
  CHECK(pg.cutoff() == 2);
  CHECK(pg == make_field(2, {{ModeIndex(1, 1), 1.0}}));

  for (int s = 0; s < 100; ++s) {
    const auto r = random_field(9, 100 + s);
    const int mp = 1 + s % 9;
    CHECK(fl_norm(project(r, mp), {}) <= fl_norm(r, {}));
  }
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b <= 8; ++b) {
      CHECK(project(project(f, a), b) == project(f, std::min(a, b)));
    }
  }
}

TEST_CASE("Fourier-Lebesgue norms") {
  CHECK(fl_norm(make_field(2, {{ModeIndex(1, 1), 1.0}}), {2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(fl_norm(make_field(5, {{ModeIndex(3, 4), 2.0}}), {NormSpec::infinity, 1.0}) ==
        doctest::Approx(10.0));
  CHECK(fl_norm(make_field(3, {{ModeIndex(1, 1), 1.0}, {ModeIndex(1, 2), 1.0}}), {2.0, 1.0}) ==
        doctest::Approx(std::sqrt(7.0)));
  CHECK_THROWS_AS(fl_norm(make_field(3, {}), {0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("L2 norm matches physical quadrature") {
  const auto single = make_field(3, {{ModeIndex(2, 1), 1.5}});
  const auto five = make_field(4, {{ModeIndex(1, 1), 0.3},
                                   {ModeIndex(1, 3), -1.2},
                                   {ModeIndex(2, 2), 0.7},
                                   {ModeIndex(3, 1), 2.0},
                                   {ModeIndex(2, 3), -0.4}});
  for (const auto* f : {&single, &five}) {
    const double l2 = std::sqrt(quad2(24, [&](double x, double z) {
      const PhysicalPoint p{x, z};
      const double w = evaluate_physical(*f, std::span(&p, 1))[0].omega;
      return w * w;
    }));
    CHECK(l2 == doctest::Approx(fl_norm(*f, {})).epsilon(1e-12));
  }
}

TEST_CASE("operator A and multipliers") {
  CHECK(apply_A(make_field(3, {{ModeIndex(1, 2), 4.0}})) ==
        make_field(3, {{ModeIndex(1, 2), 1.0}}));
  CHECK(apply_A(make_field(4, {{ModeIndex(3, 1), 5.0}})) ==
        make_field(4, {{ModeIndex(3, 1), 5.0}}));

  const auto f = random_field(8, 5);
  const auto af = apply_A(f);
  for (const auto& k : modes_within(8)) {
    CHECK(af[k] * k.k2() * k.k2() == doctest::Approx(f[k]).epsilon(1e-14));
  }

  CHECK(multiplier(f, 0.0) == f);
  CHECK(multiplier(make_field(5, {{ModeIndex(3, 4), 1.0}}), 1.0)[ModeIndex(3, 4)] ==
        doctest::Approx(25.0));
  const auto back = multiplier(multiplier(f, 1.3), -1.3);
  for (const auto& k : modes_within(8)) CHECK(back[k] == doctest::Approx(f[k]).epsilon(1e-12));
}

TEST_CASE("physical reconstruction") {
  std::vector<PhysicalPoint> pts;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) pts.push_back({i * std::numbers::pi / 4, j * std::numbers::pi / 4});
  }
  for (const auto& v : evaluate_physical(make_field(4, {}), pts)) {
    CHECK(v.omega == 0.0);
    CHECK(v.v == 0.0);
    CHECK(v.w == 0.0);
  }

  const auto e11 = make_field(2, {{ModeIndex(1, 1), 1.0}});
  const PhysicalPoint mid{std::numbers::pi / 2, std::numbers::pi / 2};
  CHECK(std::abs(evaluate_physical(e11, std::span(&mid, 1))[0].v) < 1e-15);
  const PhysicalPoint q{0.3, 1.1};
  const auto val = evaluate_physical(e11, std::span(&q, 1))[0];
  CHECK(val.omega == doctest::Approx(std::sin(0.3) * std::sin(1.1) / std::numbers::pi));
  CHECK(val.v == doctest::Approx(-std::sin(0.3) * std::cos(1.1) / std::numbers::pi));
  CHECK(val.w == doctest::Approx(std::cos(0.3) * std::sin(1.1) / std::numbers::pi));

  const auto f = random_field(6, 21);
  std::vector<PhysicalPoint> boundary;
  for (int i = 0; i < 17; ++i) {
    boundary.push_back({i * 0.37, 0.0});
    boundary.push_back({i * 0.37, 2.0 * std::numbers::pi});
  }
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto v = evaluate_physical(f, std::span(&boundary[i], 1))[0];
    CHECK(std::abs(v.w) < 1e-12);
    if (boundary[i].z == 0.0) CHECK(std::abs(v.omega) < 1e-12);
  }

  // Zero vertical average of v.
  for (double x : {0.1, 1.7, 4.0}) {
    const int n = 32;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const PhysicalPoint p{x, 2.0 * std::numbers::pi * j / n};
      acc += evaluate_physical(f, std::span(&p, 1))[0].v;
    }
    CHECK(std::abs(acc * 2.0 * std::numbers::pi / n) < 1e-10);
  }
}

TEST_CASE("snapshot round trip and rejection") {
  const auto f = random_field(6, 77);
  std::stringstream ss;
  write_snapshot(ss, f);
  const auto g = read_snapshot(ss);
  CHECK(g == f);

  std::stringstream header_only("m=3 count=0\n");
  CHECK(read_snapshot(header_only) == SpectralField(3));

  for (const char* bad : {"m=3 count=1\n1 1\n", "m=3 count=1\n1 1 x\n", "m=3 count=1\n5 5 1.0\n",
                          "m=3 count=2\n1 1 1.0\n1 1 2.0\n", "m=3 count=2\n1 1 1.0\n",
                          "garbage\n", "m=3 count=1\n0 1 1.0\n"}) {
    std::stringstream in(bad);
    CHECK_THROWS_AS(read_snapshot(in), std::runtime_error);
  }
}

TEST_CASE("number formatting round trip") {
  for (double v : {0.0, -1.5, 1e-300, 3.141592653589793, 6.02214076e23}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_integer("+42") == 42);
  CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_integer(""), std::invalid_argument);
}
