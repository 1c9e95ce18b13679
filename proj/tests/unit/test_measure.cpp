#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "hpe/measure.hpp"
#include "hpe/rng.hpp"

using namespace hpe;

TEST_CASE("sample_mu is deterministic per seed") {
  CHECK(sample_mu(12, 42) == sample_mu(12, 42));
  CHECK_FALSE(sample_mu(12, 42) == sample_mu(12, 43));
  // Keyed by (seed, k): the same mode has the same value at every cutoff.
  const auto small = sample_mu(5, 9);
  const auto large = sample_mu(16, 9);
  for (const auto& k : modes_within(5)) CHECK(small[k] == large[k]);
}

TEST_CASE("white-noise moments at m=16") {
  const std::size_t n = 10000;
  const auto ens = sample_ensemble(16, 2024, n, 1);
  const auto report = marginal_stats(ens);
  CHECK(report.ensemble_size == n);
  CHECK(report.p_values_valid);
  for (const auto& mm : report.modes) {
    CHECK(std::abs(mm.mean) <= 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(mm.variance - 1.0) <= 4.0 * std::sqrt(2.0 / double(n)));
  }
}

TEST_CASE("coupling") {
  const auto w = sample_mu(6, 1);
  CHECK(coupling(w, SpectralField(6)) == 0.0);
  const auto e11 = make_field(2, {{ModeIndex(1, 1), 1.0}});
  CHECK(coupling(e11, e11) == 1.0);

  // E[<chi,f><chi,g>] = <f,g>.
  const auto f = sample_mu(8, 500);
  const auto g = sample_mu(8, 501);
  const std::size_t n = 10000;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto chi = sample_mu(8, rng::replica_seed(7, r));
    const double x = coupling(chi, f) * coupling(chi, g);
    mean += x;
    m2 += x * x;
  }
  mean /= double(n);
  const double se = std::sqrt((m2 / double(n) - mean * mean) / double(n));
  CHECK(std::abs(mean - coupling(f, g)) <= 4.0 * se);
}

TEST_CASE("KS null distribution") {
  const auto report = marginal_stats(sample_ensemble(8, 99, 2000, 1));
  CHECK(report.fraction_below(0.01) <= 0.03);
  for (const auto& mm : report.modes) {
    CHECK(mm.ks_statistic >= 0.0);
    CHECK(mm.ks_statistic <= 1.0);
  }
}

TEST_CASE("degenerate ensembles") {
  std::vector<SpectralField> zeros(200, SpectralField(4));
  const auto rz = marginal_stats(zeros);
  for (const auto& mm : rz.modes) {
    CHECK(mm.variance == 0.0);
    CHECK(mm.ks_statistic == doctest::Approx(0.5));
  }
  const auto w = sample_mu(4, 3);
  std::vector<SpectralField> dup(3, w);
  for (const auto& mm : marginal_stats(dup).modes) CHECK(mm.variance == 0.0);
  CHECK_FALSE(marginal_stats(dup).p_values_valid);

  CHECK_THROWS_AS(marginal_stats(std::span<const SpectralField>{}), std::invalid_argument);
  CHECK_THROWS_AS(marginal_stats(std::vector<SpectralField>{w}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSample({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSample({w, w}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleSample({w, sample_mu(5, 1)}, {1, 2}), std::invalid_argument);
}

TEST_CASE("replica independence and projective consistency") {
  const std::size_t n = 4000;
  const auto ens = sample_ensemble(6, 31, n, 1);
  const ModeIndex a(1, 1);
  const ModeIndex b(2, 3);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (const auto& f : ens.fields()) {
    sab += f[a] * f[b];
    saa += f[a] * f[a];
    sbb += f[b] * f[b];
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) <= 4.0 / std::sqrt(double(n)));

  // Consecutive replicas are uncorrelated in the same mode.
  double lag = 0.0;
  for (std::size_t r = 1; r < n; ++r) lag += ens.fields()[r][a] * ens.fields()[r - 1][a];
  CHECK(std::abs(lag / saa) <= 4.0 / std::sqrt(double(n)));

  // Low modes pooled from a large cutoff pass the same KS test.
  std::vector<double> pooled;
  for (std::size_t r = 0; r < 300; ++r) {
    const auto f = project(sample_mu(20, rng::replica_seed(5, r)), 3);
    for (const auto& k : modes_within(3)) pooled.push_back(f[k]);
  }
  CHECK(ks_test_standard_normal(pooled).p_value > 0.001);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_survival(1.63) == doctest::Approx(0.0098).epsilon(0.02));
  // Both branches agree at the switch point.
  CHECK(kolmogorov_survival(1.1799999) == doctest::Approx(kolmogorov_survival(1.18)));
}

TEST_CASE("ensemble manifest") {
  const auto ens = sample_ensemble(3, 17, 4, 1);
  const auto j = nlohmann::json::parse(ensemble_manifest_json(ens));
  CHECK(j["master_seed"] == 17);
  CHECK(j["m"] == 3);
  CHECK(j["size"] == 4);
  CHECK(j["replica_seeds"].size() == 4);
  CHECK(j["replica_seeds"][2] == ens.seeds()[2]);
}
