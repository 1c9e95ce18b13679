// Acceptance suite. `hpe_acceptance 4 7` runs criteria 4 and 7, no argument
// runs all of them. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hpe/dynamics.hpp"
#include "hpe/format.hpp"
#include "hpe/measure.hpp"
#include "hpe/nonlinearity.hpp"
#include "hpe/poisson.hpp"
#include "hpe/rng.hpp"
#include "hpe/studies.hpp"

using namespace hpe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string describe(const RateStudy& s) {
  return "slope " + fmt(s.fit.slope) + " target " + fmt(s.target) + " +/- " + fmt(s.tolerance) +
         ", r^2 " + fmt(s.fit.r_squared) + ", " + std::to_string(s.fit.n_points) + " points, " +
         to_string(s.verdict) + (s.note.empty() ? "" : " (" + s.note + ")");
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int j = lo; j <= hi; ++j) v.push_back(j);
  return v;
}

Outcome poisson_identity() {
  double worst = 0.0;
  int count = 0;
  for (double theta : {2.25, 3.5}) {
    const GeneratorParams params{theta};
    for (const auto& k : modes_within(8)) {
      worst = std::max(worst, poisson_residual(k, 16, params));
      ++count;
    }
  }
  return {worst <= 1e-12, "max relative residual " + fmt(worst) + " over " +
                              std::to_string(count) + " (mode, theta) pairs, bound 1e-12"};
}

Outcome enstrophy_pairing_vanishes() {
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto w = sample_mu(16, rng::replica_seed(2, i));
    const auto b = b_truncated(w, 16).field;
    const double scale = std::sqrt(coupling(w, w) * coupling(b, b));
    worst = std::max(worst, std::abs(coupling(w, b)) / scale);
  }
  return {worst <= 1e-10, "max |<w, B(w)>| / (|w| |B(w)|) " + fmt(worst) + ", bound 1e-10"};
}

Outcome fast_path_equivalence() {
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto w = sample_mu(32, rng::replica_seed(3, i));
    const auto d = b_truncated(w, 32).field;
    const auto f = b_fast(w, 32).field;
    for (const auto& k : modes_within(32)) worst = std::max(worst, std::abs(d[k] - f[k]));
  }
  return {worst <= 1e-10, "max per-mode deviation " + fmt(worst) + ", bound 1e-10"};
}

Outcome invariance() {
  SimConfig cfg;
  cfg.theta = 2.5;
  cfg.m = 8;
  cfg.T = 1.0;
  cfg.dt = 1e-3;
  cfg.ensemble = 2000;
  cfg.master_seed = 1;
  const auto rep = invariance_check(cfg, true);
  const auto& p = rep.primary;
  std::string detail = "min KS p " + fmt(p.marginals.min_p_value()) + " vs Bonferroni level " +
                       fmt(p.alpha) + ", max variance z " + fmt(p.max_variance_z) + " (bound 3)";
  if (rep.halved) {
    detail += "; at dt/2: min p " + fmt(rep.halved->marginals.min_p_value()) + ", max z " +
              fmt(rep.halved->max_variance_z);
  }
  if (!rep.warning.empty()) detail += "; warning: " + rep.warning;
  return {p.pass(), detail};
}

Outcome carre_scaling() {
  const auto s = carre_scaling_study(2.5, 128, range(2, 24));
  return {s.verdict == Verdict::pass, describe(s)};
}

Outcome increment_scaling() {
  const auto s = increment_scaling_study(2.5, ModeIndex(1, 1), {8, 16, 32, 64});
  return {s.verdict == Verdict::pass, describe(s)};
}

Outcome comparison_sum() {
  const auto s = sum_lemma_study(2.5, range(2, 32), 512);
  return {s.verdict == Verdict::pass, describe(s)};
}

Outcome g_cauchy_rate() {
  CoupledOptions o;
  o.cfg.theta = 2.75;
  o.cfg.T = 0.5;
  o.cfg.dt = 1e-3;
  o.cfg.ensemble = 500;
  o.cfg.master_seed = 1;
  o.m_values = {4, 8, 16, 32};
  const auto rep = g_convergence_study(o, -2.5);
  std::string detail = "m-decay: " + describe(rep.m_decay);
  for (std::size_t i = 0; i < rep.m_decay.values.size(); ++i) {
    detail += (i == 0 ? " [" : ", ") + fmt(rep.m_decay.values[i]);
  }
  detail += "]; T-doubling ratio " + fmt(rep.t_ratio) + " +/- " + fmt(rep.t_ratio_stderr) +
            " (sqrt 2 within 25%: " + (rep.t_ratio_pass ? "yes" : "no") + ")" +
            "; |k|-scaling (informational): " + describe(rep.k_scaling);
  return {rep.m_decay.verdict == Verdict::pass && rep.t_ratio_pass, detail};
}

Outcome quadratic_variation() {
  SimConfig cfg;
  cfg.theta = 2.5;
  cfg.m = 8;
  cfg.T = 1.0;
  cfg.dt = 1e-3;
  cfg.ensemble = 100;
  cfg.master_seed = 9;
  const auto phi = make_field(8, {{ModeIndex(1, 1), 1.0}});
  const auto trajs = simulate_ensemble(cfg, SampleMu{});
  double mean = 0.0;
  for (const auto& t : trajs) mean += realized_qv(t, phi);
  mean /= static_cast<double>(trajs.size());
  const double target = expected_qv(phi, cfg.theta, cfg.T);
  const double rel = std::abs(mean / target - 1.0);
  return {rel <= 0.1, "mean realized QV " + fmt(mean) + " vs " + fmt(target) + ", relative error " +
                          fmt(rel) + ", bound 0.1"};
}

QuadraticForm random_form(int m, std::mt19937& gen) {
  const auto modes = modes_within(m);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  std::normal_distribution<double> val;
  QuadraticForm qf(m, val(gen));
  for (int t = 0; t < 20; ++t) qf.add(modes[pick(gen)], modes[pick(gen)], val(gen));
  return qf;
}

Outcome gaussian_ibp() {
  std::mt19937 gen(10);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GeneratorParams params{std::uniform_real_distribution<double>(0.5, 4.0)(gen)};
    const auto f = random_form(8, gen);
    const auto g = random_form(8, gen);
    const double lhs = gaussian_product_mean(f, generator_apply(g, params));
    const double carre = expected_carre_du_champ(f, g, params);
    // Cauchy-Schwarz bound on |E[E(F, G)]|; pairs with disjoint support have
    // both sides at rounding level.
    const double scale = std::sqrt(expected_carre_du_champ(f, f, params) *
                                   expected_carre_du_champ(g, g, params));
    worst = std::max(worst, std::abs(lhs + carre) / scale);
  }
  return {worst <= 1e-10, "max |E[F LG] + E[E(F, G)]| / sqrt(E[E(F, F)] E[E(G, G)]) " + fmt(worst) +
                          " over 100 pairs, bound 1e-10"};
}

Outcome uniqueness_window() {
  CoupledOptions o;
  o.cfg.T = 0.5;
  o.cfg.dt = 1e-3;
  o.cfg.ensemble = 100;
  o.cfg.master_seed = 1;
  const auto run = uniqueness_window_check(3.5, o);
  const auto edge = uniqueness_window_check(3.0, o);
  std::string detail = "theta 3.5: window (" + fmt(run.window_low) + ", " +
                       fmt(run.window_high) + "), xi " + fmt(run.xi) + ", monotone fraction " +
                       fmt(run.fraction_monotone) + " (bound 0.9); theta 3: " +
                       (edge.window_nonempty ? "window reported nonempty" : edge.note);
  return {run.ran && run.pass && !edge.window_nonempty && !edge.ran, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> criteria{
      {1, {"exact Poisson identity", 10, poisson_identity}},
      {2, {"enstrophy pairing", 10, enstrophy_pairing_vanishes}},
      {3, {"fast-path equivalence", 30, fast_path_equivalence}},
      {4, {"invariance of mu", 600, invariance}},
      {5, {"carre du champ scaling", 60, carre_scaling}},
      {6, {"increment scaling", 60, increment_scaling}},
      {7, {"comparison-sum lemma", 60, comparison_sum}},
      {8, {"G^m Cauchy rate", 900, g_cauchy_rate}},
      {9, {"martingale quadratic variation", 120, quadratic_variation}},
      {10, {"Gaussian integration by parts", 5, gaussian_ibp}},
      {11, {"uniqueness-window diagnostic", 600, uniqueness_window}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }
  bool all_pass = true;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto& c = it->second;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = out.pass && in_budget;
    std::printf("criterion %d (%s): %s | %s | %.1f s of %.0f s budget%s\n", id, c.name.c_str(),
                pass ? "PASS" : "FAIL", out.detail.c_str(), secs, c.budget_s,
                in_budget ? "" : " (over budget)");
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
