#include "hpe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hpe/measure.hpp"
#include "hpe/parallel.hpp"
#include "hpe/rng.hpp"

namespace hpe {

namespace {

std::size_t dense_size(int m) { return static_cast<std::size_t>(m) * static_cast<std::size_t>(m); }

std::vector<double> fill_noise(std::uint64_t seed, rng::Stream stream, std::int64_t step, int m) {
  std::vector<double> out(dense_size(m), 0.0);
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (!in_disk(k1, k2, m)) continue;
      out[dense_index(m, k1, k2)] =
          rng::normal(seed, stream, static_cast<std::uint64_t>(step), k1, k2);
    }
  }
  return out;
}

double mode_eigenvalue(int k1, int k2, double theta) {
  return std::pow(static_cast<double>(k1 * k1 + k2 * k2), theta);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

// Quadratic form flattened onto dense indices for repeated evaluation.
struct DenseForm {
  std::vector<std::size_t> a, b;
  std::vector<double> c;
  double constant = 0.0;

  DenseForm(const QuadraticForm& qf, int m) : constant(qf.constant()) {
    for (const auto& [key, q] : qf.entries()) {
      a.push_back(dense_index(m, key.first.k1(), key.first.k2()));
      b.push_back(dense_index(m, key.second.k1(), key.second.k2()));
      c.push_back(key.first == key.second ? q : 2.0 * q);
    }
  }

  double operator()(std::span<const double> w) const {
    double acc = constant;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * w[a[i]] * w[b[i]];
    return acc;
  }
};

}  // namespace

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::exp_euler ? "exp_euler" : "splitting";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "exp_euler") return Scheme::exp_euler;
  if (text == "splitting") return Scheme::splitting;
  throw std::invalid_argument("scheme must be exp_euler or splitting, got '" + std::string(text) +
                              "'");
}

void SimConfig::validate() const {
  require_finite(theta, "theta");
  require_finite(T, "T");
  require_finite(dt, "dt");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (T < 0.0) throw std::invalid_argument("T must be >= 0");
  if (ensemble < 1) throw std::invalid_argument("ensemble must be >= 1");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (T > 0.0) {
    if (T < dt * (1.0 - 1e-9)) throw std::invalid_argument("T must be >= dt");
    const double n = std::round(T / dt);
    if (std::abs(n * dt - T) > 1e-9 * T) {
      throw std::invalid_argument("T must be an integer multiple of dt");
    }
  }
}

std::int64_t SimConfig::steps() const { return static_cast<std::int64_t>(std::llround(T / dt)); }

StepNoise step_noise(std::uint64_t replica_seed, std::int64_t step, int m) {
  return {fill_noise(replica_seed, rng::Stream::step, step, m),
          fill_noise(replica_seed, rng::Stream::step_second_half, step, m)};
}

double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 - z / 2.0 + z * z / 6.0;
  return -std::expm1(-z) / z;
}

SpectralField ou_step(const SpectralField& field, double theta, double dt,
                      std::span<const double> noise) {
  if (!(dt > 0.0)) throw std::invalid_argument("ou_step: dt must be > 0");
  const int m = field.cutoff();
  if (noise.size() != dense_size(m)) throw std::invalid_argument("ou_step: noise size mismatch");
  std::vector<double> out(field.dense().begin(), field.dense().end());
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (!in_disk(k1, k2, m)) continue;
      const auto i = dense_index(m, k1, k2);
      const double ldt = mode_eigenvalue(k1, k2, theta) * dt;
      out[i] = std::exp(-ldt) * out[i] + std::sqrt(-std::expm1(-2.0 * ldt)) * noise[i];
    }
  }
  return SpectralField::from_dense(m, std::move(out));
}

GalerkinSimulator::GalerkinSimulator(const SimConfig& cfg, const SpectralField& initial,
                                     std::uint64_t replica_seed)
    : cfg_(cfg), seed_(replica_seed), eval_((cfg.validate(), cfg.m), cfg.method()) {
  if (initial.cutoff() != cfg.m) {
    throw std::invalid_argument("initial field has cutoff " + std::to_string(initial.cutoff()) +
                                ", config has m=" + std::to_string(cfg.m));
  }
  const int m = cfg.m;
  const auto n = dense_size(m);
  for (auto* v : {&lambda_, &decay_, &decay_half_, &phi_dt_, &amp_, &amp_half_}) v->assign(n, 0.0);
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (!in_disk(k1, k2, m)) continue;
      const auto i = dense_index(m, k1, k2);
      active_.push_back(i);
      const double l = mode_eigenvalue(k1, k2, cfg.theta);
      const double ldt = l * cfg.dt;
      lambda_[i] = l;
      decay_[i] = std::exp(-ldt);
      decay_half_[i] = std::exp(-0.5 * ldt);
      phi_dt_[i] = phi1(ldt) * cfg.dt;
      amp_[i] = std::sqrt(-std::expm1(-2.0 * ldt));
      amp_half_[i] = std::sqrt(-std::expm1(-ldt));
    }
  }
  w0_.assign(initial.dense().begin(), initial.dense().end());
  w_ = w0_;
  g_.assign(n, 0.0);
  gm_.assign(n, 0.0);
  l_.assign(n, 0.0);
  b_.assign(n, 0.0);
  tmp_.assign(n, 0.0);
}

void GalerkinSimulator::step() {
  const int m = cfg_.m;
  const double dt = cfg_.dt;
  eval_.apply(w_, b_);
  for (const auto i : active_) {
    g_[i] += dt * b_[i];
    gm_[i] = decay_[i] * (gm_[i] + dt * b_[i]);
    l_[i] -= dt * lambda_[i] * w_[i];
  }
  const auto counter = static_cast<std::uint64_t>(n_);
  auto xi = [&](rng::Stream s, std::size_t i) {
    const int k1 = static_cast<int>(i / static_cast<std::size_t>(m)) + 1;
    const int k2 = static_cast<int>(i % static_cast<std::size_t>(m)) + 1;
    return rng::normal(seed_, s, counter, k1, k2);
  };
  if (cfg_.scheme == Scheme::exp_euler) {
    for (const auto i : active_) {
      w_[i] = decay_[i] * w_[i] + phi_dt_[i] * b_[i] + amp_[i] * xi(rng::Stream::step, i);
    }
  } else {
    for (const auto i : active_) {
      w_[i] = decay_half_[i] * w_[i] + amp_half_[i] * xi(rng::Stream::step, i);
    }
    eval_.apply(w_, tmp_);
    for (const auto i : active_) {
      const double drifted = w_[i] + dt * tmp_[i];
      w_[i] = decay_half_[i] * drifted + amp_half_[i] * xi(rng::Stream::step_second_half, i);
    }
  }
  ++n_;
}

SpectralField GalerkinSimulator::state_field() const {
  return SpectralField::from_dense(cfg_.m, w_);
}
SpectralField GalerkinSimulator::G_field() const { return SpectralField::from_dense(cfg_.m, g_); }
SpectralField GalerkinSimulator::G_mild_field() const {
  return SpectralField::from_dense(cfg_.m, gm_);
}
SpectralField GalerkinSimulator::L_field() const { return SpectralField::from_dense(cfg_.m, l_); }
SpectralField GalerkinSimulator::M_field() const {
  std::vector<double> out(w_.size(), 0.0);
  for (const auto i : active_) out[i] = w_[i] - w0_[i] - l_[i] - g_[i];
  return SpectralField::from_dense(cfg_.m, std::move(out));
}

SpectralField galerkin_step(const SpectralField& field, const SimConfig& cfg,
                            const StepNoise& noise) {
  if (field.cutoff() != cfg.m) {
    throw std::invalid_argument("galerkin_step: field cutoff " + std::to_string(field.cutoff()) +
                                " differs from m=" + std::to_string(cfg.m));
  }
  cfg.validate();
  const int m = cfg.m;
  if (noise.first.size() != dense_size(m) ||
      (cfg.scheme == Scheme::splitting && noise.second.size() != dense_size(m))) {
    throw std::invalid_argument("galerkin_step: noise size mismatch");
  }
  NonlinearityEvaluator eval(m, cfg.method());
  std::vector<double> w(field.dense().begin(), field.dense().end());
  std::vector<double> b(w.size(), 0.0);
  auto for_active = [&](auto&& fn) {
    for (int k1 = 1; k1 <= m; ++k1) {
      for (int k2 = 1; k2 <= m; ++k2) {
        if (in_disk(k1, k2, m)) fn(dense_index(m, k1, k2), mode_eigenvalue(k1, k2, cfg.theta));
      }
    }
  };
  const double dt = cfg.dt;
  if (cfg.scheme == Scheme::exp_euler) {
    eval.apply(w, b);
    for_active([&](std::size_t i, double l) {
      const double ldt = l * dt;
      w[i] = std::exp(-ldt) * w[i] + phi1(ldt) * dt * b[i] +
             std::sqrt(-std::expm1(-2.0 * ldt)) * noise.first[i];
    });
  } else {
    for_active([&](std::size_t i, double l) {
      const double ldt = l * dt;
      w[i] = std::exp(-0.5 * ldt) * w[i] + std::sqrt(-std::expm1(-ldt)) * noise.first[i];
    });
    eval.apply(w, b);
    for_active([&](std::size_t i, double l) {
      const double ldt = l * dt;
      w[i] = std::exp(-0.5 * ldt) * (w[i] + dt * b[i]) +
             std::sqrt(-std::expm1(-ldt)) * noise.second[i];
    });
  }
  return SpectralField::from_dense(m, std::move(w));
}

Trajectory simulate(const SimConfig& cfg, const InitialCondition& initial, std::size_t replica) {
  cfg.validate();
  const std::uint64_t seed = rng::replica_seed(cfg.master_seed, replica);
  const SpectralField w0 = std::holds_alternative<SampleMu>(initial)
                               ? sample_mu(cfg.m, seed)
                               : std::get<SpectralField>(initial);
  GalerkinSimulator sim(cfg, w0, seed);
  Trajectory traj;
  traj.theta = cfg.theta;
  traj.dt = cfg.dt;
  traj.record_stride = cfg.record_stride;
  auto record = [&] {
    traj.times.push_back(sim.time());
    traj.states.push_back(sim.state_field());
    traj.G.push_back(sim.G_field());
    traj.G_mild.push_back(sim.G_mild_field());
    traj.L.push_back(sim.L_field());
    traj.M.push_back(sim.M_field());
  };
  record();
  const std::int64_t steps = cfg.steps();
  for (std::int64_t n = 1; n <= steps; ++n) {
    sim.step();
    if (n % cfg.record_stride == 0 || n == steps) record();
  }
  return traj;
}

std::vector<Trajectory> simulate_ensemble(const SimConfig& cfg, const InitialCondition& initial,
                                          int threads) {
  cfg.validate();
  std::vector<Trajectory> out(static_cast<std::size_t>(cfg.ensemble));
  parallel_for(out.size(), threads, [&](std::size_t r) { out[r] = simulate(cfg, initial, r); });
  return out;
}

double realized_qv(const Trajectory& traj, const SpectralField& phi) {
  if (traj.M.size() < 2) throw std::invalid_argument("realized_qv: need >= 2 recorded times");
  double qv = 0.0;
  double prev = coupling(phi, traj.M.front());
  for (std::size_t i = 1; i < traj.M.size(); ++i) {
    const double cur = coupling(phi, traj.M[i]);
    qv += (cur - prev) * (cur - prev);
    prev = cur;
  }
  return qv;
}

double expected_qv(const SpectralField& phi, double theta, double T) {
  double acc = 0.0;
  for (const auto& k : modes_within(phi.cutoff())) {
    acc += std::pow(static_cast<double>(k.norm2()), theta) * phi[k] * phi[k];
  }
  return 2.0 * T * acc;
}

Trajectory reverse_trajectory(const Trajectory& traj) {
  Trajectory out;
  out.theta = traj.theta;
  out.dt = traj.dt;
  out.record_stride = traj.record_stride;
  const std::size_t n = traj.states.size();
  if (n == 0) return out;
  const int m = traj.states.front().cutoff();
  const double T = traj.times.back();
  auto combine = [&](const SpectralField& a, const SpectralField& b, double sa, double sb) {
    std::vector<double> d(a.dense().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = sa * a.dense()[i] + sb * b.dense()[i];
    return SpectralField::from_dense(m, std::move(d));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    out.times.push_back(T - traj.times[j]);
    out.states.push_back(traj.states[j]);
    // -(A_T - A_{T-t}) for the drift parts, +(L_T - L_{T-t}) for the linear part.
    out.G.push_back(combine(traj.G[j], traj.G.back(), 1.0, -1.0));
    out.G_mild.push_back(combine(traj.G_mild[j], traj.G_mild.back(), 1.0, -1.0));
    out.L.push_back(combine(traj.L.back(), traj.L[j], 1.0, -1.0));
  }
  out.times.front() = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(out.states[i].dense().size());
    for (std::size_t q = 0; q < d.size(); ++q) {
      d[q] = out.states[i].dense()[q] - out.states[0].dense()[q] - out.L[i].dense()[q] -
             out.G[i].dense()[q];
    }
    out.M.push_back(SpectralField::from_dense(m, std::move(d)));
  }
  return out;
}

DriftReplay replay_drift(const Trajectory& traj, NonlinearityMethod method) {
  DriftReplay out;
  if (traj.states.empty()) return out;
  const int m = traj.states.front().cutoff();
  NonlinearityEvaluator eval(m, method);
  std::vector<double> g(dense_size(m), 0.0), gm(dense_size(m), 0.0), b(dense_size(m), 0.0);
  std::vector<double> lambda(dense_size(m), 0.0);
  for (const auto& k : modes_within(m)) {
    lambda[dense_index(m, k.k1(), k.k2())] = mode_eigenvalue(k.k1(), k.k2(), traj.theta);
  }
  out.G.push_back(SpectralField(m));
  out.G_mild.push_back(SpectralField(m));
  for (std::size_t j = 1; j < traj.states.size(); ++j) {
    const auto steps = std::llround((traj.times[j] - traj.times[j - 1]) / traj.dt);
    const double h = static_cast<double>(steps) * traj.dt;
    eval.apply(traj.states[j - 1].dense(), b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (lambda[i] == 0.0) continue;
      g[i] += h * b[i];
      gm[i] = std::exp(-lambda[i] * h) * (gm[i] + h * b[i]);
    }
    out.G.push_back(SpectralField::from_dense(m, g));
    out.G_mild.push_back(SpectralField::from_dense(m, gm));
  }
  return out;
}

ItoTrickResult ito_trick_statistic(const SimConfig& cfg, const QuadraticForm& F, double p,
                                   int threads) {
  cfg.validate();
  if (!(p >= 1.0)) throw std::invalid_argument("ito_trick_statistic: p must be >= 1");
  if (F.cutoff() > cfg.m) {
    throw std::invalid_argument("ito_trick_statistic: form cutoff exceeds m");
  }
  const GeneratorParams params{cfg.theta};
  const DenseForm lf(generator_apply(F, params), cfg.m);

  const auto n = static_cast<std::size_t>(cfg.ensemble);
  std::vector<double> sup(n, 0.0);
  parallel_for(n, threads, [&](std::size_t r) {
    const std::uint64_t seed = rng::replica_seed(cfg.master_seed, r);
    GalerkinSimulator sim(cfg, sample_mu(cfg.m, seed), seed);
    double integral = 0.0;
    double best = 0.0;
    for (std::int64_t s = 0; s < cfg.steps(); ++s) {
      integral += cfg.dt * lf(sim.state());
      best = std::max(best, std::abs(integral));
      sim.step();
    }
    sup[r] = std::pow(best, p);
  });

  ItoTrickResult out;
  out.replicas = n;
  double mean = 0.0;
  for (double v : sup) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : sup) var += (v - mean) * (v - mean);
  out.moment = mean;
  out.lp_norm = std::pow(mean, 1.0 / p);
  out.stderr_moment = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n))
                            : 0.0;

  // E_mu[|E(F)|^{p/2}]: closed form at p = 2, Monte Carlo otherwise.
  const QuadraticForm carre = carre_du_champ(F, F, params);
  double carre_moment = 0.0;
  if (p == 2.0) {
    carre_moment = gaussian_mean(carre);
  } else {
    const DenseForm cf(carre, F.cutoff());
    const std::size_t samples = 4000;
    for (std::size_t s = 0; s < samples; ++s) {
      const auto w = sample_mu(F.cutoff(), rng::hash_key(cfg.master_seed, rng::Stream::test, s, 0));
      carre_moment += std::pow(std::abs(cf(w.dense())), p / 2.0);
    }
    carre_moment /= static_cast<double>(samples);
  }
  // Doob's L^p maximal constant p/(p-1); no such bound at p = 1.
  out.c_p = p > 1.0 ? p / (p - 1.0) : std::numeric_limits<double>::quiet_NaN();
  out.rhs = out.c_p * std::sqrt(cfg.T) * std::pow(carre_moment, 1.0 / p);
  return out;
}

}  // namespace hpe
