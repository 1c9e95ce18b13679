#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "hpe/nonlinearity.hpp"
#include "hpe/quadratic_form.hpp"
#include "hpe/spectral_field.hpp"

namespace hpe {

enum class Scheme { exp_euler, splitting };

std::string_view to_string(Scheme scheme);
/// Throws std::invalid_argument for anything but "exp_euler" / "splitting".
Scheme parse_scheme(std::string_view text);

/// Galerkin system
///   d w_k = B^m_k(w) dt - |k|^{2 theta} w_k dt + sqrt(2) |k|^theta d beta_k,  |k| <= m.
struct SimConfig {
  double theta = 2.5;
  int m = 8;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t master_seed = 1;
  int ensemble = 1;
  Scheme scheme = Scheme::exp_euler;
  int record_stride = 1;
  bool fast_nonlinearity = false;

  /// Throws std::invalid_argument naming the offending field. T must be 0 or
  /// an integer multiple of dt (relative mismatch below 1e-9).
  void validate() const;
  /// round(T / dt)
  std::int64_t steps() const;
  NonlinearityMethod method() const {
    return fast_nonlinearity ? NonlinearityMethod::fast : NonlinearityMethod::direct;
  }
};

/// Independent standard normals for one step, dense m*m layout (zero outside
/// the disk). `second` is only used by the splitting scheme.
struct StepNoise {
  std::vector<double> first;
  std::vector<double> second;
};

/// Noise of step `step` for a replica seed; identical across cutoffs on the
/// common modes.
StepNoise step_noise(std::uint64_t replica_seed, std::int64_t step, int m);

/// phi_1(z) = (1 - e^{-z}) / z with phi_1(0) = 1.
double phi1(double z);

/// Exact OU transition w_k <- e^{-l dt} w_k + sqrt(1 - e^{-2 l dt}) xi_k,
/// l = |k|^{2 theta}. `noise` is a dense m*m array.
SpectralField ou_step(const SpectralField& field, double theta, double dt,
                      std::span<const double> noise);

/// One step of cfg.scheme. Throws std::invalid_argument if the field cutoff
/// differs from cfg.m.
SpectralField galerkin_step(const SpectralField& field, const SimConfig& cfg,
                            const StepNoise& noise);

/// Step-by-step integrator for one replica. Tracks, with left-endpoint sums at
/// the step dt,
///   G      = sum dt B^m(w_n)
///   G_mild = sum e^{-l (t - t_n)} dt B^m(w_n)
///   L      = -sum dt l w_n
/// and M = w - w_0 - L - G.
class GalerkinSimulator {
 public:
  GalerkinSimulator(const SimConfig& cfg, const SpectralField& initial,
                    std::uint64_t replica_seed);

  void step();

  std::int64_t step_index() const { return n_; }
  double time() const { return static_cast<double>(n_) * cfg_.dt; }
  int cutoff() const { return cfg_.m; }

  std::span<const double> state() const { return w_; }
  std::span<const double> initial() const { return w0_; }
  std::span<const double> G() const { return g_; }
  std::span<const double> G_mild() const { return gm_; }
  std::span<const double> L() const { return l_; }
  /// B^m at the current state, as used by the last step (valid after step()).
  std::span<const double> last_drift() const { return b_; }

  SpectralField state_field() const;
  SpectralField G_field() const;
  SpectralField G_mild_field() const;
  SpectralField L_field() const;
  SpectralField M_field() const;

 private:
  SimConfig cfg_;
  std::uint64_t seed_;
  std::int64_t n_ = 0;
  NonlinearityEvaluator eval_;
  std::vector<std::size_t> active_;  // dense indices inside the disk
  std::vector<double> lambda_;
  std::vector<double> decay_;       // e^{-l dt}
  std::vector<double> decay_half_;  // e^{-l dt / 2}
  std::vector<double> phi_dt_;      // phi_1(l dt) dt
  std::vector<double> amp_;         // sqrt(1 - e^{-2 l dt})
  std::vector<double> amp_half_;    // sqrt(1 - e^{-l dt})
  std::vector<double> w0_, w_, g_, gm_, l_, b_, tmp_;
};

struct Trajectory {
  double theta = 0.0;
  double dt = 0.0;
  int record_stride = 1;
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<SpectralField> G;
  std::vector<SpectralField> G_mild;
  std::vector<SpectralField> L;
  std::vector<SpectralField> M;
};

struct SampleMu {};
using InitialCondition = std::variant<SpectralField, SampleMu>;

/// Replica `replica` of cfg (seed rng::replica_seed(master_seed, replica)).
/// SampleMu draws the initial field from mu with the replica seed. States are
/// recorded every record_stride steps and at T.
Trajectory simulate(const SimConfig& cfg, const InitialCondition& initial,
                    std::size_t replica = 0);

/// cfg.ensemble replicas in parallel.
std::vector<Trajectory> simulate_ensemble(const SimConfig& cfg, const InitialCondition& initial,
                                          int threads = 0);

/// Sum over recorded intervals of (Delta <phi, M>)^2. Needs >= 2 recorded times.
double realized_qv(const Trajectory& traj, const SpectralField& phi);

/// 2 T sum_k |k|^{2 theta} phi_k^2
double expected_qv(const SpectralField& phi, double theta, double T);

/// States in reverse time order; the drift parts become
///   G~_t = -(G_T - G_{T-t}) (same for G_mild),  L~_t = L_T - L_{T-t},
/// and M~ = w~ - w~_0 - L~ - G~. Applying it twice returns the input (up to
/// rounding in the accumulators).
Trajectory reverse_trajectory(const Trajectory& traj);

/// Recomputes G and G_mild from recorded states with the same evaluator the
/// simulation used. Matches the trajectory exactly when record_stride = 1.
struct DriftReplay {
  std::vector<SpectralField> G;
  std::vector<SpectralField> G_mild;
};
DriftReplay replay_drift(const Trajectory& traj, NonlinearityMethod method);

struct ItoTrickResult {
  double moment = 0.0;   ///< E[sup_t |int_0^t L F ds|^p]
  double lp_norm = 0.0;  ///< moment^{1/p}
  double stderr_moment = 0.0;
  double rhs = 0.0;  ///< C_p sqrt(T) E_mu[|E(F)|^{p/2}]^{1/p}
  double c_p = 0.0;
  std::size_t replicas = 0;
};

/// Monte Carlo over cfg.ensemble stationary replicas (initial data from mu).
/// The time integral is a left-endpoint sum of evaluate_form(L F) at cfg.dt.
ItoTrickResult ito_trick_statistic(const SimConfig& cfg, const QuadraticForm& F, double p,
                                   int threads = 0);

}  // namespace hpe
