#include "hpe_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpe/dynamics.hpp"
#include "hpe/fit.hpp"
#include "hpe/format.hpp"
#include "hpe/measure.hpp"
#include "hpe/nonlinearity.hpp"
#include "hpe/poisson.hpp"
#include "hpe/snapshot.hpp"
#include "hpe/studies.hpp"
#include "hpe/trajectory_io.hpp"
#include "hpe_cli/config.hpp"
#include "hpe_cli/manifest.hpp"

namespace hpe::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPoissonTolerance = 1e-12;

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  double theta = 0.0;
  int m = 0;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int ensemble = 0;
  std::string scheme;
  int record_stride = 0;
  bool fast = false;
  int threads = 0;
  std::string out_dir;
  const CLI::App* chosen = nullptr;  // set after parsing

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "key: value config file");
    sub->add_option("--theta", theta, "dissipation exponent");
    sub->add_option("--m", m, "Galerkin cutoff");
    sub->add_option("--T", T, "time horizon");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--ensemble", ensemble, "number of replicas");
    sub->add_option("--scheme", scheme, "exp_euler or splitting");
    sub->add_option("--record-stride", record_stride, "steps per record");
    sub->add_flag("--fast", fast, "FFT nonlinearity");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    sub->add_option("--out-dir", out_dir, "output directory (else $OUT_DIR)");
  }

  bool given(const std::string& flag) const { return chosen->get_option(flag)->count() > 0; }

  SimConfig config() const {
    ConfigOverrides o;
    if (given("--theta")) o.theta = theta;
    if (given("--m")) o.m = m;
    if (given("--T")) o.T = T;
    if (given("--dt")) o.dt = dt;
    if (given("--seed")) o.seed = seed;
    if (given("--ensemble")) o.ensemble = ensemble;
    if (given("--scheme")) o.scheme = scheme;
    if (given("--record-stride")) o.record_stride = record_stride;
    o.fast = fast;
    std::optional<fs::path> file;
    if (given("--config")) file = config_path;
    return resolve_config(file, o);
  }

  fs::path output_dir() const {
    if (given("--out-dir")) return out_dir;
    if (const char* env = std::getenv("OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "hpe-out";
  }
};

struct Context {
  SimConfig cfg;
  fs::path dir;
  int threads;
  std::ostream& out;
  std::ostream& err;
  std::vector<fs::path> written;  // relative to dir

  std::ofstream open(const fs::path& rel) {
    const auto full = dir / rel;
    fs::create_directories(full.parent_path());
    std::ofstream os(full);
    if (!os) throw std::runtime_error("cannot write " + full.string());
    written.push_back(rel);
    return os;
  }

  void study(const fs::path& rel, const RateStudy& s) {
    open(rel / "study.csv") << study_csv(s);
    open(rel / "study.json") << study_json(s) << '\n';
    json plot;
    plot["file"] = "study.csv";
    plot["x"] = "axis";
    plot["x_label"] = s.axis_name;
    plot["y"] = "statistic";
    plot["error"] = "stderr";
    plot["log_x"] = true;
    plot["log_y"] = true;
    plot["reference_slope"] = s.target;
    open(rel / "plot.json") << plot.dump(2) << '\n';
    out << s.name << ": slope " << format_double(s.fit.slope) << " (target "
        << format_double(s.target) << ", r^2 " << format_double(s.fit.r_squared) << ") -> "
        << to_string(s.verdict) << '\n';
  }
};

json study_summary(const RateStudy& s) {
  return json::parse(study_json(s));
}

int verdict_exit(bool pass) { return pass ? kExitOk : kExitVerdict; }

std::vector<int> j_range(int lo, int hi, int m) {
  std::vector<int> js;
  for (int j = lo; j <= hi && in_disk(j, j, m); ++j) js.push_back(j);
  return js;
}

ModeIndex mode_from(const std::vector<int>& v) {
  if (v.size() != 2) throw ConfigError("--mode expects two integers k1,k2");
  try {
    return ModeIndex(v[0], v[1]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--mode: ") + e.what());
  }
}

CoupledOptions coupled(const Context& ctx, std::vector<int> m_values, int fast_from) {
  CoupledOptions o;
  o.cfg = ctx.cfg;
  o.m_values = std::move(m_values);
  o.fast_from_m = fast_from;
  o.threads = ctx.threads;
  return o;
}

// ---- subcommands -----------------------------------------------------------

int cmd_sample(Context& ctx, const std::string& out_file) {
  const auto ens = sample_ensemble(ctx.cfg.m, ctx.cfg.master_seed,
                                   static_cast<std::size_t>(ctx.cfg.ensemble), ctx.threads);
  if (!out_file.empty()) {
    save_snapshot(out_file, ens.fields().front());
    ctx.out << "wrote " << out_file << '\n';
    return kExitOk;
  }
  for (std::size_t r = 0; r < ens.size(); ++r) {
    auto os = ctx.open(fs::path("samples") / ("r" + std::to_string(r) + ".txt"));
    write_snapshot(os, ens.fields()[r]);
  }
  ctx.open("ensemble.json") << ensemble_manifest_json(ens) << '\n';
  ctx.out << "wrote " << ens.size() << " samples at m=" << ctx.cfg.m << '\n';
  return kExitOk;
}

int cmd_simulate(Context& ctx, int observe_m, const std::string& initial) {
  const int om = observe_m > 0 ? std::min(observe_m, ctx.cfg.m) : std::min(ctx.cfg.m, 4);
  InitialCondition ic = SampleMu{};
  if (!initial.empty()) ic = project(load_snapshot(initial), ctx.cfg.m);
  const auto trajs = simulate_ensemble(ctx.cfg, ic, ctx.threads);
  const auto paths = write_run_outputs(ctx.dir, trajs, modes_within(om));
  ctx.written.insert(ctx.written.end(), paths.begin(), paths.end());
  ctx.out << "simulated " << trajs.size() << " replicas, " << ctx.cfg.steps() << " steps\n";
  return kExitOk;
}

int cmd_invariance(Context& ctx, bool no_halve, double alpha) {
  const auto rep = invariance_check(ctx.cfg, !no_halve, ctx.threads, alpha);
  auto write_outcome = [&](const InvarianceOutcome& o, const std::string& name) {
    auto os = ctx.open(name);
    os << "mode_k1,mode_k2,mean,variance,ks_statistic,p_value\n";
    for (const auto& mm : o.marginals.modes) {
      os << mm.mode.k1() << ',' << mm.mode.k2() << ',' << format_double(mm.mean) << ','
         << format_double(mm.variance) << ',' << format_double(mm.ks_statistic) << ','
         << format_double(mm.p_value) << '\n';
    }
    return json{{"dt", o.dt},
                {"bonferroni_alpha", o.alpha},
                {"min_p_value", o.marginals.min_p_value()},
                {"ks_pass", o.ks_pass},
                {"max_variance_z", o.max_variance_z},
                {"variance_pass", o.variance_pass},
                {"pass", o.pass()}};
  };
  json j;
  j["primary"] = write_outcome(rep.primary, "marginals.csv");
  if (rep.halved) j["halved_dt"] = write_outcome(*rep.halved, "marginals_half_dt.csv");
  j["flipped"] = rep.flipped;
  if (!rep.warning.empty()) {
    j["warning"] = rep.warning;
    ctx.err << "warning: " << rep.warning << '\n';
  }
  j["verdict"] = rep.primary.pass() ? "pass" : "fail";
  ctx.open("invariance.json") << j.dump(2) << '\n';
  ctx.out << "invariance: min p " << format_double(rep.primary.marginals.min_p_value())
          << ", max variance z " << format_double(rep.primary.max_variance_z) << " -> "
          << (rep.primary.pass() ? "pass" : "fail") << '\n';
  return verdict_exit(rep.primary.pass());
}

int cmd_poisson(Context& ctx) {
  const GeneratorParams params{ctx.cfg.theta};
  auto os = ctx.open("poisson.csv");
  os << "k1,k2,m,theta,residual\n";
  double worst = 0.0;
  for (const auto& k : modes_within(ctx.cfg.m)) {
    const double r = poisson_residual(k, ctx.cfg.m, params);
    worst = std::max(worst, r);
    os << k.k1() << ',' << k.k2() << ',' << ctx.cfg.m << ',' << format_double(ctx.cfg.theta)
       << ',' << format_double(r) << '\n';
  }
  ctx.out << "poisson-check: max residual " << format_double(worst) << '\n';
  return verdict_exit(worst <= kPoissonTolerance);
}

int cmd_scaling(Context& ctx, int j_min, int j_max, const std::vector<int>& inc_m) {
  const GeneratorParams params{ctx.cfg.theta};
  const auto js = j_range(j_min, j_max, ctx.cfg.m);
  {
    auto os = ctx.open("scaling.csv");
    os << "k1,k2,m,theta,expected_carre\n";
    for (int j : js) {
      os << j << ',' << j << ',' << ctx.cfg.m << ',' << format_double(ctx.cfg.theta) << ','
         << format_double(expected_carre(ModeIndex(j, j), ctx.cfg.m, params)) << '\n';
    }
  }
  const auto carre = carre_scaling_study(ctx.cfg.theta, ctx.cfg.m, js);
  const auto inc = increment_scaling_study(ctx.cfg.theta, ModeIndex(1, 1), inc_m);
  ctx.study("carre", carre);
  ctx.study("increment", inc);
  return verdict_exit(carre.verdict != Verdict::fail && inc.verdict != Verdict::fail);
}

int cmd_converge(Context& ctx, const std::vector<int>& m_values, double zeta,
                 const std::vector<int>& mode, int fast_from) {
  const auto rep = g_convergence_study(coupled(ctx, m_values, fast_from), zeta, mode_from(mode));
  ctx.study("m_decay", rep.m_decay);
  ctx.study("weighted_sup", rep.zeta_decay);
  ctx.study("k_scaling", rep.k_scaling);
  json j;
  j["m_decay"] = study_summary(rep.m_decay);
  j["weighted_sup"] = study_summary(rep.zeta_decay);
  j["k_scaling"] = study_summary(rep.k_scaling);
  j["t_doubling"] = {{"ratio", rep.t_ratio},
                     {"stderr", rep.t_ratio_stderr},
                     {"target", std::sqrt(2.0)},
                     {"relative_tolerance", 0.25},
                     {"pass", rep.t_ratio_pass}};
  j["zeta"] = rep.zeta;
  j["zeta_note"] = rep.zeta_note;
  j["noise_checksums_verified"] = rep.noise_verified;
  j["verdict"] = to_string(rep.verdict());
  ctx.open("converge.json") << j.dump(2) << '\n';
  ctx.out << "T-doubling ratio " << format_double(rep.t_ratio) << " -> "
          << (rep.t_ratio_pass ? "pass" : "fail") << '\n';
  return verdict_exit(rep.verdict() != Verdict::fail);
}

int cmd_mild(Context& ctx, const std::vector<int>& m_values, double epsilon,
             const std::vector<int>& mode, int fast_from) {
  const auto rep =
      mild_convergence_study(coupled(ctx, m_values, fast_from), epsilon, mode_from(mode));
  ctx.study("k_scaling", rep.k_scaling);
  ctx.study("m_decay", rep.m_decay);
  ctx.study("holder", rep.holder);
  json j;
  j["k_scaling"] = study_summary(rep.k_scaling);
  j["m_decay"] = study_summary(rep.m_decay);
  j["holder"] = study_summary(rep.holder);
  j["epsilon"] = rep.epsilon;
  j["holder_threshold"] = 0.8 * rep.epsilon;
  j["noise_checksums_verified"] = rep.noise_verified;
  j["verdict"] = to_string(rep.verdict());
  ctx.open("mild_converge.json") << j.dump(2) << '\n';
  return verdict_exit(rep.verdict() != Verdict::fail);
}

int cmd_sum_lemma(Context& ctx, int cutoff, int j_min, int j_max) {
  std::vector<int> js;
  for (int j = j_min; j <= j_max; ++j) js.push_back(j);
  auto os = ctx.open("sum_lemma.csv");
  os << "k1,k2,theta,cutoff,value,last_shell,tail_flag\n";
  std::vector<double> values;
  for (int j : js) {
    const auto r = sum_lemma_eval(ModeIndex(j, j), ctx.cfg.theta, cutoff);
    os << j << ',' << j << ',' << format_double(ctx.cfg.theta) << ',' << cutoff << ','
       << format_double(r.value) << ',' << format_double(r.last_shell) << ','
       << (r.tail_flag ? 1 : 0) << '\n';
    if (r.tail_flag) ctx.err << "warning: tail flag at k=(" << j << "," << j << ")\n";
  }
  const auto s = sum_lemma_study(ctx.cfg.theta, js, cutoff);
  ctx.study("study", s);
  return verdict_exit(s.verdict != Verdict::fail);
}

int cmd_qv(Context& ctx, const std::vector<int>& mode, double tolerance) {
  const auto k = mode_from(mode);
  if (!k.within(ctx.cfg.m)) throw ConfigError("--mode lies outside the cutoff m");
  const auto phi = make_field(ctx.cfg.m, {{k, 1.0}});
  const auto trajs = simulate_ensemble(ctx.cfg, SampleMu{}, ctx.threads);
  const double target = expected_qv(phi, ctx.cfg.theta, ctx.cfg.T);
  auto os = ctx.open("qv.csv");
  os << "replica,forward_qv,backward_qv\n";
  double fwd = 0.0, bwd = 0.0;
  for (std::size_t r = 0; r < trajs.size(); ++r) {
    const double f = realized_qv(trajs[r], phi);
    const double b = realized_qv(reverse_trajectory(trajs[r]), phi);
    fwd += f;
    bwd += b;
    os << r << ',' << format_double(f) << ',' << format_double(b) << '\n';
  }
  fwd /= static_cast<double>(trajs.size());
  bwd /= static_cast<double>(trajs.size());
  const bool fwd_ok = std::abs(fwd / target - 1.0) <= tolerance;
  const bool bwd_ok = std::abs(bwd / fwd - 1.0) <= 0.15;
  json j;
  j["mode"] = {k.k1(), k.k2()};
  j["expected_qv"] = target;
  j["mean_forward_qv"] = fwd;
  j["mean_backward_qv"] = bwd;
  j["tolerance"] = tolerance;
  j["backward_tolerance"] = 0.15;
  j["verdict"] = fwd_ok && bwd_ok ? "pass" : "fail";
  ctx.open("qv.json") << j.dump(2) << '\n';
  ctx.out << "qv-check: forward " << format_double(fwd) << ", backward " << format_double(bwd)
          << ", expected " << format_double(target) << '\n';
  return verdict_exit(fwd_ok && bwd_ok);
}

int cmd_uniqueness(Context& ctx, const std::vector<int>& m_values, int fast_from) {
  const auto rep = uniqueness_window_check(ctx.cfg.theta, coupled(ctx, m_values, fast_from));
  json j;
  j["theta"] = rep.theta;
  j["window"] = {rep.window_low, rep.window_high};
  j["window_nonempty"] = rep.window_nonempty;
  j["ran"] = rep.ran;
  j["note"] = rep.note;
  if (rep.ran) {
    auto os = ctx.open("uniqueness.csv");
    os << "replica,m,statistic\n";
    for (std::size_t r = 0; r < rep.statistic.size(); ++r) {
      for (std::size_t i = 0; i < rep.m_values.size(); ++i) {
        os << r << ',' << rep.m_values[i] << ',' << format_double(rep.statistic[r][i]) << '\n';
      }
    }
    j["xi"] = rep.xi;
    j["m_values"] = rep.m_values;
    j["fraction_monotone"] = rep.fraction_monotone;
    j["required_fraction"] = 0.9;
    j["noise_checksums_verified"] = rep.noise_verified;
  }
  j["verdict"] = rep.ran ? (rep.pass ? "pass" : "fail") : "skipped";
  ctx.open("uniqueness.json") << j.dump(2) << '\n';
  ctx.out << "uniqueness-window: " << rep.note;
  if (rep.ran) ctx.out << ", monotone fraction " << format_double(rep.fraction_monotone);
  ctx.out << '\n';
  return verdict_exit(rep.pass);
}

int cmd_bench(Context& ctx, const std::vector<int>& m_values, int reps) {
  if (reps < 1) throw ConfigError("--reps must be >= 1");
  auto os = ctx.open("bench.csv");
  os << "m,method,wall_ns,checksum\n";
  for (int m : m_values) {
    if (m < 1) throw ConfigError("--m-values must be >= 1");
    const auto w = sample_mu(m, ctx.cfg.master_seed);
    for (auto method : {NonlinearityMethod::direct, NonlinearityMethod::fast}) {
      if (method == NonlinearityMethod::direct && m > 64) continue;
      NonlinearityEvaluator eval(m, method);
      std::vector<double> outv(w.dense().size());
      eval.apply(w.dense(), outv);
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < reps; ++r) eval.apply(w.dense(), outv);
      const auto ns = std::chrono::duration<double, std::nano>(
                          std::chrono::steady_clock::now() - t0).count() / reps;
      double checksum = 0.0;
      for (double v : outv) checksum += v;
      os << m << ',' << to_string(method) << ',' << static_cast<long long>(ns) << ','
         << format_double(checksum) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Galerkin simulator and verification toolkit", "hpe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HPE_VERSION);

  Common common;
  std::string sample_out;
  int observe_m = 0;
  std::string initial;
  bool no_halve = false;
  double alpha = 1e-3;
  int j_min = 2, j_max = 24, sum_j_max = 32, cutoff = 512, reps = 20, fast_from = 32;
  std::vector<int> inc_m{8, 16, 32, 64};
  std::vector<int> conv_m{4, 8, 16, 32};
  std::vector<int> uniq_m{8, 16, 32};
  std::vector<int> bench_m{8, 16, 32, 64};
  std::vector<int> mode{1, 1};
  double zeta = -2.5, epsilon = 0.25, tolerance = 0.1;

  std::map<std::string, std::function<int(Context&)>> handlers;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    common.attach(s);
    return s;
  };

  auto* s = sub("sample", "draw white-noise fields");
  s->add_option("--out", sample_out, "write the first sample to this snapshot file");
  handlers["sample"] = [&](Context& c) { return cmd_sample(c, sample_out); };

  s = sub("simulate", "run the Galerkin ensemble and record trajectories");
  s->add_option("--observe-m", observe_m, "record observables for |k| <= this (default 4)");
  s->add_option("--initial", initial, "initial snapshot (default: draw from mu)");
  handlers["simulate"] = [&](Context& c) { return cmd_simulate(c, observe_m, initial); };

  s = sub("invariance", "per-mode KS and variance test of mu at time T");
  s->add_flag("--no-halve", no_halve, "skip the dt/2 rerun");
  s->add_option("--alpha", alpha, "family-wise level before Bonferroni");
  handlers["invariance"] = [&](Context& c) { return cmd_invariance(c, no_halve, alpha); };

  sub("poisson-check", "residual of L H_k = B_k for every |k| <= m");
  handlers["poisson-check"] = [&](Context& c) { return cmd_poisson(c); };

  s = sub("scaling", "closed-form carre du champ and increment scaling");
  s->add_option("--j-min", j_min, "first diagonal index");
  s->add_option("--j-max", j_max, "last diagonal index");
  s->add_option("--increment-m", inc_m, "cutoffs for the increment study")->delimiter(',');
  handlers["scaling"] = [&](Context& c) { return cmd_scaling(c, j_min, j_max, inc_m); };

  s = sub("converge", "coupled G^m Cauchy-rate study");
  s->add_option("--m-values", conv_m, "cutoffs, each paired with 2m")->delimiter(',');
  s->add_option("--zeta", zeta, "weight exponent of the sup norm (< -1)");
  s->add_option("--mode", mode, "mode k1,k2")->delimiter(',');
  s->add_option("--fast-from", fast_from, "use the FFT path from this cutoff on");
  handlers["converge"] = [&](Context& c) { return cmd_converge(c, conv_m, zeta, mode, fast_from); };

  s = sub("mild-converge", "coupled mild-integral study");
  s->add_option("--m-values", conv_m, "cutoffs, each paired with 2m")->delimiter(',');
  s->add_option("--epsilon", epsilon, "Hoelder exponent under test");
  s->add_option("--mode", mode, "mode k1,k2")->delimiter(',');
  s->add_option("--fast-from", fast_from, "use the FFT path from this cutoff on");
  handlers["mild-converge"] = [&](Context& c) { return cmd_mild(c, conv_m, epsilon, mode, fast_from); };

  s = sub("sum-lemma", "comparison sum along the diagonal");
  s->add_option("--cutoff", cutoff, "summation radius");
  s->add_option("--j-min", j_min, "first diagonal index");
  s->add_option("--j-max", sum_j_max, "last diagonal index");
  handlers["sum-lemma"] = [&](Context& c) { return cmd_sum_lemma(c, cutoff, j_min, sum_j_max); };

  s = sub("qv-check", "realized quadratic variation of the martingale part");
  s->add_option("--mode", mode, "mode k1,k2")->delimiter(',');
  s->add_option("--tolerance", tolerance, "relative tolerance of the forward QV");
  handlers["qv-check"] = [&](Context& c) { return cmd_qv(c, mode, tolerance); };

  s = sub("uniqueness-window", "window (3, 2 theta - 3) and coupled contraction diagnostic");
  s->add_option("--m-values", uniq_m, "cutoffs, each paired with 2m")->delimiter(',');
  s->add_option("--fast-from", fast_from, "use the FFT path from this cutoff on");
  handlers["uniqueness-window"] = [&](Context& c) { return cmd_uniqueness(c, uniq_m, fast_from); };

  s = sub("bench", "time the table and FFT nonlinearity");
  s->add_option("--m-values", bench_m, "cutoffs")->delimiter(',');
  s->add_option("--reps", reps, "evaluations per timing");
  handlers["bench"] = [&](Context& c) { return cmd_bench(c, bench_m, reps); };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitConfig;
  }

  common.chosen = app.get_subcommands().front();
  const std::string name = common.chosen->get_name();
  try {
    Context ctx{common.config(), common.output_dir(), common.threads, out, err, {}};
    if (common.threads < 0) throw ConfigError("--threads must be >= 0");
    RunManifest manifest;
    manifest.subcommand = name;
    manifest.arguments = args;
    manifest.config = ctx.cfg;
    manifest.tool_version = HPE_VERSION;
    manifest.started = utc_timestamp();
    const int code = handlers.at(name)(ctx);
    if (!ctx.written.empty()) {
      manifest.finished = utc_timestamp();
      manifest.add_files(ctx.dir, ctx.written);
      manifest.write(ctx.dir);
    }
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace hpe::cli
