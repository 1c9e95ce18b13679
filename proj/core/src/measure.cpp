#include "hpe/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "hpe/parallel.hpp"
#include "hpe/rng.hpp"

namespace hpe {

SpectralField sample_mu(int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_mu: cutoff must be >= 1");
  std::vector<double> dense(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (in_disk(k1, k2, m)) {
        dense[dense_index(m, k1, k2)] = rng::normal(seed, rng::Stream::initial, 0, k1, k2);
      }
    }
  }
  return SpectralField::from_dense(m, std::move(dense));
}

double coupling(const SpectralField& f, const SpectralField& g) {
  const int m = std::min(f.cutoff(), g.cutoff());
  double acc = 0.0;
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) acc += f.at(k1, k2) * g.at(k1, k2);
  }
  return acc;
}

EnsembleSample::EnsembleSample(std::vector<SpectralField> fields,
                               std::vector<std::uint64_t> seeds, std::uint64_t master_seed)
    : fields_(std::move(fields)), seeds_(std::move(seeds)), master_seed_(master_seed) {
  if (fields_.empty()) throw std::invalid_argument("ensemble is empty");
  if (seeds_.size() != fields_.size()) {
    throw std::invalid_argument("ensemble has " + std::to_string(fields_.size()) +
                                " fields but " + std::to_string(seeds_.size()) + " seeds");
  }
  const int m = fields_.front().cutoff();
  for (const auto& f : fields_) {
    if (f.cutoff() != m) throw std::invalid_argument("ensemble members have different cutoffs");
  }
}

EnsembleSample sample_ensemble(int m, std::uint64_t master_seed, std::size_t size,
                               int threads) {
  if (size == 0) throw std::invalid_argument("ensemble size must be positive");
  std::vector<std::uint64_t> seeds(size);
  for (std::size_t r = 0; r < size; ++r) seeds[r] = rng::replica_seed(master_seed, r);
  std::vector<SpectralField> fields(size, SpectralField(m));
  parallel_for(size, threads, [&](std::size_t r) { fields[r] = sample_mu(m, seeds[r]); });
  return EnsembleSample(std::move(fields), std::move(seeds), master_seed);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small arguments.
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int j = 1; j <= 10; ++j) {
      const double odd = 2.0 * j - 1.0;
      cdf += std::exp(-odd * odd * a);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    q += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_test_standard_normal(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("KS test needs at least one sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / std::numbers::sqrt2);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  KsResult out;
  out.statistic = d;
  out.p_value = x.size() >= kKsMinSamples ? kolmogorov_survival(std::sqrt(n) * d)
                                          : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double MarginalReport::fraction_below(double alpha) const {
  if (modes.empty()) return 0.0;
  const auto hits = std::count_if(modes.begin(), modes.end(),
                                  [&](const ModeMarginal& mm) { return mm.p_value < alpha; });
  return static_cast<double>(hits) / static_cast<double>(modes.size());
}

double MarginalReport::min_p_value() const {
  double p = 1.0;
  for (const auto& mm : modes) p = std::min(p, mm.p_value);
  return p;
}

MarginalReport marginal_stats(std::span<const SpectralField> fields) {
  if (fields.empty()) throw std::invalid_argument("marginal_stats: empty ensemble");
  if (fields.size() < 2) throw std::invalid_argument("marginal_stats: ensemble size must be >= 2");
  const int m = fields.front().cutoff();
  for (const auto& f : fields) {
    if (f.cutoff() != m) throw std::invalid_argument("marginal_stats: mixed cutoffs");
  }
  MarginalReport report;
  report.ensemble_size = fields.size();
  report.p_values_valid = fields.size() >= kKsMinSamples;
  std::vector<double> column(fields.size());
  for (const auto& k : modes_within(m)) {
    for (std::size_t r = 0; r < fields.size(); ++r) column[r] = fields[r][k];
    // Shifted two-pass moments; constant columns give exactly zero variance.
    const double shift = column.front();
    double dmean = 0.0;
    for (double v : column) dmean += v - shift;
    dmean /= static_cast<double>(fields.size());
    const double mean = shift + dmean;
    double ss = 0.0;
    for (double v : column) ss += (v - shift - dmean) * (v - shift - dmean);
    const auto ks = ks_test_standard_normal(column);
    report.modes.push_back(ModeMarginal{k, mean, ss / static_cast<double>(fields.size() - 1),
                                        ks.statistic, ks.p_value});
  }
  return report;
}

MarginalReport marginal_stats(const EnsembleSample& ensemble) {
  return marginal_stats(std::span<const SpectralField>(ensemble.fields()));
}

std::string ensemble_manifest_json(const EnsembleSample& ensemble) {
  nlohmann::json j;
  j["master_seed"] = ensemble.master_seed();
  j["m"] = ensemble.cutoff();
  j["size"] = ensemble.size();
  j["replica_seeds"] = ensemble.seeds();
  return j.dump(2);
}

void write_ensemble_manifest(const std::filesystem::path& path, const EnsembleSample& ensemble) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << ensemble_manifest_json(ensemble) << '\n';
}

}  // namespace hpe
