#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hpe/spectral_field.hpp"

namespace hpe {

/// Draw from the white-noise measure: every omega_k with |k| <= m is an
/// independent N(0,1), keyed by (seed, k).
SpectralField sample_mu(int m, std::uint64_t seed);

/// <f, g> = sum_k f_k g_k over the common support.
double coupling(const SpectralField& f, const SpectralField& g);

/// A set of fields sharing one cutoff, with the seed used for each replica.
class EnsembleSample {
 public:
  /// Throws std::invalid_argument on empty input, mixed cutoffs or a seed
  /// list whose length differs from the number of fields.
  EnsembleSample(std::vector<SpectralField> fields, std::vector<std::uint64_t> seeds,
                 std::uint64_t master_seed = 0);

  int cutoff() const { return fields_.front().cutoff(); }
  std::size_t size() const { return fields_.size(); }
  const std::vector<SpectralField>& fields() const { return fields_; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }
  std::uint64_t master_seed() const { return master_seed_; }

 private:
  std::vector<SpectralField> fields_;
  std::vector<std::uint64_t> seeds_;
  std::uint64_t master_seed_;
};

/// `size` replicas of sample_mu(m, replica_seed(master_seed, r)).
EnsembleSample sample_ensemble(int m, std::uint64_t master_seed, std::size_t size,
                               int threads = 0);

struct KsResult {
  double statistic = 0.0;
  /// Asymptotic Kolmogorov p-value; NaN when fewer than kKsMinSamples samples.
  double p_value = 0.0;
};

inline constexpr std::size_t kKsMinSamples = 100;

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sided one-sample KS test against N(0,1).
KsResult ks_test_standard_normal(std::span<const double> samples);

struct ModeMarginal {
  ModeIndex mode;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased sample variance
  double ks_statistic = 0.0;
  double p_value = 0.0;
};

struct MarginalReport {
  std::size_t ensemble_size = 0;
  std::vector<ModeMarginal> modes;
  bool p_values_valid = false;

  /// Fraction of modes whose p-value is below alpha.
  double fraction_below(double alpha) const;
  double min_p_value() const;
};

/// Per-mode marginal statistics over the ensemble (size >= 2).
MarginalReport marginal_stats(const EnsembleSample& ensemble);
MarginalReport marginal_stats(std::span<const SpectralField> fields);

/// {master_seed, m, size, replica_seeds[]}
std::string ensemble_manifest_json(const EnsembleSample& ensemble);
void write_ensemble_manifest(const std::filesystem::path& path, const EnsembleSample& ensemble);

}  // namespace hpe
