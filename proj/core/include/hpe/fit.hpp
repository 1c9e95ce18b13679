#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hpe {

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
  double residual_max = 0.0;  ///< max |log y - fit| over the points
  double slope_stderr = 0.0;
  double slope_ci_low = 0.0;  ///< 95% Student-t band on the slope
  double slope_ci_high = 0.0;
};

/// Least squares of log y on log x. Throws std::invalid_argument on length
/// mismatch, fewer than 3 points or nonpositive values.
FitReport loglog_fit(std::span<const double> xs, std::span<const double> ys);

enum class Verdict { pass, inconclusive, fail };
std::string to_string(Verdict v);

inline constexpr double kExponentTolerance = 0.5;
inline constexpr double kMinRSquared = 0.9;
inline constexpr int kMinFitPoints = 4;

struct RateStudy {
  std::string name;
  std::string axis_name;
  std::vector<double> axis;
  std::vector<double> values;
  std::vector<double> stderrs;
  double target = 0.0;
  double tolerance = kExponentTolerance;
  FitReport fit;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

/// Fits and judges: fewer than kMinFitPoints points or r^2 < kMinRSquared is
/// inconclusive, otherwise pass iff |slope - target| <= tolerance. Throws if
/// the axis is not strictly increasing or a value is negative.
RateStudy make_rate_study(std::string name, std::string axis_name, std::vector<double> axis,
                          std::vector<double> values, std::vector<double> stderrs, double target,
                          double tolerance = kExponentTolerance);

/// study.csv (axis,statistic,stderr) and study.json (fit, verdict, tolerances).
std::string study_csv(const RateStudy& study);
std::string study_json(const RateStudy& study);
void write_study(const std::filesystem::path& dir, const RateStudy& study);

}  // namespace hpe
