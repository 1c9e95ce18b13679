#include "hpe/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "hpe/format.hpp"

namespace hpe {

FitReport loglog_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("loglog_fit: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("loglog_fit: need at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("loglog_fit: values must be positive (point " +
                                  std::to_string(i) + ")");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_fit: all x values are equal");
  FitReport out;
  out.n_points = static_cast<int>(n);
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (out.intercept + out.slope * lx[i]);
    sse += r * r;
    out.residual_max = std::max(out.residual_max, std::abs(r));
  }
  out.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  out.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  out.slope_ci_low = out.slope - tq * out.slope_stderr;
  out.slope_ci_high = out.slope + tq * out.slope_stderr;
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

RateStudy make_rate_study(std::string name, std::string axis_name, std::vector<double> axis,
                          std::vector<double> values, std::vector<double> stderrs, double target,
                          double tolerance) {
  if (axis.size() != values.size()) throw std::invalid_argument("rate study: length mismatch");
  if (stderrs.empty()) stderrs.assign(values.size(), 0.0);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) throw std::invalid_argument("rate study: axis must increase");
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("rate study: values must be nonnegative");
  }
  RateStudy s;
  s.name = std::move(name);
  s.axis_name = std::move(axis_name);
  s.axis = std::move(axis);
  s.values = std::move(values);
  s.stderrs = std::move(stderrs);
  s.target = target;
  s.tolerance = tolerance;
  const bool positive = std::all_of(s.values.begin(), s.values.end(), [](double v) { return v > 0; });
  if (s.axis.size() < 3 || !positive) {
    s.verdict = Verdict::inconclusive;
    s.note = positive ? "fewer than 3 points" : "zero statistic, log-log fit undefined";
    return s;
  }
  s.fit = loglog_fit(s.axis, s.values);
  if (static_cast<int>(s.axis.size()) < kMinFitPoints) {
    s.verdict = Verdict::inconclusive;
    s.note = "fewer than " + std::to_string(kMinFitPoints) + " axis points";
  } else if (s.fit.r_squared < kMinRSquared) {
    s.verdict = Verdict::inconclusive;
    s.note = "r^2 below " + format_double(kMinRSquared);
  } else {
    s.verdict = std::abs(s.fit.slope - s.target) <= s.tolerance ? Verdict::pass : Verdict::fail;
  }
  return s;
}

std::string study_csv(const RateStudy& study) {
  std::ostringstream os;
  os << "axis,statistic,stderr\n";
  for (std::size_t i = 0; i < study.axis.size(); ++i) {
    os << format_double(study.axis[i]) << ',' << format_double(study.values[i]) << ','
       << format_double(study.stderrs[i]) << '\n';
  }
  return os.str();
}

std::string study_json(const RateStudy& study) {
  nlohmann::ordered_json j;
  j["name"] = study.name;
  j["axis_name"] = study.axis_name;
  j["fit"] = {{"slope", study.fit.slope},
              {"intercept", study.fit.intercept},
              {"r_squared", study.fit.r_squared},
              {"n_points", study.fit.n_points},
              {"residual_max", study.fit.residual_max},
              {"slope_stderr", study.fit.slope_stderr},
              {"slope_ci95", {study.fit.slope_ci_low, study.fit.slope_ci_high}}};
  j["target_slope"] = study.target;
  j["tolerances"] = {{"slope", study.tolerance},
                     {"min_r_squared", kMinRSquared},
                     {"min_points", kMinFitPoints}};
  j["verdict"] = to_string(study.verdict);
  if (!study.note.empty()) j["note"] = study.note;
  return j.dump(2);
}

void write_study(const std::filesystem::path& dir, const RateStudy& study) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "study.csv");
  std::ofstream json(dir / "study.json");
  if (!csv || !json) throw std::runtime_error("cannot write study files in " + dir.string());
  csv << study_csv(study);
  json << study_json(study) << '\n';
}

}  // namespace hpe
