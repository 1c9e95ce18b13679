#include "hpe/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hpe {

namespace {

void require_cutoff(int m) {
  if (m < 1) {
    throw std::invalid_argument("cutoff must be >= 1, got " + std::to_string(m));
  }
}

}  // namespace

SpectralField::SpectralField(int m) : m_(m) {
  require_cutoff(m);
  coeffs_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
}

SpectralField::SpectralField(int m, std::vector<double> dense)
    : m_(m), coeffs_(std::move(dense)) {}

SpectralField SpectralField::from_dense(int m, std::vector<double> dense) {
  require_cutoff(m);
  if (dense.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m)) {
    throw std::invalid_argument("dense coefficient array has size " +
                                std::to_string(dense.size()) + ", expected m*m");
  }
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      const double c = dense[dense_index(m, k1, k2)];
      if (!std::isfinite(c)) {
        throw std::invalid_argument("non-finite coefficient at " +
                                    ModeIndex(k1, k2).to_string());
      }
      if (c != 0.0 && !in_disk(k1, k2, m)) {
        throw std::invalid_argument("coefficient at " + ModeIndex(k1, k2).to_string() +
                                    " lies outside |k| <= " + std::to_string(m));
      }
    }
  }
  return SpectralField(m, std::move(dense));
}

SpectralField make_field(int m, const ModeCoefficients& coeffs) {
  require_cutoff(m);
  std::vector<double> dense(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  for (const auto& [k, value] : coeffs) {
    if (!k.within(m)) {
      throw std::invalid_argument("mode " + k.to_string() + " exceeds cutoff m=" +
                                  std::to_string(m));
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("non-finite coefficient at " + k.to_string());
    }
    dense[dense_index(m, k.k1(), k.k2())] = value;
  }
  return SpectralField::from_dense(m, std::move(dense));
}

double extend_coefficient(const SpectralField& field, const SignedModeIndex& h) {
  return h.sign() * field.at(std::abs(h.h1()), std::abs(h.h2()));
}

SpectralField project(const SpectralField& field, int m_prime) {
  require_cutoff(m_prime);
  const int m = std::min(field.cutoff(), m_prime);
  std::vector<double> dense(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      if (in_disk(k1, k2, m)) dense[dense_index(m, k1, k2)] = field.at(k1, k2);
    }
  }
  return SpectralField::from_dense(m, std::move(dense));
}

double fl_norm(const SpectralField& field, const NormSpec& spec) {
  if (!(spec.p >= 1.0)) {
    throw std::invalid_argument("norm exponent p must be >= 1");
  }
  const int m = field.cutoff();
  const bool sup = std::isinf(spec.p);
  double acc = 0.0;
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      const double c = field.at(k1, k2);
      if (c == 0.0) continue;
      const double weight = std::pow(static_cast<double>(k1 * k1 + k2 * k2), 0.5 * spec.alpha);
      if (sup) {
        acc = std::max(acc, weight * std::abs(c));
      } else {
        acc += std::pow(weight * std::abs(c), spec.p);
      }
    }
  }
  return sup ? acc : std::pow(acc, 1.0 / spec.p);
}

SpectralField apply_A(const SpectralField& field) {
  const int m = field.cutoff();
  std::vector<double> dense(field.dense().begin(), field.dense().end());
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      dense[dense_index(m, k1, k2)] /= static_cast<double>(k2) * k2;
    }
  }
  return SpectralField::from_dense(m, std::move(dense));
}

SpectralField multiplier(const SpectralField& field, double s) {
  const int m = field.cutoff();
  std::vector<double> dense(field.dense().begin(), field.dense().end());
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      auto& c = dense[dense_index(m, k1, k2)];
      if (c != 0.0) c *= std::pow(static_cast<double>(k1 * k1 + k2 * k2), s);
    }
  }
  return SpectralField::from_dense(m, std::move(dense));
}

std::vector<PhysicalValue> evaluate_physical(const SpectralField& field,
                                             std::span<const PhysicalPoint> points) {
  const int m = field.cutoff();
  const auto modes = modes_within(m);
  std::vector<PhysicalValue> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    PhysicalValue val;
    for (const auto& k : modes) {
      const double c = field[k];
      if (c == 0.0) continue;
      const double k1 = k.k1();
      const double k2 = k.k2();
      const double sx = std::sin(k1 * p.x);
      const double cx = std::cos(k1 * p.x);
      const double sz = std::sin(k2 * p.z);
      const double cz = std::cos(k2 * p.z);
      val.omega += c * sx * sz;
      val.v -= c / k2 * sx * cz;
      val.w += c * k1 / (k2 * k2) * cx * sz;
    }
    val.omega *= std::numbers::inv_pi;
    val.v *= std::numbers::inv_pi;
    val.w *= std::numbers::inv_pi;
    out.push_back(val);
  }
  return out;
}

}  // namespace hpe
