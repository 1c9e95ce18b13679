#include "hpe/quadratic_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpe {

namespace {

// Full symmetric row view: row[c] = {(b, Q_cb)} for every b, both orderings.
using Rows = std::map<ModeIndex, std::vector<std::pair<ModeIndex, double>>>;

Rows rows_of(const QuadraticForm& f) {
  Rows rows;
  for (const auto& [key, q] : f.entries()) {
    rows[key.first].emplace_back(key.second, q);
    if (key.first != key.second) rows[key.second].emplace_back(key.first, q);
  }
  return rows;
}

}  // namespace

QuadraticForm::QuadraticForm(int m, double constant) : m_(m), constant_(constant) {
  if (m < 1) throw std::invalid_argument("QuadraticForm: cutoff must be >= 1");
}

void QuadraticForm::add(const ModeIndex& a, const ModeIndex& b, double v) {
  if (!a.within(m_) || !b.within(m_)) {
    throw std::invalid_argument("QuadraticForm: pair " + a.to_string() + "," + b.to_string() +
                                " exceeds cutoff m=" + std::to_string(m_));
  }
  if (v == 0.0) return;
  const Key key = a <= b ? Key{a, b} : Key{b, a};
  auto [it, inserted] = entries_.try_emplace(key, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0.0) entries_.erase(it);
  }
}

double QuadraticForm::coefficient(const ModeIndex& a, const ModeIndex& b) const {
  const Key key = a <= b ? Key{a, b} : Key{b, a};
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

double QuadraticForm::max_abs_coefficient() const {
  double out = 0.0;
  for (const auto& [key, q] : entries_) out = std::max(out, std::abs(q));
  return out;
}

void GeneratorParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("theta must be a positive finite number");
  }
}

double GeneratorParams::eigenvalue(const ModeIndex& k) const {
  return std::pow(static_cast<double>(k.norm2()), theta);
}

double evaluate_form(const QuadraticForm& qf, const SpectralField& field) {
  if (field.cutoff() < qf.cutoff()) {
    throw std::invalid_argument("evaluate_form: field cutoff " + std::to_string(field.cutoff()) +
                                " is below form cutoff " + std::to_string(qf.cutoff()));
  }
  double acc = qf.constant();
  for (const auto& [key, q] : qf.entries()) {
    const double mult = key.first == key.second ? 1.0 : 2.0;
    acc += mult * q * field[key.first] * field[key.second];
  }
  return acc;
}

QuadraticForm generator_apply(const QuadraticForm& qf, const GeneratorParams& params) {
  params.validate();
  QuadraticForm out(qf.cutoff(), qf.constant());
  for (const auto& [key, q] : qf.entries()) {
    const double la = params.eigenvalue(key.first);
    if (key.first == key.second) {
      out.add(key.first, key.second, -2.0 * la * q);
      out.add_constant(2.0 * la * q);
    } else {
      out.add(key.first, key.second, -(la + params.eigenvalue(key.second)) * q);
    }
  }
  // The constant of F is annihilated by L.
  out.add_constant(-qf.constant());
  return out;
}

QuadraticForm carre_du_champ(const QuadraticForm& f, const QuadraticForm& g,
                             const GeneratorParams& params) {
  params.validate();
  QuadraticForm out(std::max(f.cutoff(), g.cutoff()));
  const Rows rf = rows_of(f);
  const Rows rg = rows_of(g);
  std::vector<std::pair<ModeIndex, std::pair<double, double>>> row;
  for (const auto& [c, frow] : rf) {
    const auto git = rg.find(c);
    if (git == rg.end()) continue;
    const double w = 4.0 * params.eigenvalue(c);
    // Merge the two rows so each {b,d} entry is formed in an order that does
    // not depend on which argument is f and which is g.
    std::map<ModeIndex, std::pair<double, double>> merged;
    for (const auto& [b, q] : frow) merged[b].first = q;
    for (const auto& [b, r] : git->second) merged[b].second = r;
    row.assign(merged.begin(), merged.end());
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& [b, fb] = row[i];
      out.add(b, b, w * (fb.first * fb.second));
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        const auto& [d, fd] = row[j];
        out.add(b, d, 0.5 * w * (fb.first * fd.second + fd.first * fb.second));
      }
    }
  }
  return out;
}

double gaussian_mean(const QuadraticForm& f) {
  double acc = f.constant();
  for (const auto& [key, q] : f.entries()) {
    if (key.first == key.second) acc += q;
  }
  return acc;
}

double gaussian_product_mean(const QuadraticForm& f, const QuadraticForm& g) {
  // Wick: Cov(w^T Q w, w^T R w) = 2 tr(QR).
  double tr = 0.0;
  for (const auto& [key, q] : f.entries()) {
    const double r = g.coefficient(key.first, key.second);
    tr += (key.first == key.second ? 1.0 : 2.0) * q * r;
  }
  return gaussian_mean(f) * gaussian_mean(g) + 2.0 * tr;
}

double expected_carre_du_champ(const QuadraticForm& f, const QuadraticForm& g,
                               const GeneratorParams& params) {
  params.validate();
  double acc = 0.0;
  for (const auto& [key, q] : f.entries()) {
    const double r = g.coefficient(key.first, key.second);
    if (r == 0.0) continue;
    if (key.first == key.second) {
      acc += params.eigenvalue(key.first) * q * r;
    } else {
      acc += (params.eigenvalue(key.first) + params.eigenvalue(key.second)) * q * r;
    }
  }
  return 4.0 * acc;
}

double max_coefficient_difference(const QuadraticForm& f, const QuadraticForm& g) {
  double out = std::abs(f.constant() - g.constant());
  for (const auto& [key, q] : f.entries()) {
    out = std::max(out, std::abs(q - g.coefficient(key.first, key.second)));
  }
  for (const auto& [key, r] : g.entries()) {
    if (f.coefficient(key.first, key.second) == 0.0) out = std::max(out, std::abs(r));
  }
  return out;
}

}  // namespace hpe
