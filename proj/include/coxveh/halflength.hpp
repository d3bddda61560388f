#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "coxveh/quadrature.hpp"
#include "coxveh/rng.hpp"

namespace coxveh {

// Distribution of stick half-lengths H. Variants:
//  - deterministic: all sticks share one half-length
//  - rayleigh(b):   pdf 2bh exp(-b h^2), mean sqrt(pi/(4b))
//  - discrete:      finite set of atoms (h_i, w_i)
//  - tabulated:     piecewise-linear pdf on a knot grid, finite support
// Besides the inherent law f_H the class exposes the length-biased law
// f~_H(h) = h f_H(h) / E[H], which governs the street containing the typical
// vehicle (inspection paradox).
class HalfLengthLaw {
 public:
  struct Deterministic {
    double h0;
  };
  struct Rayleigh {
    double b;
  };
  struct Discrete {
    std::vector<std::pair<double, double>> atoms;  // (h, weight), weights sum to 1
  };
  struct Tabulated {
    std::vector<double> h;    // strictly increasing knots, h.front() >= 0
    std::vector<double> pdf;  // pdf values at knots, integrates to 1
  };

  static HalfLengthLaw deterministic(double h0) {
    if (!(h0 > 0.0)) throw std::invalid_argument("half-length must be positive");
    return HalfLengthLaw(Deterministic{h0});
  }

  static HalfLengthLaw rayleigh(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("rayleigh parameter b must be positive");
    return HalfLengthLaw(Rayleigh{b});
  }

  static HalfLengthLaw discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw std::invalid_argument("discrete law needs at least one atom");
    double wsum = 0.0;
    for (auto& [h, w] : atoms) {
      if (!(h > 0.0)) throw std::invalid_argument("half-length atoms must be positive");
      if (!(w > 0.0)) throw std::invalid_argument("atom weights must be positive");
      wsum += w;
    }
    for (auto& [h, w] : atoms) w /= wsum;
    std::sort(atoms.begin(), atoms.end());
    return HalfLengthLaw(Discrete{std::move(atoms)});
  }

  static HalfLengthLaw tabulated(std::vector<double> h, std::vector<double> pdf) {
    if (h.size() < 2 || h.size() != pdf.size())
      throw std::invalid_argument("tabulated law needs matching knot/pdf arrays");
    if (h.front() < 0.0) throw std::invalid_argument("tabulated support must be nonnegative");
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
      if (!(h[i + 1] > h[i])) throw std::invalid_argument("tabulated knots must increase");
    for (double f : pdf)
      if (f < 0.0) throw std::invalid_argument("tabulated pdf must be nonnegative");
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
      mass += 0.5 * (pdf[i] + pdf[i + 1]) * (h[i + 1] - h[i]);
    if (std::abs(mass - 1.0) > 1e-8)
      throw std::invalid_argument("tabulated pdf must integrate to 1 (got " + std::to_string(mass) + ")");
    HalfLengthLaw law(Tabulated{std::move(h), std::move(pdf)});
    if (!(law.mean() > 0.0)) throw std::invalid_argument("tabulated law has zero mean");
    return law;
  }

  bool atomic() const {
    return std::holds_alternative<Deterministic>(v_) || std::holds_alternative<Discrete>(v_);
  }

  // Atoms of the inherent law; only valid for atomic variants.
  std::vector<std::pair<double, double>> atoms() const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return {{d->h0, 1.0}};
    return std::get<Discrete>(v_).atoms;
  }

  // Atoms reweighted by h (length bias); only valid for atomic variants.
  std::vector<std::pair<double, double>> biased_atoms() const {
    auto a = atoms();
    const double m = mean();
    for (auto& [h, w] : a) w *= h / m;
    return a;
  }

  double pdf(double h) const {
    if (std::holds_alternative<Deterministic>(v_) || std::holds_alternative<Discrete>(v_))
      throw std::logic_error("atomic law has no density");
    if (auto* r = std::get_if<Rayleigh>(&v_))
      return h >= 0.0 ? 2.0 * r->b * h * std::exp(-r->b * h * h) : 0.0;
    const auto& t = std::get<Tabulated>(v_);
    if (h <= t.h.front() || h >= t.h.back()) {
      if (h == t.h.front()) return t.pdf.front();
      if (h == t.h.back()) return t.pdf.back();
      return 0.0;
    }
    const auto it = std::upper_bound(t.h.begin(), t.h.end(), h);
    const std::size_t i = static_cast<std::size_t>(it - t.h.begin()) - 1;
    const double u = (h - t.h[i]) / (t.h[i + 1] - t.h[i]);
    return t.pdf[i] * (1.0 - u) + t.pdf[i + 1] * u;
  }

  double biased_pdf(double h) const { return h * pdf(h) / mean(); }

  double mean() const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0;
    if (auto* r = std::get_if<Rayleigh>(&v_)) return std::sqrt(std::numbers::pi / (4.0 * r->b));
    if (auto* a = std::get_if<Discrete>(&v_)) {
      double m = 0.0;
      for (auto& [h, w] : a->atoms) m += w * h;
      return m;
    }
    return tabulated_moment(1);
  }

  double second_moment() const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0 * d->h0;
    if (auto* r = std::get_if<Rayleigh>(&v_)) return 1.0 / r->b;
    if (auto* a = std::get_if<Discrete>(&v_)) {
      double m = 0.0;
      for (auto& [h, w] : a->atoms) m += w * h * h;
      return m;
    }
    return tabulated_moment(2);
  }

  // Mean of the length-biased law, E[H^2]/E[H].
  double biased_mean() const { return second_moment() / mean(); }

  double quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must be in [0,1)");
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0;
    if (auto* r = std::get_if<Rayleigh>(&v_)) return std::sqrt(-std::log1p(-u) / r->b);
    if (auto* a = std::get_if<Discrete>(&v_)) {
      double cum = 0.0;
      for (auto& [h, w] : a->atoms) {
        cum += w;
        if (cum >= u) return h;
      }
      return a->atoms.back().first;
    }
    const auto& t = std::get<Tabulated>(v_);
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < t.h.size(); ++i) {
      const double dx = t.h[i + 1] - t.h[i];
      const double cell = 0.5 * (t.pdf[i] + t.pdf[i + 1]) * dx;
      if (cum + cell >= u) {
        // Solve the quadratic CDF within the cell.
        const double need = u - cum;
        const double f0 = t.pdf[i];
        const double slope = (t.pdf[i + 1] - t.pdf[i]) / dx;
        // need = f0*x + slope*x^2/2 for x in [0, dx]
        double x;
        if (std::abs(slope) < 1e-30) {
          x = f0 > 0.0 ? need / f0 : dx;
        } else {
          const double disc = f0 * f0 + 2.0 * slope * need;
          x = (-f0 + std::sqrt(std::max(disc, 0.0))) / slope;
        }
        return t.h[i] + std::clamp(x, 0.0, dx);
      }
      cum += cell;
    }
    return t.h.back();
  }

  double support_max() const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0;
    if (std::holds_alternative<Rayleigh>(v_)) return std::numeric_limits<double>::infinity();
    if (auto* a = std::get_if<Discrete>(&v_)) return a->atoms.back().first;
    return std::get<Tabulated>(v_).h.back();
  }

  double sample(Rng& rng) const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0;
    if (auto* r = std::get_if<Rayleigh>(&v_)) {
      const double u = uniform01(rng);
      return std::sqrt(-std::log1p(-u) / r->b);
    }
    if (auto* a = std::get_if<Discrete>(&v_)) {
      double u = uniform01(rng);
      for (auto& [h, w] : a->atoms) {
        if (u <= w) return h;
        u -= w;
      }
      return a->atoms.back().first;
    }
    return quantile(uniform01(rng));
  }

  // Draw from the length-biased law h f_H(h)/E[H].
  double sample_biased(Rng& rng) const {
    if (auto* d = std::get_if<Deterministic>(&v_)) return d->h0;
    if (auto* r = std::get_if<Rayleigh>(&v_)) {
      // Biased Rayleigh is the Maxwell law with sigma^2 = 1/(2b).
      std::normal_distribution<double> n(0.0, 1.0);
      const double x = n(rng), y = n(rng), z = n(rng);
      return std::sqrt((x * x + y * y + z * z) / (2.0 * r->b));
    }
    if (std::holds_alternative<Discrete>(v_)) {
      auto ba = biased_atoms();
      double u = uniform01(rng);
      for (auto& [h, w] : ba) {
        if (u <= w) return h;
        u -= w;
      }
      return ba.back().first;
    }
    // Tabulated: rejection against the inherent law with envelope h_max.
    const double hmax = support_max();
    for (int i = 0; i < 100000; ++i) {
      const double h = sample(rng);
      if (uniform01(rng) * hmax <= h) return h;
    }
    throw std::runtime_error("biased sampling rejection failed to accept");
  }

  // E_{f_H}[g(H)]; exact sum for atomic laws, adaptive quadrature otherwise.
  template <typename G>
  QuadratureResult expect(const G& g, const QuadratureSpec& spec = {}) const {
    if (atomic()) {
      double s = 0.0;
      for (auto& [h, w] : atoms()) s += w * g(h);
      return {s, 0.0};
    }
    return integrate_pdf([this, &g](double h) { return pdf(h) * g(h); }, spec);
  }

  // E_{f~_H}[g(H)].
  template <typename G>
  QuadratureResult expect_biased(const G& g, const QuadratureSpec& spec = {}) const {
    if (atomic()) {
      double s = 0.0;
      for (auto& [h, w] : biased_atoms()) s += w * g(h);
      return {s, 0.0};
    }
    return integrate_pdf([this, &g](double h) { return biased_pdf(h) * g(h); }, spec);
  }

 private:
  template <typename V>
  explicit HalfLengthLaw(V v) : v_(std::move(v)) {}

  template <typename F>
  QuadratureResult integrate_pdf(const F& f, const QuadratureSpec& spec) const {
    if (auto* t = std::get_if<Tabulated>(&v_))
      return integrate(f, t->h.front(), t->h.back(), spec);
    return integrate_to_inf(f, 0.0, spec, mean());
  }

  double tabulated_moment(int k) const {
    // pdf is piecewise linear, so x^k * pdf is a polynomial of degree k+1;
    // Simpson is exact through degree 3.
    const auto& t = std::get<Tabulated>(v_);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.h.size(); ++i) {
      const double a = t.h[i], b = t.h[i + 1];
      const double fa = t.pdf[i], fb = t.pdf[i + 1];
      const double m = 0.5 * (a + b), fm = 0.5 * (fa + fb);
      auto term = [k](double x, double f) { return std::pow(x, k) * f; };
      s += (b - a) / 6.0 * (term(a, fa) + 4.0 * term(m, fm) + term(b, fb));
    }
    return s;
  }

  std::variant<Deterministic, Rayleigh, Discrete, Tabulated> v_;
};

}  // namespace coxveh
