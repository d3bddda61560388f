#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxveh {

// Tolerances and limits for one adaptive integration. Nested integrals run
// their inner dimension at a tenth of the enclosing tolerance so the budget
// reported by a multi-dimensional evaluation stays dominated by the outer
// subdivision error.
struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  int max_depth = 50;
  std::size_t max_segments = 20000;

  QuadratureSpec inner() const {
    QuadratureSpec s = *this;
    s.rel_tol /= 10.0;
    s.abs_tol /= 10.0;
    return s;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, double estimate, double bound)
      : std::runtime_error(what), estimate(estimate), bound(bound) {}
  double estimate;  // best value reached
  double bound;     // error bound achieved when giving up
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK tables).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15KWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15GWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
inline QuadratureResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kron = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kGK15Nodes[i];
    const double f1 = f(c - dx);
    const double f2 = (i == 7) ? f1 : f(c + dx);
    const double fsum = (i == 7) ? f1 : f1 + f2;
    kron += kGK15KWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGK15GWeights[i / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  const double diff = std::abs(kron - gauss);
  // QUADPACK-style sharpened error estimate.
  const double err = diff > 0.0 ? diff * std::min(1.0, std::pow(200.0 * diff / std::max(std::abs(kron), 1e-300), 1.5)) : 0.0;
  return {kron, std::max(err, std::abs(kron) * 1e-15)};
}

struct Segment {
  double a, b, value, error;
  int depth;
};

}  // namespace detail

// Globally adaptive GK15 on a finite interval. Throws quadrature_error if the
// requested tolerance is unreachable within the depth/segment limits.
template <typename F>
inline QuadratureResult integrate(const F& f, double a, double b,
                                  const QuadratureSpec& spec = {}) {
  if (a == b) return {0.0, 0.0};
  std::vector<detail::Segment> segs;
  segs.reserve(64);
  {
    auto r = detail::gk15(f, a, b);
    segs.push_back({a, b, r.value, r.error, 0});
  }
  double total = segs[0].value;
  double total_err = segs[0].error;
  while (true) {
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (total_err <= tol) return {total, total_err};
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].error > segs[worst].error) worst = i;
    if (segs[worst].depth >= spec.max_depth || segs.size() >= spec.max_segments)
      throw quadrature_error("adaptive quadrature: tolerance not reached", total, total_err);
    const detail::Segment s = segs[worst];
    const double m = 0.5 * (s.a + s.b);
    auto r1 = detail::gk15(f, s.a, m);
    auto r2 = detail::gk15(f, m, s.b);
    total += r1.value + r2.value - s.value;
    total_err += r1.error + r2.error - s.error;
    segs[worst] = {s.a, m, r1.value, r1.error, s.depth + 1};
    segs.push_back({m, s.b, r2.value, r2.error, s.depth + 1});
  }
}

// Integral over [a, b] with forced interior break points (sharp features the
// adaptive rule could otherwise step across). Knots outside (a, b) are
// ignored.
template <typename F>
inline QuadratureResult integrate_with_knots(const F& f, double a, double b,
                                             std::vector<double> knots,
                                             const QuadratureSpec& spec = {}) {
  knots.push_back(a);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  QuadratureResult total;
  double prev = a;
  for (double k : knots) {
    if (k <= prev || k > b) continue;
    auto r = integrate(f, prev, k, spec);
    total.value += r.value;
    total.error += r.error;
    prev = k;
  }
  return total;
}

// Integral over [a, inf) via x = a + scale * t / (1 - t). `scale` should match
// the decay length of the integrand; it only affects efficiency.
template <typename F>
inline QuadratureResult integrate_to_inf(const F& f, double a,
                                         const QuadratureSpec& spec = {},
                                         double scale = 1.0) {
  auto g = [&f, a, scale](double t) {
    const double om = 1.0 - t;
    if (om <= 1e-14) return 0.0;
    const double x = a + scale * t / om;
    return f(x) * scale / (om * om);
  };
  return integrate(g, 0.0, 1.0, spec);
}

}  // namespace coxveh
