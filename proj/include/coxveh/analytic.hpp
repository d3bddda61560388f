#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "coxveh/halflength.hpp"
#include "coxveh/quadrature.hpp"

namespace coxveh {

// Gamma(1+d) Gamma(1-d) for d in (0,1), evaluated through the reflection
// identity pi*d / sin(pi*d).
inline double gamma_product(double d) {
  if (!(d > 0.0 && d < 1.0)) throw std::domain_error("gamma_product needs d in (0,1)");
  return std::numbers::pi * d / std::sin(std::numbers::pi * d);
}

// Success probability of the typical receiver in a d-dimensional PPP of
// transmitters with Rayleigh fading: exp(-c_d lambda_d D^d theta^{d/alpha}
// Gamma(1+d/alpha) Gamma(1-d/alpha)), c_1 = 2, c_2 = pi.
inline double ppp_success(int d, double lambda_d, double D, double alpha, double theta) {
  if (d != 1 && d != 2) throw std::invalid_argument("ppp_success supports d = 1, 2");
  if (lambda_d < 0.0) throw std::invalid_argument("intensity must be nonnegative");
  if (!(alpha > d)) throw std::invalid_argument("alpha must exceed d");
  if (lambda_d == 0.0) return 1.0;
  const double dp = d / alpha;
  const double cd = d == 1 ? 2.0 : std::numbers::pi;
  return std::exp(-cd * lambda_d * std::pow(D, d) * std::pow(theta, dp) * gamma_product(dp));
}

namespace detail {

// T(x) = int_0^x dv / (1 + v^(2/delta)); odd in x, saturating at
// Gamma(1+delta/2)Gamma(1-delta/2). This is the path-loss kernel of every
// one-street interference transform.
inline double interference_kernel(double x, double delta, const QuadratureSpec& spec) {
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -interference_kernel(-x, delta, spec);
  const double q = 2.0 / delta;  // = alpha
  const bool quartic = q == 4.0;
  auto f = [q, quartic](double v) {
    const double vq = quartic ? (v * v) * (v * v) : std::pow(v, q);
    return 1.0 / (1.0 + vq);
  };
  if (x <= 30.0) return integrate(f, 0.0, x, spec).value;
  const double full = gamma_product(delta / 2.0);
  return full - integrate_to_inf(f, x, spec, x).value;
}

}  // namespace detail

// Laplace transform of the interference from one line at perpendicular
// distance x (active intensity lambda_p), evaluated at s.
inline double laplace_line(double s, double x, double lambda_p, double alpha,
                           const QuadratureSpec& spec = {}) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
  if (lambda_p == 0.0) return 1.0;
  const double delta = 2.0 / alpha;
  const double vx = x * x / std::pow(s, delta);
  // v = vx + w^2 removes the 1/sqrt(v - vx) endpoint singularity.
  const bool quadratic = delta == 0.5;  // alpha = 4
  auto f = [vx, delta, quadratic](double w) {
    const double v = vx + w * w;
    const double pl = quadratic ? v * v : std::pow(v, 1.0 / delta);
    return 2.0 / (1.0 + pl);
  };
  const double integral =
      integrate_to_inf(f, 0.0, spec, std::sqrt(1.0 + vx)).value;
  return std::exp(-lambda_p * std::pow(s, delta / 2.0) * integral);
}

// Success probability of the typical vehicle of order m in the OG/PLP Cox
// network. One formula covers both models; the orientation law integrates out.
inline QuadratureResult og_plp_success(int m, double mu, double lambda_p, double D,
                                       double alpha, double theta,
                                       const QuadratureSpec& spec = {}) {
  if (m != 2 && m != 4) throw std::invalid_argument("order must be 2 or 4");
  if (!(alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const double delta = 2.0 / alpha;
  const double s = theta * std::pow(D, alpha);
  const double own_exponent =
      m * lambda_p * D * std::pow(theta, delta / 2.0) * gamma_product(delta / 2.0);

  double bg_exponent = 0.0;
  double bg_err = 0.0;
  if (mu > 0.0 && lambda_p > 0.0) {
    const QuadratureSpec inner = spec.inner();
    auto integrand = [&](double x) {
      return 1.0 - laplace_line(s, x, lambda_p, alpha, inner);
    };
    auto r = integrate_to_inf(integrand, 0.0, spec,
                              std::max(std::pow(s, delta / 2.0), 0.1));
    bg_exponent = 2.0 * mu * r.value;
    bg_err = 2.0 * mu * r.error;
  }
  const double p = std::exp(-(own_exponent + bg_exponent));
  return {p, p * bg_err};
}

// Nearest-neighbor distance CDF in the OG/PLP Cox network (order m).
inline QuadratureResult nn_cdf_og_plp(double r, int m, double mu, double lambda,
                                      const QuadratureSpec& spec = {}) {
  if (m != 2 && m != 4) throw std::invalid_argument("order must be 2 or 4");
  if (r < 0.0) throw std::invalid_argument("r must be nonnegative");
  if (r == 0.0) return {0.0, 0.0};
  // u = r sin t smooths the sqrt endpoint.
  auto f = [r, lambda](double t) {
    const double c = std::cos(t);
    return (1.0 - std::exp(-2.0 * lambda * r * c)) * r * c;
  };
  auto q = integrate(f, 0.0, std::numbers::pi / 2.0, spec);
  const double expo = m * lambda * r + 2.0 * mu * q.value;
  const double F = 1.0 - std::exp(-expo);
  return {F, std::exp(-expo) * 2.0 * mu * q.error};
}

namespace detail {

// |stick ∩ b(o,r)|_1 for a stick with midpoint at distance gamma, relative
// angle psi between the midpoint direction and the stick orientation, and
// half-length h: the chord interval of the support line clipped to [-h, h].
inline double stick_disk_chord(double gamma, double psi, double r, double h) {
  const double sn = gamma * std::sin(psi);
  const double disc = r * r - sn * sn;
  if (disc <= 0.0) return 0.0;
  const double root = std::sqrt(disc);
  const double mid = -gamma * std::cos(psi);
  const double lo = std::max(mid - root, -h);
  const double hi = std::min(mid + root, h);
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace detail

// Nearest-neighbor distance CDF in the PSP Cox network (order m): own-street
// factor (length-biased law, midpoint uniform along the stick) times the
// exponential functional of the background stick process.
inline QuadratureResult nn_cdf_psp(double r, int m, double mu, double lambda,
                                   const HalfLengthLaw& law,
                                   const QuadratureSpec& spec = {}) {
  if (m != 2 && m != 4) throw std::invalid_argument("order must be 2 or 4");
  if (r < 0.0) throw std::invalid_argument("r must be nonnegative");
  if (r == 0.0) return {0.0, 0.0};

  const QuadratureSpec spec1 = spec.inner();
  const QuadratureSpec spec2 = spec1.inner();
  double inner_err_max = 0.0;

  auto own_given_h = [&](double h) {
    auto f = [&](double gamma) {
      return std::exp(-lambda * detail::stick_disk_chord(gamma, 0.0, r, h));
    };
    auto q = integrate(f, 0.0, h, spec1);
    inner_err_max = std::max(inner_err_max, q.error / h);
    return q.value / h;
  };
  auto own = law.expect_biased(own_given_h, spec);
  double budget = own.error + inner_err_max;

  double bg_inner_err = 0.0;
  auto bg_given_h = [&](double h) {
    auto psi_integrand = [&](double psi) {
      auto gamma_integrand = [&](double gamma) {
        const double chord = detail::stick_disk_chord(gamma, psi, r, h);
        return chord > 0.0 ? (1.0 - std::exp(-lambda * chord)) * gamma : 0.0;
      };
      return integrate(gamma_integrand, 0.0, r + h, spec2).value;
    };
    auto q = integrate(psi_integrand, 0.0, std::numbers::pi, spec1);
    bg_inner_err = std::max(bg_inner_err, 2.0 * q.error);
    return 2.0 * q.value;
  };
  auto bg = law.expect(bg_given_h, spec);

  const double own_factor = std::pow(own.value, m / 2);
  const double bg_factor = std::exp(-mu * bg.value);
  const double F = 1.0 - own_factor * bg_factor;
  budget = budget * (m / 2) * bg_factor +
           own_factor * bg_factor * mu * (bg.error + bg_inner_err);
  return {F, budget};
}

// Laplace transform of the interference from the m/2 streets through the
// typical vehicle in the PSP Cox network.
inline QuadratureResult psp_own_laplace(double s, int m, double lambda_p,
                                        const HalfLengthLaw& law, double alpha,
                                        const QuadratureSpec& spec = {}) {
  if (m != 2 && m != 4) throw std::invalid_argument("order must be 2 or 4");
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (lambda_p == 0.0) return {1.0, 0.0};
  const double delta = 2.0 / alpha;
  const double sc = std::pow(s, delta / 2.0);
  const QuadratureSpec spec1 = spec.inner();
  const QuadratureSpec spec2 = spec1.inner();

  double inner_err = 0.0;
  auto given_h = [&](double h) {
    // Symmetric in the midpoint offset w; average over w in [0, h]. The
    // integrand is flat except for a boundary layer of width ~ sc where the
    // receiver approaches the stick end.
    auto f = [&](double w) {
      const double J = detail::interference_kernel((w + h) / sc, delta, spec2) -
                       detail::interference_kernel((w - h) / sc, delta, spec2);
      return std::exp(-lambda_p * sc * J);
    };
    auto q = integrate_with_knots(f, 0.0, h, {h - 8.0 * sc}, spec1);
    inner_err = std::max(inner_err, q.error / h);
    return q.value / h;
  };
  auto e = law.expect_biased(given_h, spec);
  const double single = e.value;
  const double value = m == 2 ? single : single * single;
  const double err = (m / 2) * std::pow(single, m / 2 - 1) * (e.error + inner_err);
  return {value, err};
}

// Laplace transform of the interference from all background sticks in the PSP
// Cox network. The angular double integral collapses to one relative angle.
inline QuadratureResult psp_background_laplace(double s, double mu, double lambda_p,
                                               const HalfLengthLaw& law, double alpha,
                                               const QuadratureSpec& spec = {}) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (mu == 0.0 || lambda_p == 0.0) return {1.0, 0.0};
  const double delta = 2.0 / alpha;
  const double inv_delta = 1.0 / delta;
  const double s_delta = std::pow(s, delta);
  const QuadratureSpec spec1 = spec.inner();
  const QuadratureSpec spec2 = spec1.inner();
  const QuadratureSpec spec3 = spec2.inner();

  const bool quadratic = inv_delta == 2.0;  // alpha = 4
  const double feature = std::sqrt(s_delta);  // path-loss length scale
  double inner_err = 0.0;
  auto given_h = [&](double h) {
    auto psi_integrand = [&](double psi) {
      const double cpsi = std::cos(psi);
      const double spsi = std::sin(psi);
      auto gamma_integrand = [&](double gamma) {
        const double rho2 = gamma * spsi * gamma * spsi;
        const double t0 = gamma * cpsi;
        auto u_integrand = [&](double t) {
          const double ratio = (t * t + rho2) / s_delta;
          const double pl = quadratic ? ratio * ratio : std::pow(ratio, inv_delta);
          return 1.0 / (1.0 + pl);
        };
        // The integrand peaks at t = 0 with a width that can be far below the
        // stick length; splitting there keeps the peak on an endpoint where
        // the bisection finds it.
        const double lo = t0 - h, hi = t0 + h;
        double K;
        if (lo < 0.0 && hi > 0.0)
          K = integrate(u_integrand, lo, 0.0, spec3).value +
              integrate(u_integrand, 0.0, hi, spec3).value;
        else
          K = integrate(u_integrand, lo, hi, spec3).value;
        return (1.0 - std::exp(-lambda_p * K)) * gamma;
      };
      // Structure in gamma: near-field decay on the path-loss scale, then a
      // cliff where the stick (length h) stops reaching the origin.
      const double pad = 8.0 * feature + 1e-3 * h;
      auto head = integrate_with_knots(gamma_integrand, 0.0, h + pad,
                                       {8.0 * feature, h - pad}, spec2);
      auto tail = integrate_to_inf(gamma_integrand, h + pad, spec2,
                                   4.0 * feature + 0.02 * h + 0.5);
      return head.value + tail.value;
    };
    auto q = integrate(psi_integrand, 0.0, std::numbers::pi, spec1);
    inner_err = std::max(inner_err, 2.0 * q.error);
    return 2.0 * q.value;
  };
  auto e = law.expect(given_h, spec);
  const double value = std::exp(-mu * e.value);
  return {value, value * mu * (e.error + inner_err)};
}

// Success probability of the typical vehicle of order m in the PSP Cox
// network: product of the own-street and background Laplace transforms at
// s = theta D^alpha.
inline QuadratureResult psp_success(int m, double mu, double lambda_p, double D,
                                    double alpha, double theta, const HalfLengthLaw& law,
                                    const QuadratureSpec& spec = {}) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const double s = theta * std::pow(D, alpha);
  auto own = psp_own_laplace(s, m, lambda_p, law, alpha, spec);
  auto bg = psp_background_laplace(s, mu, lambda_p, law, alpha, spec);
  return {own.value * bg.value, own.error * bg.value + bg.error * own.value};
}

// PLM general-vehicle success probability, approximated by the PSP with the
// fitted Rayleigh half-length law.
inline QuadratureResult plm_success_general(double mu, double lambda_p, double D,
                                            double alpha, double theta, double b,
                                            const QuadratureSpec& spec = {}) {
  return psp_success(2, mu, lambda_p, D, alpha, theta, HalfLengthLaw::rayleigh(b), spec);
}

// PLM T-junction success probability: the general-vehicle value times the
// Laplace transform of the street that ends at the origin (it spans [0, 2h]
// with h following the inherent Rayleigh law).
inline QuadratureResult plm_success_tjunction(double mu, double lambda_p, double D,
                                              double alpha, double theta, double b,
                                              const QuadratureSpec& spec = {}) {
  auto base = plm_success_general(mu, lambda_p, D, alpha, theta, b, spec);
  if (lambda_p == 0.0) return base;
  const double delta = 2.0 / alpha;
  const double sc = D * std::pow(theta, delta / 2.0);
  const QuadratureSpec spec1 = spec.inner();
  const auto law = HalfLengthLaw::rayleigh(b);
  auto given_h = [&](double h) {
    const double J = detail::interference_kernel(2.0 * h / sc, delta, spec1);
    return std::exp(-lambda_p * sc * J);
  };
  auto factor = law.expect(given_h, spec);
  return {base.value * factor.value,
          base.error * factor.value + base.value * factor.error};
}

// Low-theta outage exponent: 1 - p_m(theta) = Theta(theta^(delta m / 4)).
inline double low_theta_exponent(int m, double alpha) {
  if (m != 2 && m != 4) throw std::invalid_argument("order must be 2 or 4");
  if (!(alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  return (2.0 / alpha) * m / 4.0;
}

// High-theta success asymptote: the network behaves like a 2-D PPP with the
// matched planar intensity lambda_2 = 2 mu lambda E[H], ALOHA-thinned by p.
inline double high_theta_asymptote(double theta, double mu, double lambda, double p,
                                   double D, double alpha, const HalfLengthLaw& law) {
  const double lambda2 = 2.0 * mu * lambda * law.mean();
  return ppp_success(2, lambda2 * p, D, alpha, theta);
}

}  // namespace coxveh
