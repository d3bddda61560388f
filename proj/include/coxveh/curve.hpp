#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace coxveh {

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw std::invalid_argument("bad log grid");
  std::vector<double> g(n);
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(std::log(lo) + step * i);
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw std::invalid_argument("bad linear grid");
  std::vector<double> g(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * i;
  return g;
}

inline std::vector<double> default_theta_grid() { return log_grid(1e-2, 1e2, 40); }

// Success probability as a function of theta, with provenance: quadrature
// curves carry an error budget per point, Monte Carlo curves a CI half-width
// and the realization count.
struct SirCurve {
  enum class Kind { Analytic, MonteCarlo };

  std::vector<double> theta;
  std::vector<double> value;
  std::vector<double> err;
  Kind kind = Kind::Analytic;
  std::uint64_t n = 0;  // realizations behind an MC curve

  std::size_t size() const { return theta.size(); }

  void validate() const {
    if (theta.size() != value.size() || theta.size() != err.size())
      throw std::logic_error("SirCurve arrays out of sync");
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (value[i] < -1e-12 || value[i] > 1.0 + 1e-12)
        throw std::logic_error("success probability outside [0,1]");
      if (i > 0 && theta[i] <= theta[i - 1])
        throw std::logic_error("theta grid must increase");
    }
  }
};

}  // namespace coxveh
