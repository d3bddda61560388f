#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coxveh/curve.hpp"
#include "coxveh/geometry.hpp"
#include "coxveh/halflength.hpp"

namespace coxveh {

// Total variation distance between two SIR curves on a shared theta grid:
// the maximum pointwise gap, the theta attaining it, and (when either input
// is Monte Carlo) the combined CI at that point.
struct TvResult {
  double epsilon = 0.0;
  double theta_at_max = 0.0;
  double combined_ci = 0.0;
  bool ci_aware = false;
};

inline TvResult tv_distance(const SirCurve& a, const SirCurve& b) {
  if (a.theta.size() != b.theta.size())
    throw std::invalid_argument("tv_distance: theta grids differ in size");
  for (std::size_t i = 0; i < a.theta.size(); ++i)
    if (a.theta[i] != b.theta[i])
      throw std::invalid_argument("tv_distance: theta grids differ");
  TvResult res;
  res.ci_aware =
      a.kind == SirCurve::Kind::MonteCarlo || b.kind == SirCurve::Kind::MonteCarlo;
  for (std::size_t i = 0; i < a.theta.size(); ++i) {
    const double gap = std::abs(a.value[i] - b.value[i]);
    if (gap >= res.epsilon) {
      res.epsilon = gap;
      res.theta_at_max = a.theta[i];
      res.combined_ci = (a.kind == SirCurve::Kind::MonteCarlo ? a.err[i] : 0.0) +
                        (b.kind == SirCurve::Kind::MonteCarlo ? b.err[i] : 0.0);
    }
  }
  return res;
}

// Model description for the Table-I parameter mappings.
struct EquivParams {
  ModelKind model = ModelKind::PLP;
  double mu = 0.0;
  std::optional<HalfLengthLaw> law;  // PSP/PLM
  double scale_c = 0.0;              // PLP->PSP limit family H = c H1
};

// Parameter mapping that makes `target` equivalent to `source`:
//   OG <-> PLP        same mu
//   PLP -> PSP        the limit family 2 c mu_PSP = mu_PLP at the chosen c
//   PSP <-> PLM       same mu and the same (fitted Rayleigh) half-length law
inline EquivParams map_parameters(const EquivParams& source, ModelKind target,
                                  double c = 100.0) {
  EquivParams out;
  out.model = target;
  const auto unsupported = [&] {
    throw std::invalid_argument("no equivalence mapping for " + to_string(source.model) +
                                " -> " + to_string(target));
  };
  switch (source.model) {
    case ModelKind::OG:
      if (target != ModelKind::PLP) unsupported();
      out.mu = source.mu;
      break;
    case ModelKind::PLP:
      if (target == ModelKind::OG) {
        out.mu = source.mu;
      } else if (target == ModelKind::PSP) {
        if (!(c > 0.0)) throw std::invalid_argument("scale c must be positive");
        out.mu = source.mu / (2.0 * c);
        out.scale_c = c;
        out.law = HalfLengthLaw::deterministic(c);  // H = c H1 with H1 = 1
      } else {
        unsupported();
      }
      break;
    case ModelKind::PSP:
      if (target == ModelKind::PLP) {
        if (!source.law) throw std::invalid_argument("PSP source needs a half-length law");
        out.mu = 2.0 * source.mu * source.law->mean();
      } else if (target == ModelKind::PLM) {
        out.mu = source.mu;
        out.law = source.law;
      } else {
        unsupported();
      }
      break;
    case ModelKind::PLM:
      if (target != ModelKind::PSP) unsupported();
      if (!source.law)
        throw std::invalid_argument("PLM source needs its fitted half-length law");
      out.mu = source.mu;
      out.law = source.law;
      break;
  }
  return out;
}

// Pointwise ratio trace for asymptotic equivalence: outage ratio
// (1-pA)/(1-pB) in the low-theta regime, success ratio pA/pB in the
// high-theta regime, plus how far the final grid point sits from 1.
enum class Regime { LowTheta, HighTheta };

struct RatioTrace {
  std::vector<double> theta;
  std::vector<double> ratio;
  double last_deviation = 0.0;
};

inline RatioTrace asymptotic_equivalence_check(const SirCurve& a, const SirCurve& b,
                                               Regime regime) {
  if (a.theta.size() != b.theta.size())
    throw std::invalid_argument("ratio trace: theta grids differ in size");
  RatioTrace tr;
  tr.theta = a.theta;
  tr.ratio.resize(a.theta.size());
  for (std::size_t i = 0; i < a.theta.size(); ++i) {
    if (a.theta[i] != b.theta[i])
      throw std::invalid_argument("ratio trace: theta grids differ");
    tr.ratio[i] = regime == Regime::LowTheta
                      ? (1.0 - a.value[i]) / (1.0 - b.value[i])
                      : a.value[i] / b.value[i];
  }
  // The regime end is the first grid point for low theta, the last for high.
  const double edge = regime == Regime::LowTheta ? tr.ratio.front() : tr.ratio.back();
  tr.last_deviation = std::abs(edge - 1.0);
  return tr;
}

struct EquivalenceReport {
  std::string model_a;
  std::string model_b;
  int order = 2;
  TvResult tv;
  double low_theta_ratio = 0.0;   // outage ratio at the smallest theta
  double high_theta_ratio = 0.0;  // success ratio at the largest theta
};

inline EquivalenceReport make_report(const std::string& name_a, const SirCurve& a,
                                     const std::string& name_b, const SirCurve& b,
                                     int order) {
  EquivalenceReport rep;
  rep.model_a = name_a;
  rep.model_b = name_b;
  rep.order = order;
  rep.tv = tv_distance(a, b);
  rep.low_theta_ratio = (1.0 - a.value.front()) / (1.0 - b.value.front());
  rep.high_theta_ratio = a.value.back() / b.value.back();
  return rep;
}

}  // namespace coxveh
