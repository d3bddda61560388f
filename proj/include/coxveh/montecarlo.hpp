#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "coxveh/cox.hpp"
#include "coxveh/curve.hpp"
#include "coxveh/rng.hpp"

namespace coxveh {

// Simulation budget and geometry for one Monte Carlo estimate. Interference
// is truncated at r_interference; vehicles exist within r_window (>= the
// truncation radius plus whatever the experiment needs around the origin).
struct McConfig {
  std::size_t realizations = 10000;
  std::uint64_t seed = 1;
  double r_interference = 0.0;
  double r_window = 0.0;
  double z = 1.959963984540054;  // 95% normal quantile
  int jobs = 0;                  // 0 = all hardware threads

  void validate() const {
    if (realizations < 1) throw std::invalid_argument("need at least one realization");
  }
};

struct EstimateWithCi {
  double value = 0.0;
  double ci_half_width = 0.0;
  std::size_t n = 0;
};

// Truncation radius such that the mean interference arriving from beyond it
// stays below budget / (theta_ref * D^alpha); lambda_active is the linear
// intensity of transmitters and tau the mean street length per unit area.
inline double interference_radius(double lambda_active, double tau, double theta_ref,
                                  double D, double alpha, double budget = 1e-4) {
  if (lambda_active <= 0.0 || tau <= 0.0) return 1.0;
  const double c = 2.0 * std::numbers::pi * lambda_active * tau / (alpha - 2.0);
  const double bound = budget / (theta_ref * std::pow(D, alpha));
  return std::pow(c / bound, 1.0 / (alpha - 2.0));
}

// A scenario generator draws one Palm realization from the per-realization
// stream it is handed.
using ScenarioGen = std::function<TypicalScenario(Rng&)>;

namespace detail {

// Runs f(i) for i in [0, n) across threads. Callers that care about
// determinism must write results by index.
template <typename PerRealization>
void run_realizations(std::size_t n, int jobs, PerRealization&& f) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned workers =
      jobs > 0 ? static_cast<unsigned>(jobs) : std::min<unsigned>(hw, 16);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      for (;;) {
        const std::size_t lo = next.fetch_add(kChunk);
        if (lo >= n) return;
        const std::size_t hi = std::min(lo + kChunk, n);
        for (std::size_t i = lo; i < hi; ++i) f(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// SIR of one realization: Rayleigh signal over the truncated interference sum
// of ALOHA-active vehicles. Gains and marks are drawn here so a scenario can
// be reused across the theta grid (common random numbers).
inline double realize_sir(const TypicalScenario& sc, double r_int, Rng& rng) {
  const double alpha = sc.params.alpha;
  const bool quartic = alpha == 4.0;
  const double p = sc.params.p;
  const double g = exponential1(rng);
  double interference = 0.0;
  auto add = [&](const VehicleSet& vs) {
    for (const auto& v : vs.points) {
      const bool active = p >= 1.0 ? true : bernoulli(rng, p);
      if (!active) continue;
      const double d2 = v.pos.norm2();
      if (d2 > r_int * r_int) continue;
      const double path = quartic ? 1.0 / (d2 * d2) : std::pow(d2, -alpha / 2.0);
      interference += exponential1(rng) * path;
    }
  };
  add(sc.own_vehicles);
  add(sc.background_vehicles);
  const double signal = g * std::pow(sc.params.D, -alpha);
  if (interference <= 0.0) return std::numeric_limits<double>::infinity();
  return signal / interference;
}

inline double bernoulli_ci(double phat, std::size_t n, double z) {
  return z * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(n));
}

// Weighted exceedance curve over a grid: for each grid point, the weighted
// fraction of samples above (or below, for CDFs) the point, with a CI.
// Weight-1 samples get the plain Bernoulli CI; general weights get the
// delta-method CI of the self-normalized ratio estimator.
struct WeightedSamples {
  std::vector<std::pair<double, double>> xs;  // (value, weight), sorted by value
  double w_total = 0.0;
  double w2_total = 0.0;
  bool unit_weights = true;

  void build(std::vector<double> v, std::vector<double> w) {
    std::vector<std::pair<double, double>> p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      p[i] = {v[i], w[i]};
      w_total += w[i];
      w2_total += w[i] * w[i];
      unit_weights = unit_weights && w[i] == 1.0;
    }
    std::sort(p.begin(), p.end());
    xs = std::move(p);
    if (w_total <= 0.0)
      throw std::runtime_error("weighted estimate: total weight is zero");
  }

  // P(X > x) with CI.
  std::pair<double, double> exceedance(double x, double z) const {
    double w_above = 0.0, w2_above = 0.0;
    const auto it = std::upper_bound(
        xs.begin(), xs.end(), std::make_pair(x, std::numeric_limits<double>::max()));
    for (auto jt = it; jt != xs.end(); ++jt) {
      w_above += jt->second;
      w2_above += jt->second * jt->second;
    }
    const double phat = w_above / w_total;
    double ci;
    if (unit_weights) {
      ci = bernoulli_ci(phat, xs.size(), z);
    } else {
      const double s2 = (1.0 - phat) * (1.0 - phat) * w2_above +
                        phat * phat * (w2_total - w2_above);
      ci = z * std::sqrt(s2) / w_total;
    }
    return {phat, ci};
  }
};

}  // namespace detail

// Success probability over a theta grid. Each realization contributes a
// single SIR draw shared by every theta (common random numbers), so the
// estimate is exactly non-increasing in theta. Scenario weights (empirical
// Palm sampling) enter as a self-normalized ratio estimate.
inline SirCurve estimate_success(const ScenarioGen& gen,
                                 const std::vector<double>& theta_grid,
                                 const McConfig& mc) {
  mc.validate();
  const std::size_t n = mc.realizations;
  std::vector<double> sir(n), w(n);
  detail::run_realizations(n, mc.jobs, [&](std::size_t i) {
    Rng rng = make_stream(mc.seed, i);
    const TypicalScenario sc = gen(rng);
    sir[i] = detail::realize_sir(sc, mc.r_interference, rng);
    w[i] = sc.weight;
  });

  detail::WeightedSamples ws;
  ws.build(std::move(sir), std::move(w));
  SirCurve curve;
  curve.kind = SirCurve::Kind::MonteCarlo;
  curve.n = n;
  curve.theta = theta_grid;
  curve.value.resize(theta_grid.size());
  curve.err.resize(theta_grid.size());
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    const auto [phat, ci] = ws.exceedance(theta_grid[k], mc.z);
    curve.value[k] = phat;
    curve.err[k] = ci;
  }
  return curve;
}

// Empirical nearest-neighbor distances (censored at the scenario sample
// radius) plus the CDF evaluated on a grid.
struct NnEstimate {
  std::vector<double> samples;  // sorted; censored values are +inf
  std::vector<double> weights;  // aligned with samples
  std::vector<double> r;
  std::vector<double> cdf;
  std::vector<double> ci;
  std::size_t n = 0;
};

inline NnEstimate estimate_nn_cdf(const ScenarioGen& gen, const std::vector<double>& r_grid,
                                  const McConfig& mc) {
  mc.validate();
  const std::size_t n = mc.realizations;
  std::vector<double> d(n), w(n);
  detail::run_realizations(n, mc.jobs, [&](std::size_t i) {
    Rng rng = make_stream(mc.seed, i);
    const TypicalScenario sc = gen(rng);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : sc.own_vehicles.points) best = std::min(best, v.pos.norm());
    for (const auto& v : sc.background_vehicles.points)
      best = std::min(best, v.pos.norm());
    d[i] = best;
    w[i] = sc.weight;
  });
  detail::WeightedSamples ws;
  ws.build(std::move(d), std::move(w));
  NnEstimate est;
  est.n = n;
  est.r = r_grid;
  est.cdf.resize(r_grid.size());
  est.ci.resize(r_grid.size());
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    const auto [p_above, ci] = ws.exceedance(r_grid[k], mc.z);
    est.cdf[k] = 1.0 - p_above;
    est.ci[k] = ci;
  }
  est.samples.reserve(n);
  est.weights.reserve(n);
  for (const auto& [x, wt] : ws.xs) {
    est.samples.push_back(x);
    est.weights.push_back(wt);
  }
  return est;
}

// Exact KS distance between sorted samples and a continuous CDF. Censored
// (+inf) samples only bound the empirical CDF from above, which is correct as
// long as the censoring radius exceeds the region of interest.
template <typename Cdf>
inline double ks_distance(const std::vector<double>& sorted_samples, const Cdf& cdf) {
  const double n = static_cast<double>(sorted_samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    if (!std::isfinite(sorted_samples[i])) break;
    const double F = cdf(sorted_samples[i]);
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - F));
  }
  return ks;
}

// Mean and variance of the neighbor count N_o(r) per grid radius, with
// normal-approximation CIs (the variance CI uses the empirical fourth moment).
struct NeighborStats {
  std::vector<double> r;
  std::vector<double> mean, mean_ci;
  std::vector<double> var, var_ci;
  std::size_t n = 0;
};

inline NeighborStats neighbor_count_stats(const ScenarioGen& gen,
                                          const std::vector<double>& r_grid,
                                          const McConfig& mc) {
  mc.validate();
  const std::size_t n = mc.realizations;
  const std::size_t nr = r_grid.size();
  std::vector<double> counts(n * nr);
  std::vector<double> w(n);
  detail::run_realizations(n, mc.jobs, [&](std::size_t i) {
    Rng rng = make_stream(mc.seed, i);
    const TypicalScenario sc = gen(rng);
    std::vector<double> dist;
    dist.reserve(sc.vehicle_count());
    for (const auto& v : sc.own_vehicles.points) dist.push_back(v.pos.norm());
    for (const auto& v : sc.background_vehicles.points) dist.push_back(v.pos.norm());
    std::sort(dist.begin(), dist.end());
    for (std::size_t k = 0; k < nr; ++k)
      counts[i * nr + k] = static_cast<double>(
          std::upper_bound(dist.begin(), dist.end(), r_grid[k]) - dist.begin());
    w[i] = sc.weight;
  });

  long double w1 = 0.0, w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w1 += w[i];
    w2 += w[i] * w[i];
  }
  if (w1 <= 0.0) throw std::runtime_error("neighbor stats: total weight is zero");
  const double n_eff = static_cast<double>(w1 * w1 / std::max(w2, (long double)1e-300));

  NeighborStats st;
  st.n = n;
  st.r = r_grid;
  st.mean.resize(nr);
  st.mean_ci.resize(nr);
  st.var.resize(nr);
  st.var_ci.resize(nr);
  for (std::size_t k = 0; k < nr; ++k) {
    long double s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s1 += w[i] * counts[i * nr + k];
    const double mean = static_cast<double>(s1 / w1);
    long double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double c = counts[i * nr + k] - mean;
      s2 += w[i] * c * c;
      s4 += w[i] * c * c * c * c;
    }
    const double var = static_cast<double>(s2 / w1) * n_eff / std::max(n_eff - 1.0, 1.0);
    const double m4 = static_cast<double>(s4 / w1);
    st.mean[k] = mean;
    st.mean_ci[k] = mc.z * std::sqrt(std::max(var, 0.0) / n_eff);
    st.var[k] = var;
    const double var_of_var = std::max(m4 - var * var, 0.0) / n_eff;
    st.var_ci[k] = mc.z * std::sqrt(var_of_var);
  }
  return st;
}

// Rayleigh fit of lilypond half-lengths by matching the mean:
// b = pi / (4 mean^2).
inline double fit_plm_halflength(const std::vector<double>& half_lengths) {
  if (half_lengths.empty()) throw std::invalid_argument("no half-length samples");
  long double sum = 0.0;
  for (double h : half_lengths) sum += h;
  const double mean = static_cast<double>(sum / half_lengths.size());
  return std::numbers::pi / (4.0 * mean * mean);
}

// Half-lengths of one lilypond field, restricted to sticks whose midpoints
// fall in the inner disk of radius r_stats (the generation window is padded by
// t_cap). The run errors out if the truncated fraction reaches 1e-3.
inline std::vector<double> plm_halflength_samples(double mu, double r_stats,
                                                  std::uint64_t seed, double t_cap = 0.0) {
  Rng rng = make_stream(seed, 0);
  StreetSystem sys = sample_plm(mu, r_stats, rng, t_cap);
  std::vector<double> out;
  std::size_t inner = 0, truncated = 0;
  for (const auto& s : sys.sticks) {
    if (s.mid.norm() > r_stats) continue;
    ++inner;
    if (s.truncated) {
      ++truncated;
      continue;
    }
    out.push_back(s.half_len);
  }
  if (inner > 0 &&
      static_cast<double>(truncated) >= 1e-3 * static_cast<double>(inner))
    throw std::runtime_error("lilypond growth cap truncated >= 1e-3 of the sticks");
  return out;
}

// Success probability when the transmitter is the nearest ALOHA-active
// vehicle (random link distance). Realizations without an active vehicle in
// the window are dropped.
inline SirCurve nearest_transmitter_success(const ScenarioGen& gen,
                                            const std::vector<double>& theta_grid,
                                            const McConfig& mc) {
  mc.validate();
  const std::size_t n = mc.realizations;
  std::vector<double> sir(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> w(n, 0.0);
  detail::run_realizations(n, mc.jobs, [&](std::size_t i) {
    Rng rng = make_stream(mc.seed, i);
    const TypicalScenario sc = gen(rng);
    w[i] = sc.weight;
    const double p = sc.params.p;
    const double alpha = sc.params.alpha;
    std::vector<std::pair<double, double>> active;  // (distance^2, gain)
    auto collect = [&](const VehicleSet& vs) {
      for (const auto& v : vs.points)
        if (p >= 1.0 || bernoulli(rng, p)) active.push_back({v.pos.norm2(), 0.0});
    };
    collect(sc.own_vehicles);
    collect(sc.background_vehicles);
    if (active.empty()) return;
    std::size_t nearest = 0;
    for (std::size_t k = 1; k < active.size(); ++k)
      if (active[k].first < active[nearest].first) nearest = k;
    const double g = exponential1(rng);
    double interference = 0.0;
    const double r2 = mc.r_interference * mc.r_interference;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (k == nearest || active[k].first > r2) continue;
      interference += exponential1(rng) * std::pow(active[k].first, -alpha / 2.0);
    }
    const double signal = g * std::pow(active[nearest].first, -alpha / 2.0);
    sir[i] = interference > 0.0 ? signal / interference
                                : std::numeric_limits<double>::infinity();
  });

  std::vector<double> kept, kept_w;
  kept.reserve(n);
  kept_w.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isnan(sir[i])) {
      kept.push_back(sir[i]);
      kept_w.push_back(w[i]);
    }
  if (kept.empty()) throw std::runtime_error("no realization had an active transmitter");
  detail::WeightedSamples ws;
  const std::size_t n_kept = kept.size();
  ws.build(std::move(kept), std::move(kept_w));
  SirCurve curve;
  curve.kind = SirCurve::Kind::MonteCarlo;
  curve.n = n_kept;
  curve.theta = theta_grid;
  curve.value.resize(theta_grid.size());
  curve.err.resize(theta_grid.size());
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    const auto [phat, ci] = ws.exceedance(theta_grid[k], mc.z);
    curve.value[k] = phat;
    curve.err[k] = ci;
  }
  return curve;
}

// Baseline generators for the PPP sanity checks.
inline ScenarioGen make_ppp_generator(int d, double intensity, const ModelParams& params,
                                      double r_w) {
  if (d != 1 && d != 2) throw std::invalid_argument("PPP generator supports d = 1, 2");
  params.validate();
  return [d, intensity, params, r_w](Rng& rng) {
    TypicalScenario sc;
    sc.order = 2;
    sc.params = params;
    sc.sample_radius = r_w;
    if (d == 2) {
      const long n = poisson(rng, intensity * std::numbers::pi * r_w * r_w);
      sc.background_vehicles.points.reserve(static_cast<std::size_t>(n));
      for (long k = 0; k < n; ++k)
        sc.background_vehicles.points.push_back({detail::uniform_in_disk(rng, r_w), 0, true});
    } else {
      const long n = poisson(rng, intensity * 2.0 * r_w);
      sc.background_vehicles.points.reserve(static_cast<std::size_t>(n));
      for (long k = 0; k < n; ++k)
        sc.background_vehicles.points.push_back({{uniform(rng, -r_w, r_w), 0.0}, 0, true});
    }
    return sc;
  };
}

}  // namespace coxveh
