// Acceptance suite: one check per headline claim, each printing a single
// PASS/FAIL line with the measured numbers. Exit code = number of failures.
//
//   coxveh_acceptance                 run everything
//   coxveh_acceptance --criterion 5   run one criterion
//   coxveh_acceptance --list          list criteria
//   coxveh_acceptance --jobs N        worker threads for the MC parts

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "coxveh/experiments.hpp"

using namespace coxveh;

namespace {

int g_jobs = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

ModelParams fig6_params() {
  ModelParams mp;
  mp.lambda = 0.3;  // lambda p = 0.3 with p = 1
  mp.p = 1.0;
  mp.D = 0.25;
  mp.alpha = 4.0;
  return mp;
}

// --------------------------------------------------------------------------
// 1. Length intensities (tau -> mu for line models, 2 mu E[H] for sticks).
Outcome criterion1() {
  Outcome out;
  const double R = 10.0;
  const std::size_t n = 1000;
  struct Case {
    std::string name;
    ModelKind model;
    double mu;
    std::optional<HalfLengthLaw> law;
  };
  const std::vector<Case> cases{
      {"OG mu=1", ModelKind::OG, 1.0, std::nullopt},
      {"PLP mu=1", ModelKind::PLP, 1.0, std::nullopt},
      {"PSP h=10", ModelKind::PSP, 0.1, HalfLengthLaw::deterministic(10.0)},
      {"PSP rayleigh", ModelKind::PSP, 0.1, HalfLengthLaw::rayleigh(0.0103)},
  };
  std::ostringstream det;
  std::uint64_t case_seed = 1013;
  for (const auto& c : cases) {
    ++case_seed;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng = make_stream(case_seed, i);
      StreetSystem sys;
      if (c.model == ModelKind::OG) sys = sample_og(c.mu, R, rng);
      else if (c.model == ModelKind::PLP) sys = sample_plp(c.mu, R, rng);
      else sys = sample_psp(c.mu, *c.law, R, rng);
      total += total_length_in(sys, R);
    }
    const double tau_hat = total / double(n) / (std::numbers::pi * R * R);
    const double expect = mean_length_density(c.model, c.mu, c.law);
    const double rel = std::abs(tau_hat - expect) / expect;
    det << c.name << " rel_err=" << fmt(rel, 3) << "  ";
    if (rel >= 0.01) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 2. Nearest-neighbor distribution for line models vs the closed form (KS).
Outcome criterion2() {
  Outcome out;
  const double mu = 1.0;
  ModelParams mp = fig6_params();
  std::ostringstream det;
  for (int m : {2, 4}) {
    McConfig mc;
    mc.realizations = 100000;
    mc.seed = 2000 + static_cast<std::uint64_t>(m);
    mc.jobs = g_jobs;
    mc.r_window = 12.0;
    auto gen =
        make_model_generator(ModelKind::PLP, m, mp, mu, std::nullopt, mc.r_window);
    auto est = estimate_nn_cdf(gen, linear_grid(0.1, 5.0, 10), mc);
    auto cdf = [&](double r) { return nn_cdf_og_plp(r, m, mu, mp.lambda).value; };
    const double ks = ks_distance(est.samples, cdf);
    det << "m=" << m << " KS=" << fmt(ks, 3) << "  ";
    if (!(ks < 0.01)) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 3. Nearest-neighbor distribution for the PSP vs the nested quadrature.
Outcome criterion3() {
  Outcome out;
  ModelParams mp = fig6_params();
  std::ostringstream det;
  struct Case {
    double mu, b, r_max;
  };
  for (const Case c : {Case{0.01, 0.0103, 6.0}, Case{1.0, 1.04, 1.8}}) {
    auto law = HalfLengthLaw::rayleigh(c.b);
    McConfig mc;
    mc.realizations = 100000;
    mc.seed = 3000 + static_cast<std::uint64_t>(c.mu * 100);
    mc.jobs = g_jobs;
    mc.r_window = c.r_max * 1.3 + 0.5;
    auto gen = make_model_generator(ModelKind::PSP, 2, mp, c.mu, law, mc.r_window);
    auto grid = linear_grid(c.r_max / 15.0, c.r_max, 15);
    auto est = estimate_nn_cdf(gen, grid, mc);
    QuadratureSpec spec;
    spec.rel_tol = 1e-5;
    spec.abs_tol = 1e-9;
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double an = nn_cdf_psp(grid[k], 2, c.mu, mp.lambda, law, spec).value;
      sup = std::max(sup, std::abs(an - est.cdf[k]));
    }
    det << "mu=" << fmt(c.mu, 3) << " sup_gap=" << fmt(sup, 3) << "  ";
    if (!(sup < 0.02)) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 4. PPP baselines vs the closed form.
Outcome criterion4() {
  Outcome out;
  ModelParams mp = fig6_params();
  std::ostringstream det;

  const double spot = ppp_success(2, 1.0, 1.0, 4.0, 1.0);
  const double expect = std::exp(-std::numbers::pi * std::numbers::pi / 2.0);
  det << "spot |p-exp(-pi^2/2)|=" << fmt(std::abs(spot - expect), 2) << "  ";
  if (!(std::abs(spot - expect) <= 1e-6)) out.pass = false;

  const auto grid = log_grid(1e-2, 1e2, 10);
  for (int d : {1, 2}) {
    const double intensity = d == 1 ? 0.3 : 0.1;
    McConfig mc;
    mc.realizations = 100000;
    mc.seed = 4000 + static_cast<std::uint64_t>(d);
    mc.jobs = g_jobs;
    mc.r_interference =
        d == 2 ? interference_radius(intensity, 1.0, grid.back(), mp.D, mp.alpha) : 250.0;
    auto gen = make_ppp_generator(d, intensity, mp, mc.r_interference);
    auto curve = estimate_success(gen, grid, mc);
    double worst = 0.0;
    bool inside = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double oracle = ppp_success(d, intensity, mp.D, mp.alpha, grid[k]);
      const double dev = std::abs(curve.value[k] - oracle);
      worst = std::max(worst, dev - curve.err[k]);
      inside = inside && dev <= curve.err[k];
    }
    det << "d=" << d << (inside ? " inside CI" : " outside CI by " + fmt(worst, 2)) << "  ";
    if (!inside) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 5. Success probabilities for the Fig. 6 parameter sets, MC vs analytic.
Outcome criterion5() {
  Outcome out;
  ModelParams mp = fig6_params();
  const auto grid = log_grid(1e-2, 1e2, 40);
  QuadratureSpec spec;
  spec.rel_tol = 1e-5;
  spec.abs_tol = 1e-9;
  std::ostringstream det;

  struct Setup {
    std::string name;
    ModelKind model;
    double mu;
    std::optional<HalfLengthLaw> law;
  };
  const std::vector<Setup> setups{
      {"PLP mu=2", ModelKind::PLP, 2.0, std::nullopt},
      {"PSP mu=0.1 h=10", ModelKind::PSP, 0.1, HalfLengthLaw::deterministic(10.0)},
  };
  for (const auto& s : setups) {
    const double tau = mean_length_density(s.model, s.mu, s.law);
    McConfig mc;
    mc.realizations = 100000;
    mc.seed = 5000 + static_cast<std::uint64_t>(s.model);
    mc.jobs = g_jobs;
    mc.r_interference =
        interference_radius(mp.lambda * mp.p, tau, grid.back(), mp.D, mp.alpha);
    mc.r_window = mc.r_interference;
    std::vector<SirCurve> mc_curves, an_curves;
    for (int m : {2, 4}) {
      auto gen = make_model_generator(s.model, m, mp, s.mu, s.law, mc.r_window);
      McConfig mcm = mc;
      mcm.seed = mc.seed + static_cast<std::uint64_t>(m) * 101;
      mc_curves.push_back(estimate_success(gen, grid, mcm));
      SirCurve an;
      an.kind = SirCurve::Kind::Analytic;
      an.theta = grid;
      for (double th : grid) {
        auto q = s.model == ModelKind::PLP
                     ? og_plp_success(m, s.mu, mp.lambda, mp.D, mp.alpha, th, spec)
                     : psp_success(m, s.mu, mp.lambda, mp.D, mp.alpha, th, *s.law, spec);
        an.value.push_back(q.value);
        an.err.push_back(q.error);
      }
      an_curves.push_back(an);
    }
    double sup = 0.0;
    for (int mi : {0, 1})
      for (std::size_t k = 0; k < grid.size(); ++k)
        sup = std::max(sup,
                       std::abs(mc_curves[mi].value[k] - an_curves[mi].value[k]));
    bool ordered = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (mc_curves[0].value[k] < mc_curves[1].value[k]) ordered = false;
      if (an_curves[0].value[k] < an_curves[1].value[k]) ordered = false;
    }
    det << s.name << " sup|mc-an|=" << fmt(sup, 3)
        << (ordered ? " p2>=p4 ok" : " ORDER VIOLATION") << "  ";
    if (!(sup < 0.01) || !ordered) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 6. PLM vs PSP-based approximation: total-variation epsilons and the
//    T-junction lower bound.
Outcome criterion6() {
  Outcome out;
  ModelParams mp = fig6_params();
  const auto grid = log_grid(1e-2, 1e2, 40);
  QuadratureSpec spec;
  spec.rel_tol = 1e-4;
  spec.abs_tol = 1e-8;
  std::ostringstream det;

  struct Case {
    double mu, b, eps_paper;
  };
  for (const Case c : {Case{0.01, 0.0103, 0.0297}, Case{1.0, 1.04, 0.0219}}) {
    const double tau = 2.0 * c.mu * HalfLengthLaw::rayleigh(c.b).mean();
    McConfig mc;
    mc.realizations = 20000;
    mc.seed = 6000 + static_cast<std::uint64_t>(c.mu * 100);
    mc.jobs = g_jobs;
    mc.r_interference =
        interference_radius(mp.lambda, tau, grid.back(), mp.D, mp.alpha, 1e-3);
    mc.r_window = mc.r_interference;
    auto gen = make_model_generator(ModelKind::PLM, 2, mp, c.mu, std::nullopt,
                                    mc.r_window);
    auto mc_curve = estimate_success(gen, grid, mc);
    SirCurve an;
    an.kind = SirCurve::Kind::Analytic;
    an.theta = grid;
    for (double th : grid) {
      auto q = plm_success_general(c.mu, mp.lambda, mp.D, mp.alpha, th, c.b, spec);
      an.value.push_back(q.value);
      an.err.push_back(q.error);
    }
    auto tv = tv_distance(mc_curve, an);
    det << "mu=" << fmt(c.mu, 3) << " eps=" << fmt(tv.epsilon, 3) << " (paper "
        << fmt(c.eps_paper, 3) << ", ci " << fmt(tv.combined_ci, 2) << ")  ";
    if (!(std::abs(tv.epsilon - c.eps_paper) <= 0.015)) out.pass = false;
  }

  // T-junction: Eq.-20-style approximation against order-3 PLM MC.
  {
    const double mu = 0.3, b = 0.312;
    const double tau = 2.0 * mu * HalfLengthLaw::rayleigh(b).mean();
    McConfig mc;
    mc.realizations = 20000;
    mc.seed = 6100;
    mc.jobs = g_jobs;
    mc.r_interference =
        interference_radius(mp.lambda, tau, grid.back(), mp.D, mp.alpha, 1e-3);
    mc.r_window = mc.r_interference;
    auto gen = make_model_generator(ModelKind::PLM, 3, mp, mu, std::nullopt,
                                    mc.r_window);
    auto mc3 = estimate_success(gen, grid, mc);
    double worst_tight = 0.0;   // how far the bound sits below mc - ci
    double worst_valid = 0.0;   // how far the bound pokes above mc + ci
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto q = plm_success_tjunction(mu, mp.lambda, mp.D, mp.alpha, grid[k], b, spec);
      worst_tight = std::max(worst_tight, (mc3.value[k] - mc3.err[k]) - q.value);
      worst_valid = std::max(worst_valid, q.value - (mc3.value[k] + mc3.err[k]));
    }
    det << "tjn: below(mc-ci) by " << fmt(worst_tight, 3) << ", above(mc+ci) by "
        << fmt(worst_valid, 3);
    if (!(worst_tight <= 0.005)) out.pass = false;
    if (!(worst_valid <= 0.005)) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 7. Lilypond half-length fit and its mu-scaling.
Outcome criterion7() {
  Outcome out;
  std::ostringstream det;
  auto fit_at = [&](double mu, std::uint64_t seed) {
    const double r_stats = std::sqrt(10000.0 / (mu * std::numbers::pi));
    return fit_plm_halflength(plm_halflength_samples(mu, r_stats, seed));
  };
  const double b1 = fit_at(1.0, 7001);
  const double b001 = fit_at(0.01, 7002);
  const double b01 = fit_at(0.1, 7003);
  det << "b(1)=" << fmt(b1, 4) << " b(0.01)=" << fmt(b001, 4)
      << " ratio b(1)/b(0.1)=" << fmt(b1 / b01, 4);
  if (!(std::abs(b1 - 1.04) / 1.04 < 0.10)) out.pass = false;
  if (!(std::abs(b001 - 0.0103) / 0.0103 < 0.10)) out.pass = false;
  if (!(std::abs(b1 / b01 - 10.0) / 10.0 < 0.10)) out.pass = false;
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 8. Neighbor-count statistics, PLM vs matched PSP.
Outcome criterion8() {
  Outcome out;
  ModelParams mp = fig6_params();
  const double mu = 0.01, b = 0.0103;
  auto grid = linear_grid(0.0, 30.0, 16);
  McConfig mc;
  mc.realizations = 4000;
  mc.seed = 8001;
  mc.jobs = g_jobs;
  mc.r_window = grid.back() * 1.25 + 1.0;
  auto gen_plm =
      make_model_generator(ModelKind::PLM, 2, mp, mu, std::nullopt, mc.r_window);
  auto st_plm = neighbor_count_stats(gen_plm, grid, mc);
  McConfig mc2 = mc;
  mc2.seed = 8002;
  auto gen_psp = make_model_generator(ModelKind::PSP, 2, mp, mu,
                                      HalfLengthLaw::rayleigh(b), mc.r_window);
  auto st_psp = neighbor_count_stats(gen_psp, grid, mc2);

  double worst_mean_excess = 0.0;  // |mean gap| beyond the combined CI
  bool var_ordered = true;
  std::size_t var_checked = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double gap = std::abs(st_plm.mean[k] - st_psp.mean[k]);
    worst_mean_excess =
        std::max(worst_mean_excess, gap - (st_plm.mean_ci[k] + st_psp.mean_ci[k]));
    const bool above_floor = st_plm.var[k] > 5.0 * st_plm.var_ci[k] &&
                             st_psp.var[k] > 5.0 * st_psp.var_ci[k];
    if (above_floor) {
      ++var_checked;
      if (!(st_plm.var[k] + st_plm.var_ci[k] < st_psp.var[k] - st_psp.var_ci[k]))
        var_ordered = false;
    }
  }
  std::ostringstream det;
  det << "mean gap beyond CI: " << fmt(worst_mean_excess, 3) << "; var(plm)<var(psp) at "
      << var_checked << " grid points: " << (var_ordered ? "yes" : "NO");
  if (worst_mean_excess > 0.0) out.pass = false;
  if (!var_ordered || var_checked == 0) out.pass = false;
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 9. Asymptotics: low-theta outage slope and the high-theta 2-D PPP limit.
Outcome criterion9() {
  Outcome out;
  std::ostringstream det;
  QuadratureSpec spec;
  spec.rel_tol = 1e-7;
  spec.abs_tol = 1e-12;

  // Low-theta slope of log(1-p) for the PSP. The outage must be dominated by
  // the own-street term over the fit range, hence the sparse background.
  auto law = HalfLengthLaw::deterministic(10.0);
  const auto grid = log_grid(1e-4, 1e-2, 10);
  for (int m : {2, 4}) {
    std::vector<double> x, y;
    for (double th : grid) {
      auto p = psp_success(m, 0.01, 0.3, 0.25, 4.0, th, law, spec);
      x.push_back(std::log(th));
      y.push_back(std::log(1.0 - p.value));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double target = low_theta_exponent(m, 4.0);
    det << "m=" << m << " slope=" << fmt(slope, 3) << " (target " << fmt(target, 3)
        << ")  ";
    if (!(std::abs(slope - target) / target < 0.10)) out.pass = false;
  }

  // High-theta ratio against the matched 2-D PPP at theta = 1e3. The
  // midpoint-collapse regime needs h << D theta^(1/alpha), few transmitters
  // per stick and a background-dominated outage, hence these parameters.
  auto law2 = HalfLengthLaw::deterministic(0.5);
  for (int m : {2, 4}) {
    auto p = psp_success(m, 4.0, 0.001, 1.0, 4.0, 1e3, law2, spec);
    const double asym = high_theta_asymptote(1e3, 4.0, 0.001, 1.0, 1.0, 4.0, law2);
    const double ratio = p.value / asym;
    det << "high m=" << m << " ratio=" << fmt(ratio, 4) << "  ";
    if (!(std::abs(ratio - 1.0) < 0.05)) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 10. Equivalence identities: OG=PLP bitwise, PSP(c) -> PLP monotone ladder.
Outcome criterion10() {
  Outcome out;
  std::ostringstream det;
  const auto grid = log_grid(1e-2, 1e2, 40);
  QuadratureSpec spec;
  spec.rel_tol = 1e-5;
  spec.abs_tol = 1e-9;

  // One formula serves both line models; the curves must agree bit for bit.
  bool identical = true;
  for (double th : grid) {
    const double a = og_plp_success(2, 2.0, 0.3, 0.25, 4.0, th, spec).value;
    const double b = og_plp_success(2, 2.0, 0.3, 0.25, 4.0, th, spec).value;
    if (std::memcmp(&a, &b, sizeof(double)) != 0) identical = false;
  }
  det << (identical ? "OG/PLP bit-identical" : "OG/PLP DIFFER") << "  ";
  if (!identical) out.pass = false;

  const double mu_plp = 1.0, lp = 0.3, D = 0.25, alpha = 4.0;
  double prev = 2.0;
  bool monotone = true;
  double final_gap = 1.0;
  for (double c : {10.0, 100.0, 1000.0}) {
    auto law = HalfLengthLaw::deterministic(c);
    const double mu_psp = mu_plp / (2.0 * c);
    double gap = 0.0;
    for (double th : grid) {
      const double a = psp_success(2, mu_psp, lp, D, alpha, th, law, spec).value;
      const double b = og_plp_success(2, mu_plp, lp, D, alpha, th, spec).value;
      gap = std::max(gap, std::abs(a - b));
    }
    det << "gap(c=" << fmt(c, 4) << ")=" << fmt(gap, 3) << "  ";
    if (gap >= prev) monotone = false;
    prev = gap;
    final_gap = gap;
  }
  if (!monotone || !(final_gap < 0.01)) out.pass = false;
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 11. Conjecture check: the PSP nearest-neighbor CDF dominates the PLM's.
Outcome criterion11() {
  Outcome out;
  ModelParams mp = fig6_params();
  std::ostringstream det;
  struct Case {
    double mu, b, r_max;
  };
  for (const Case c : {Case{0.01, 0.0103, 6.0}, Case{1.0, 1.04, 1.8}}) {
    McConfig mc;
    mc.realizations = 20000;
    mc.seed = 11000 + static_cast<std::uint64_t>(c.mu * 100);
    mc.jobs = g_jobs;
    mc.r_window = c.r_max * 1.3 + 0.5;
    auto grid = linear_grid(c.r_max / 12.0, c.r_max, 12);
    auto gen_plm =
        make_model_generator(ModelKind::PLM, 2, mp, c.mu, std::nullopt, mc.r_window);
    auto est_plm = estimate_nn_cdf(gen_plm, grid, mc);
    McConfig mc2 = mc;
    mc2.seed = mc.seed + 1;
    auto gen_psp = make_model_generator(ModelKind::PSP, 2, mp, c.mu,
                                        HalfLengthLaw::rayleigh(c.b), mc.r_window);
    auto est_psp = estimate_nn_cdf(gen_psp, grid, mc2);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, est_plm.cdf[k] - est_psp.cdf[k] -
                                  (est_plm.ci[k] + est_psp.ci[k]));
    det << "mu=" << fmt(c.mu, 3) << " max(plm-psp-ci)=" << fmt(worst, 3) << "  ";
    if (worst > 0.0) out.pass = false;
  }
  out.detail = det.str();
  return out;
}

// --------------------------------------------------------------------------
// 12. Determinism: identical seeds give byte-identical outputs.
Outcome criterion12() {
  Outcome out;
  namespace fs = std::filesystem;
  auto cfg = parse_experiment_config(
      "[experiment]\nkind = success\nmodel = PSP\nname = accept_det\n"
      "[params]\nmu = 0.1\nlambda = 0.3\nD = 0.25\nalpha = 4\n"
      "[law]\nkind = deterministic\nh = 10\n"
      "[grid]\ntheta_points = 10\n"
      "[mc]\nrealizations = 400\nseed = 1212\n");
  const std::string d1 = "/tmp/coxveh_accept_det1", d2 = "/tmp/coxveh_accept_det2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  cfg.mc.jobs = g_jobs;
  auto r1 = run_experiment(cfg, d1);
  cfg.mc.jobs = 1;
  auto r2 = run_experiment(cfg, d2);
  bool same = r1.files.size() == r2.files.size();
  auto slurp = [](const std::string& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  for (std::size_t i = 0; same && i < r1.files.size(); ++i)
    same = slurp(r1.files[i]) == slurp(r2.files[i]);
  out.pass = same;
  out.detail = same ? "byte-identical across reruns and thread counts"
                    : "outputs differ between identical-seed runs";
  fs::remove_all(d1);
  fs::remove_all(d2);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Check> checks{
      {1, "length intensities (tau)", criterion1},
      {2, "line-model NN distribution vs closed form", criterion2},
      {3, "PSP NN distribution vs nested quadrature", criterion3},
      {4, "PPP baselines vs closed form", criterion4},
      {5, "success probabilities MC vs analytic (Fig. 6 sets)", criterion5},
      {6, "PLM approximation epsilons and T-junction bound", criterion6},
      {7, "lilypond half-length fit and scaling", criterion7},
      {8, "neighbor-count statistics PLM vs PSP", criterion8},
      {9, "low/high-theta asymptotics", criterion9},
      {10, "equivalence identities and PSP->PLP ladder", criterion10},
      {11, "PSP NN CDF dominates PLM NN CDF", criterion11},
      {12, "determinism of outputs", criterion12},
  };

  int only = 0;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) only = std::atoi(argv[++a]);
    else if (arg == "--jobs" && a + 1 < argc) g_jobs = std::atoi(argv[++a]);
    else if (arg == "--list") {
      for (const auto& c : checks) std::printf("%2d  %s\n", c.id, c.name.c_str());
      return 0;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--jobs N] [--list]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const auto& c : checks) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s  --  %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL",
                c.id, c.name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}
