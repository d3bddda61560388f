#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coxveh/analytic.hpp"
#include "coxveh/config.hpp"
#include "coxveh/equivalence.hpp"
#include "coxveh/io.hpp"
#include "coxveh/montecarlo.hpp"

namespace coxveh {

// Mean street length per unit area of the configured model.
inline double mean_length_density(ModelKind model, double mu,
                                  const std::optional<HalfLengthLaw>& law) {
  if (model == ModelKind::OG || model == ModelKind::PLP) return mu;
  if (!law) throw std::invalid_argument("stick model needs a half-length law");
  return 2.0 * mu * law->mean();
}

// Palm scenario generator for any model/order, vehicles within r_window.
inline ScenarioGen make_model_generator(ModelKind model, int order,
                                        const ModelParams& params, double mu,
                                        std::optional<HalfLengthLaw> law,
                                        double r_window) {
  params.validate();
  switch (model) {
    case ModelKind::OG:
    case ModelKind::PLP:
      return [=](Rng& rng) {
        return condition_typical_line_model(model, order, params, mu, r_window, rng);
      };
    case ModelKind::PSP:
      if (!law) throw std::invalid_argument("PSP generator needs a half-length law");
      return [=](Rng& rng) {
        return condition_typical_psp(order, params, mu, *law, r_window, rng);
      };
    case ModelKind::PLM:
      return [=](Rng& rng) {
        return condition_typical_plm(order, params, mu, r_window, rng);
      };
  }
  throw std::logic_error("unreachable");
}

namespace detail {

inline double auto_interference_radius(const ExperimentConfig& cfg) {
  if (cfg.mc.r_interference > 0.0) return cfg.mc.r_interference;
  const double tau = mean_length_density(cfg.model, cfg.mu, cfg.law);
  const double theta_max = cfg.theta_grid.empty() ? 1e2 : cfg.theta_grid.back();
  return interference_radius(cfg.params.lambda * cfg.params.p, tau, theta_max,
                             cfg.params.D, cfg.params.alpha);
}

inline std::vector<std::pair<std::string, std::string>> manifest_common(
    const ExperimentConfig& cfg, const McConfig& mc) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.push_back({"experiment", to_string(cfg.kind)});
  kv.push_back({"name", cfg.name});
  kv.push_back({"model", to_string(cfg.model)});
  if (!cfg.pair.empty()) kv.push_back({"pair", cfg.pair});
  kv.push_back({"order", std::to_string(cfg.order)});
  kv.push_back({"mu", fmt_double(cfg.mu, 17)});
  kv.push_back({"lambda", fmt_double(cfg.params.lambda, 17)});
  kv.push_back({"p", fmt_double(cfg.params.p, 17)});
  kv.push_back({"D", fmt_double(cfg.params.D, 17)});
  kv.push_back({"alpha", fmt_double(cfg.params.alpha, 17)});
  if (cfg.law) {
    if (cfg.rayleigh_b > 0.0) {
      kv.push_back({"law", "rayleigh"});
      kv.push_back({"law_b", fmt_double(cfg.rayleigh_b, 17)});
    } else {
      kv.push_back({"law", "deterministic"});
      kv.push_back({"law_h", fmt_double(cfg.law->mean(), 17)});
    }
  }
  if (!cfg.theta_grid.empty()) {
    kv.push_back({"theta_min", fmt_double(cfg.theta_grid.front(), 17)});
    kv.push_back({"theta_max", fmt_double(cfg.theta_grid.back(), 17)});
    kv.push_back({"theta_points", std::to_string(cfg.theta_grid.size())});
  }
  if (!cfg.r_grid.empty()) {
    kv.push_back({"r_min", fmt_double(cfg.r_grid.front(), 17)});
    kv.push_back({"r_max", fmt_double(cfg.r_grid.back(), 17)});
    kv.push_back({"r_points", std::to_string(cfg.r_grid.size())});
  }
  kv.push_back({"realizations", std::to_string(mc.realizations)});
  kv.push_back({"seed", std::to_string(mc.seed)});
  kv.push_back({"r_interference", fmt_double(mc.r_interference, 17)});
  kv.push_back({"r_window", fmt_double(mc.r_window, 17)});
  kv.push_back({"ci_z", fmt_double(mc.z, 17)});
  kv.push_back({"quadrature_rel_tol", fmt_double(QuadratureSpec{}.rel_tol, 17)});
  kv.push_back({"quadrature_abs_tol", fmt_double(QuadratureSpec{}.abs_tol, 17)});
  return kv;
}

inline SirCurve analytic_success_curve(const ExperimentConfig& cfg, int order,
                                       const std::vector<double>& grid) {
  SirCurve c;
  c.kind = SirCurve::Kind::Analytic;
  c.theta = grid;
  const double lp = cfg.params.lambda * cfg.params.p;
  for (double th : grid) {
    QuadratureResult r;
    if (cfg.model == ModelKind::OG || cfg.model == ModelKind::PLP) {
      r = og_plp_success(order, cfg.mu, lp, cfg.params.D, cfg.params.alpha, th);
    } else if (cfg.model == ModelKind::PSP) {
      r = psp_success(order, cfg.mu, lp, cfg.params.D, cfg.params.alpha, th, *cfg.law);
    } else {
      r = order == 2 ? plm_success_general(cfg.mu, lp, cfg.params.D, cfg.params.alpha,
                                           th, cfg.rayleigh_b)
                     : plm_success_tjunction(cfg.mu, lp, cfg.params.D, cfg.params.alpha,
                                             th, cfg.rayleigh_b);
    }
    c.value.push_back(r.value);
    c.err.push_back(r.error);
  }
  return c;
}

inline SirCurve constant_err_curve(const std::vector<double>& grid,
                                   const std::vector<double>& values) {
  SirCurve c;
  c.kind = SirCurve::Kind::Analytic;
  c.theta = grid;
  c.value = values;
  c.err.assign(values.size(), 0.0);
  return c;
}

}  // namespace detail

struct ExperimentResult {
  std::vector<std::string> files;
};

// Executes one experiment and writes CSV outputs plus a manifest into out_dir.
// Everything is deterministic in (config, seed).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / cfg.name).string();
  ExperimentResult result;
  McConfig mc = cfg.mc;
  const double lp = cfg.params.lambda * cfg.params.p;

  switch (cfg.kind) {
    case ExperimentKind::TauCheck: {
      // Empirical mean street length per unit area in b(o,10), all models.
      const double R = 10.0;
      std::ofstream os(base + ".csv");
      os << "model,mu,tau_hat,tau_expected,rel_err\n";
      struct Row {
        ModelKind model;
        std::optional<HalfLengthLaw> law;
      };
      std::vector<Row> rows{{ModelKind::OG, std::nullopt},
                            {ModelKind::PLP, std::nullopt},
                            {ModelKind::PSP, HalfLengthLaw::deterministic(10.0)},
                            {ModelKind::PSP, HalfLengthLaw::rayleigh(0.0103)}};
      for (const auto& row : rows) {
        double total = 0.0;
        for (std::size_t i = 0; i < mc.realizations; ++i) {
          Rng rng = make_stream(mc.seed, i);
          StreetSystem sys;
          if (row.model == ModelKind::OG) sys = sample_og(cfg.mu, R, rng);
          else if (row.model == ModelKind::PLP) sys = sample_plp(cfg.mu, R, rng);
          else sys = sample_psp(cfg.mu, *row.law, R, rng);
          total += total_length_in(sys, R);
        }
        const double tau_hat =
            total / double(mc.realizations) / (std::numbers::pi * R * R);
        const double expected = mean_length_density(row.model, cfg.mu, row.law);
        os << to_string(row.model) << "," << fmt_double(cfg.mu) << ","
           << fmt_double(tau_hat) << "," << fmt_double(expected) << ","
           << fmt_double(std::abs(tau_hat - expected) / expected) << "\n";
      }
      result.files.push_back(base + ".csv");
      break;
    }

    case ExperimentKind::Success: {
      if (mc.r_interference == 0.0) mc.r_interference = detail::auto_interference_radius(cfg);
      if (mc.r_window == 0.0) mc.r_window = mc.r_interference;
      const int high_order = cfg.model == ModelKind::PLM ? 3 : 4;
      auto gen2 = make_model_generator(cfg.model, 2, cfg.params, cfg.mu, cfg.law,
                                       mc.r_window);
      auto genh = make_model_generator(cfg.model, high_order, cfg.params, cfg.mu,
                                       cfg.law, mc.r_window);
      auto mc2 = estimate_success(gen2, cfg.theta_grid, mc);
      McConfig mch = mc;
      mch.seed = mc.seed + 1;
      auto mcg = estimate_success(genh, cfg.theta_grid, mch);
      auto an2 = detail::analytic_success_curve(cfg, 2, cfg.theta_grid);
      auto anh = detail::analytic_success_curve(cfg, high_order, cfg.theta_grid);

      // PPP reference curves of matched intensities.
      const double tau = mean_length_density(cfg.model, cfg.mu, cfg.law);
      std::vector<double> p1, p2;
      for (double th : cfg.theta_grid) {
        p1.push_back(ppp_success(1, lp, cfg.params.D, cfg.params.alpha, th));
        p2.push_back(ppp_success(2, tau * lp, cfg.params.D, cfg.params.alpha, th));
      }
      auto ppp1 = detail::constant_err_curve(cfg.theta_grid, p1);
      auto ppp2 = detail::constant_err_curve(cfg.theta_grid, p2);

      const std::string high_name = cfg.model == ModelKind::PLM ? "m3" : "m4";
      write_curves_csv(base + ".csv", "theta", cfg.theta_grid,
                       {{"mc_m2", &mc2},
                        {"mc_" + high_name, &mcg},
                        {"analytic_m2", &an2},
                        {"analytic_" + high_name, &anh},
                        {"ppp1d", &ppp1},
                        {"ppp2d", &ppp2}});
      result.files.push_back(base + ".csv");
      break;
    }

    case ExperimentKind::Nn: {
      if (mc.r_window == 0.0) mc.r_window = cfg.r_grid.back() * 1.25 + 1.0;
      auto gen = make_model_generator(cfg.model, cfg.order, cfg.params, cfg.mu, cfg.law,
                                      mc.r_window);
      auto est = estimate_nn_cdf(gen, cfg.r_grid, mc);
      SirCurve mc_curve;
      mc_curve.kind = SirCurve::Kind::MonteCarlo;
      mc_curve.n = est.n;
      mc_curve.theta = cfg.r_grid;
      mc_curve.value = est.cdf;
      mc_curve.err = est.ci;

      SirCurve an;
      an.kind = SirCurve::Kind::Analytic;
      an.theta = cfg.r_grid;
      for (double r : cfg.r_grid) {
        QuadratureResult q;
        if (cfg.model == ModelKind::OG || cfg.model == ModelKind::PLP)
          q = nn_cdf_og_plp(r, cfg.order, cfg.mu, cfg.params.lambda);
        else
          q = nn_cdf_psp(r, cfg.order == 3 ? 2 : cfg.order, cfg.mu, cfg.params.lambda,
                         cfg.model == ModelKind::PLM
                             ? HalfLengthLaw::rayleigh(cfg.rayleigh_b)
                             : *cfg.law);
        an.value.push_back(q.value);
        an.err.push_back(q.error);
      }
      write_curves_csv(base + ".csv", "r", cfg.r_grid, {{"mc", &mc_curve}, {"analytic", &an}});
      result.files.push_back(base + ".csv");
      break;
    }

    case ExperimentKind::NeighborStats: {
      if (mc.r_window == 0.0) mc.r_window = cfg.r_grid.back() * 1.25 + 1.0;
      auto law = HalfLengthLaw::rayleigh(cfg.rayleigh_b);
      auto gen_plm = make_model_generator(ModelKind::PLM, 2, cfg.params, cfg.mu,
                                          std::nullopt, mc.r_window);
      auto gen_psp =
          make_model_generator(ModelKind::PSP, 2, cfg.params, cfg.mu, law, mc.r_window);
      auto st_plm = neighbor_count_stats(gen_plm, cfg.r_grid, mc);
      McConfig mc2 = mc;
      mc2.seed = mc.seed + 1;
      auto st_psp = neighbor_count_stats(gen_psp, cfg.r_grid, mc2);
      write_neighbor_stats_csv(base + ".csv", st_plm, "plm", st_psp, "psp");
      result.files.push_back(base + ".csv");
      break;
    }

    case ExperimentKind::PlmFit: {
      std::ofstream os(base + ".csv");
      os << "mu,b_hat,samples\n";
      int k = 0;
      for (double mu : {cfg.mu, cfg.mu / 10.0}) {
        const double r_stats = std::sqrt(10000.0 / (mu * std::numbers::pi));
        auto samples = plm_halflength_samples(mu, r_stats, mc.seed + k++);
        os << fmt_double(mu) << "," << fmt_double(fit_plm_halflength(samples)) << ","
           << samples.size() << "\n";
      }
      result.files.push_back(base + ".csv");
      break;
    }

    case ExperimentKind::Equivalence: {
      if (cfg.pair == "og-plp") {
        auto an = detail::analytic_success_curve(cfg, cfg.order, cfg.theta_grid);
        if (mc.r_interference == 0.0)
          mc.r_interference = detail::auto_interference_radius(cfg);
        if (mc.r_window == 0.0) mc.r_window = mc.r_interference;
        auto g_og = make_model_generator(ModelKind::OG, cfg.order, cfg.params, cfg.mu,
                                         std::nullopt, mc.r_window);
        auto g_plp = make_model_generator(ModelKind::PLP, cfg.order, cfg.params, cfg.mu,
                                          std::nullopt, mc.r_window);
        auto c_og = estimate_success(g_og, cfg.theta_grid, mc);
        McConfig mc2 = mc;
        mc2.seed = mc.seed + 1;
        auto c_plp = estimate_success(g_plp, cfg.theta_grid, mc2);
        auto rep = make_report("OG", c_og, "PLP", c_plp, cfg.order);
        write_equivalence_report(base + ".csv", base + ".summary.txt", rep);
        write_curves_csv(base + "_curves.csv", "theta", cfg.theta_grid,
                         {{"mc_og", &c_og}, {"mc_plp", &c_plp}, {"analytic", &an}});
        result.files.push_back(base + ".csv");
        result.files.push_back(base + "_curves.csv");
      } else if (cfg.pair == "psp-plp") {
        std::ofstream os(base + ".csv");
        os << "c,mu_psp,gap\n";
        for (double c : cfg.c_values) {
          const double mu_psp = cfg.mu / (2.0 * c);
          auto law = HalfLengthLaw::deterministic(c);
          double gap = 0.0;
          for (double th : cfg.theta_grid) {
            const double a =
                psp_success(cfg.order, mu_psp, lp, cfg.params.D, cfg.params.alpha, th, law)
                    .value;
            const double b =
                og_plp_success(cfg.order, cfg.mu, lp, cfg.params.D, cfg.params.alpha, th)
                    .value;
            gap = std::max(gap, std::abs(a - b));
          }
          os << fmt_double(c) << "," << fmt_double(mu_psp) << "," << fmt_double(gap)
             << "\n";
        }
        result.files.push_back(base + ".csv");
      } else {  // plm-psp
        if (mc.r_interference == 0.0)
          mc.r_interference = detail::auto_interference_radius(cfg);
        if (mc.r_window == 0.0) mc.r_window = mc.r_interference;
        auto gen = make_model_generator(ModelKind::PLM, 2, cfg.params, cfg.mu,
                                        std::nullopt, mc.r_window);
        auto mc_curve = estimate_success(gen, cfg.theta_grid, mc);
        SirCurve an;
        an.kind = SirCurve::Kind::Analytic;
        an.theta = cfg.theta_grid;
        for (double th : cfg.theta_grid) {
          auto q = plm_success_general(cfg.mu, lp, cfg.params.D, cfg.params.alpha, th,
                                       cfg.rayleigh_b);
          an.value.push_back(q.value);
          an.err.push_back(q.error);
        }
        auto rep = make_report("PLM-mc", mc_curve, "PSP-quadrature", an, 2);
        write_equivalence_report(base + ".csv", base + ".summary.txt", rep);
        write_curves_csv(base + "_curves.csv", "theta", cfg.theta_grid,
                         {{"mc_plm", &mc_curve}, {"analytic_psp", &an}});
        result.files.push_back(base + ".csv");
        result.files.push_back(base + "_curves.csv");
      }
      break;
    }

    case ExperimentKind::NearestTransmitter: {
      // Link distances are random here; size the window by the contact scale.
      const double tau = mean_length_density(
          cfg.model, cfg.mu,
          cfg.law ? cfg.law : std::optional<HalfLengthLaw>(HalfLengthLaw::rayleigh(
                                  cfg.rayleigh_b)));
      if (mc.r_interference == 0.0)
        mc.r_interference = interference_radius(lp, tau, cfg.theta_grid.back(), 1.0,
                                                cfg.params.alpha) +
                            10.0 / std::sqrt(lp * tau);
      if (mc.r_window == 0.0) mc.r_window = mc.r_interference;
      auto law = HalfLengthLaw::rayleigh(cfg.rayleigh_b);
      auto gen_a = make_model_generator(cfg.model, 2, cfg.params, cfg.mu,
                                        cfg.model == ModelKind::PSP
                                            ? std::optional<HalfLengthLaw>(law)
                                            : std::nullopt,
                                        mc.r_window);
      auto curve_a = nearest_transmitter_success(gen_a, cfg.theta_grid, mc);
      if (cfg.model == ModelKind::PLM) {
        McConfig mc2 = mc;
        mc2.seed = mc.seed + 1;
        auto gen_b = make_model_generator(ModelKind::PSP, 2, cfg.params, cfg.mu, law,
                                          mc.r_window);
        auto curve_b = nearest_transmitter_success(gen_b, cfg.theta_grid, mc2);
        auto rep = make_report("PLM", curve_a, "PSP", curve_b, 2);
        write_equivalence_report(base + "_report.csv", base + ".summary.txt", rep);
        write_curves_csv(base + ".csv", "theta", cfg.theta_grid,
                         {{"mc_plm", &curve_a}, {"mc_psp", &curve_b}});
        result.files.push_back(base + "_report.csv");
      } else {
        write_curve_csv(base + ".csv", curve_a);
      }
      result.files.push_back(base + ".csv");
      break;
    }
  }

  write_manifest(base + ".manifest.txt", detail::manifest_common(cfg, mc));
  result.files.push_back(base + ".manifest.txt");
  return result;
}

}  // namespace coxveh
