#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coxveh/cox.hpp"
#include "coxveh/curve.hpp"
#include "coxveh/halflength.hpp"
#include "coxveh/montecarlo.hpp"

namespace coxveh {

enum class ExperimentKind {
  TauCheck,
  Nn,
  NeighborStats,
  Success,
  PlmFit,
  Equivalence,
  NearestTransmitter,
};

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TauCheck: return "tau-check";
    case ExperimentKind::Nn: return "nn";
    case ExperimentKind::NeighborStats: return "neighbor-stats";
    case ExperimentKind::Success: return "success";
    case ExperimentKind::PlmFit: return "plm-fit";
    case ExperimentKind::Equivalence: return "equivalence";
    case ExperimentKind::NearestTransmitter: return "nearest-transmitter";
  }
  return "?";
}

// One experiment, fully specified: what to run, the model and SIR parameters,
// the evaluation grid, and the simulation budget.
struct ExperimentConfig {
  std::string name = "custom";
  ExperimentKind kind = ExperimentKind::Success;
  ModelKind model = ModelKind::PLP;
  std::string pair;  // equivalence only: og-plp | psp-plp | plm-psp
  int order = 2;
  double mu = 1.0;
  ModelParams params;
  std::optional<HalfLengthLaw> law;
  double rayleigh_b = 0.0;  // kept for manifests when law is rayleigh
  std::vector<double> theta_grid;
  std::vector<double> r_grid;
  std::vector<double> c_values{10.0, 100.0, 1000.0};  // psp-plp ladder
  McConfig mc;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

inline IniSections parse_ini(std::istream& is) {
  IniSections out;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any [section]");
    if (key.empty() || val.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    out[section][key] = val;
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(const IniSections& ini, const std::string& name) : name_(name) {
    auto it = ini.find(name);
    if (it != ini.end()) kv_ = it->second;
  }

  std::optional<std::string> get(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    used_.push_back(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw std::invalid_argument("config: [" + name_ + "] is missing " + key);
    return *v;
  }

  double get_double(const std::string& key, double fallback) {
    auto v = get(key);
    return v ? std::stod(*v) : fallback;
  }

  double require_double(const std::string& key) { return std::stod(require(key)); }

  long get_long(const std::string& key, long fallback) {
    auto v = get(key);
    return v ? std::stol(*v) : fallback;
  }

  // Schema strictness: every present key must have been consumed.
  void check_all_used() const {
    for (const auto& [k, v] : kv_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw std::invalid_argument("config: unknown key '" + k + "' in [" + name_ + "]");
    }
  }

 private:
  std::string name_;
  std::map<std::string, std::string> kv_;
  std::vector<std::string> used_;
};

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& is) {
  const auto ini = detail::parse_ini(is);
  for (const auto& [sec, kv] : ini)
    if (sec != "experiment" && sec != "params" && sec != "law" && sec != "grid" &&
        sec != "mc")
      throw std::invalid_argument("config: unknown section [" + sec + "]");

  ExperimentConfig cfg;
  detail::SectionReader exp(ini, "experiment");
  const std::string kind = exp.require("kind");
  if (kind == "tau-check") cfg.kind = ExperimentKind::TauCheck;
  else if (kind == "nn") cfg.kind = ExperimentKind::Nn;
  else if (kind == "neighbor-stats") cfg.kind = ExperimentKind::NeighborStats;
  else if (kind == "success") cfg.kind = ExperimentKind::Success;
  else if (kind == "plm-fit") cfg.kind = ExperimentKind::PlmFit;
  else if (kind == "equivalence") cfg.kind = ExperimentKind::Equivalence;
  else if (kind == "nearest-transmitter") cfg.kind = ExperimentKind::NearestTransmitter;
  else throw std::invalid_argument("config: unknown experiment kind '" + kind + "'");

  if (auto name = exp.get("name")) cfg.name = *name;
  if (auto model = exp.get("model")) {
    auto m = model_from_string(*model);
    if (!m) throw std::invalid_argument("config: unknown model '" + *model + "'");
    cfg.model = *m;
  }
  if (auto pair = exp.get("pair")) {
    if (*pair != "og-plp" && *pair != "psp-plp" && *pair != "plm-psp")
      throw std::invalid_argument("config: unknown equivalence pair '" + *pair + "'");
    cfg.pair = *pair;
  }
  cfg.order = static_cast<int>(exp.get_long("order", 2));
  if (auto cs = exp.get("c_values")) {
    cfg.c_values.clear();
    std::istringstream ss(*cs);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.c_values.push_back(std::stod(detail::trim(tok)));
  }
  exp.check_all_used();

  detail::SectionReader par(ini, "params");
  cfg.mu = par.get_double("mu", 1.0);
  cfg.params.lambda = par.get_double("lambda", 0.3);
  cfg.params.p = par.get_double("p", 1.0);
  cfg.params.D = par.get_double("D", 0.25);
  cfg.params.alpha = par.get_double("alpha", 4.0);
  par.check_all_used();
  cfg.params.validate();
  if (!(cfg.mu >= 0.0)) throw std::invalid_argument("config: mu must be nonnegative");

  detail::SectionReader law(ini, "law");
  if (auto lk = law.get("kind")) {
    if (*lk == "deterministic") {
      cfg.law = HalfLengthLaw::deterministic(law.require_double("h"));
    } else if (*lk == "rayleigh") {
      cfg.rayleigh_b = law.require_double("b");
      cfg.law = HalfLengthLaw::rayleigh(cfg.rayleigh_b);
    } else {
      throw std::invalid_argument("config: unknown law kind '" + *lk + "'");
    }
  }
  law.check_all_used();

  detail::SectionReader grid(ini, "grid");
  {
    const double lo = grid.get_double("theta_min", 1e-2);
    const double hi = grid.get_double("theta_max", 1e2);
    const long n = grid.get_long("theta_points", 40);
    cfg.theta_grid = log_grid(lo, hi, static_cast<std::size_t>(n));
    if (auto rmax = grid.get("r_max")) {
      const double rlo = grid.get_double("r_min", 0.0);
      const long rn = grid.get_long("r_points", 25);
      cfg.r_grid = linear_grid(rlo, std::stod(*rmax), static_cast<std::size_t>(rn));
    }
  }
  grid.check_all_used();

  detail::SectionReader mc(ini, "mc");
  cfg.mc.realizations = static_cast<std::size_t>(mc.get_long("realizations", 10000));
  cfg.mc.seed = static_cast<std::uint64_t>(mc.get_long("seed", 1));
  cfg.mc.jobs = static_cast<int>(mc.get_long("jobs", 0));
  cfg.mc.r_interference = mc.get_double("r_interference", 0.0);
  cfg.mc.r_window = mc.get_double("r_window", 0.0);
  mc.check_all_used();
  cfg.mc.validate();

  // Kind-specific requirements.
  const bool stick_model = cfg.model == ModelKind::PSP || cfg.model == ModelKind::PLM;
  switch (cfg.kind) {
    case ExperimentKind::Nn:
    case ExperimentKind::NeighborStats:
      if (cfg.r_grid.empty())
        throw std::invalid_argument("config: [grid] r_max is required for this kind");
      break;
    case ExperimentKind::Equivalence:
      if (cfg.pair.empty())
        throw std::invalid_argument("config: [experiment] pair is required");
      break;
    default:
      break;
  }
  if (cfg.model == ModelKind::PSP && !cfg.law && cfg.kind != ExperimentKind::Equivalence)
    throw std::invalid_argument("config: PSP experiments need a [law] section");
  if (cfg.model == ModelKind::PLM &&
      (cfg.kind == ExperimentKind::Success || cfg.kind == ExperimentKind::Nn ||
       cfg.kind == ExperimentKind::NeighborStats ||
       cfg.kind == ExperimentKind::NearestTransmitter) &&
      !(cfg.rayleigh_b > 0.0))
    throw std::invalid_argument(
        "config: PLM experiments need [law] kind = rayleigh (the fitted b)");
  if (cfg.kind == ExperimentKind::Equivalence && cfg.pair == "plm-psp" &&
      !(cfg.rayleigh_b > 0.0))
    throw std::invalid_argument("config: plm-psp equivalence needs [law] rayleigh b");
  if (cfg.order != 2 && cfg.order != 3 && cfg.order != 4)
    throw std::invalid_argument("config: order must be 2, 3 or 4");
  if (cfg.order == 3 && cfg.model != ModelKind::PLM)
    throw std::invalid_argument("config: order 3 requires the PLM");
  if (cfg.order == 4 && cfg.model == ModelKind::PLM)
    throw std::invalid_argument("config: the PLM has no order-4 points");
  if (stick_model && cfg.kind == ExperimentKind::TauCheck && !cfg.law)
    throw std::invalid_argument("config: stick-model tau-check needs a [law] section");
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  std::istringstream ss(text);
  return parse_experiment_config(ss);
}

// Built-in configurations reproducing the headline figures at desk scale.
struct CatalogEntry {
  std::string name;
  std::string description;
  std::string ini;
};

inline const std::vector<CatalogEntry>& experiment_catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"fig3b",
       "neighbor-count mean/variance, PLM vs matched PSP (mu=0.01, lambda=0.3)",
       "[experiment]\nkind = neighbor-stats\nmodel = PLM\nname = fig3b\n"
       "[params]\nmu = 0.01\nlambda = 0.3\n"
       "[law]\nkind = rayleigh\nb = 0.0103\n"
       "[grid]\nr_min = 0\nr_max = 30\nr_points = 16\n"
       "[mc]\nrealizations = 4000\nseed = 33\n"},
      {"fig4",
       "lilypond half-length Rayleigh fit at mu=1 and the mu-scaling of b",
       "[experiment]\nkind = plm-fit\nmodel = PLM\nname = fig4\n"
       "[params]\nmu = 1\n"
       "[mc]\nseed = 44\n"},
      {"fig5b",
       "nearest-neighbor distance CDF, PLM MC vs PSP quadrature (mu=0.01)",
       "[experiment]\nkind = nn\nmodel = PLM\nname = fig5b\n"
       "[params]\nmu = 0.01\nlambda = 0.3\n"
       "[law]\nkind = rayleigh\nb = 0.0103\n"
       "[grid]\nr_min = 0.05\nr_max = 4\nr_points = 20\n"
       "[mc]\nrealizations = 20000\nseed = 55\n"},
      {"fig6a",
       "success probability of the typical general/intersection vehicle, PLP (mu=2)",
       "[experiment]\nkind = success\nmodel = PLP\norder = 2\nname = fig6a\n"
       "[params]\nmu = 2\nlambda = 0.3\np = 1\nD = 0.25\nalpha = 4\n"
       "[grid]\ntheta_points = 40\n"
       "[mc]\nrealizations = 20000\nseed = 66\n"},
      {"fig6b",
       "success probability, PSP with h = 10 (mu = 0.1)",
       "[experiment]\nkind = success\nmodel = PSP\norder = 2\nname = fig6b\n"
       "[params]\nmu = 0.1\nlambda = 0.3\np = 1\nD = 0.25\nalpha = 4\n"
       "[law]\nkind = deterministic\nh = 10\n"
       "[grid]\ntheta_points = 40\n"
       "[mc]\nrealizations = 20000\nseed = 67\n"},
      {"fig6c",
       "success probability, PLM general and T-junction vehicles (mu = 0.3)",
       "[experiment]\nkind = success\nmodel = PLM\norder = 2\nname = fig6c\n"
       "[params]\nmu = 0.3\nlambda = 0.3\np = 1\nD = 0.25\nalpha = 4\n"
       "[law]\nkind = rayleigh\nb = 0.312\n"
       "[grid]\ntheta_points = 40\n"
       "[mc]\nrealizations = 4000\nseed = 68\n"},
      {"fig7",
       "equivalence report: PLM MC vs PSP quadrature approximation (mu = 1)",
       "[experiment]\nkind = equivalence\nmodel = PLM\npair = plm-psp\nname = fig7\n"
       "[params]\nmu = 1\nlambda = 0.3\np = 1\nD = 0.25\nalpha = 4\n"
       "[law]\nkind = rayleigh\nb = 1.04\n"
       "[grid]\ntheta_points = 40\n"
       "[mc]\nrealizations = 4000\nseed = 77\n"},
      {"fig8",
       "nearest-transmitter success, PLM vs matched PSP (mu = 1, lambda p = 0.5)",
       "[experiment]\nkind = nearest-transmitter\nmodel = PLM\nname = fig8\n"
       "[params]\nmu = 1\nlambda = 0.5\np = 1\nalpha = 4\n"
       "[grid]\ntheta_points = 25\n"
       "[law]\nkind = rayleigh\nb = 1.04\n"
       "[mc]\nrealizations = 4000\nseed = 88\n"},
      {"fig9",
       "success probability, PSP vs its 1-D and 2-D PPP asymptotes (mu = 0.1, h = 10)",
       "[experiment]\nkind = success\nmodel = PSP\norder = 2\nname = fig9\n"
       "[params]\nmu = 0.1\nlambda = 0.3\np = 1\nD = 0.25\nalpha = 4\n"
       "[law]\nkind = deterministic\nh = 10\n"
       "[grid]\ntheta_points = 40\n"
       "[mc]\nrealizations = 20000\nseed = 99\n"},
      {"tau",
       "street-length intensity check for all four models",
       "[experiment]\nkind = tau-check\nmodel = PLP\nname = tau\n"
       "[params]\nmu = 1\n"
       "[mc]\nrealizations = 1000\nseed = 11\n"},
  };
  return entries;
}

inline std::string list_experiments() {
  std::ostringstream os;
  for (const auto& e : experiment_catalog())
    os << e.name << "  -  " << e.description << "\n";
  return os.str();
}

inline std::optional<ExperimentConfig> catalog_config(const std::string& name) {
  for (const auto& e : experiment_catalog())
    if (e.name == name) return parse_experiment_config(e.ini);
  return std::nullopt;
}

}  // namespace coxveh
