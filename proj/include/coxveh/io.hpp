#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coxveh/cox.hpp"
#include "coxveh/curve.hpp"
#include "coxveh/equivalence.hpp"
#include "coxveh/geometry.hpp"
#include "coxveh/montecarlo.hpp"

namespace coxveh {

inline std::string fmt_double(double v, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Street-system text format: one header row carrying the metadata, then one
// record per street:
//   line,<offset>,,<angle>,
//   stick,<mid.x>,<mid.y>,<angle>,<half_len>[,trunc]

inline void write_streets(std::ostream& os, const StreetSystem& sys) {
  os << "model=" << to_string(sys.model) << ",mu=" << fmt_double(sys.mu, 17)
     << ",window=" << fmt_double(sys.window_radius, 17) << ",seed=" << sys.seed << "\n";
  for (const auto& l : sys.lines)
    os << "line," << fmt_double(l.offset, 17) << ",," << fmt_double(l.angle, 17) << ",\n";
  for (const auto& s : sys.sticks) {
    os << "stick," << fmt_double(s.mid.x, 17) << "," << fmt_double(s.mid.y, 17) << ","
       << fmt_double(s.angle, 17) << "," << fmt_double(s.half_len, 17);
    if (s.truncated) os << ",trunc";
    os << "\n";
  }
}

inline void write_streets(const std::string& path, const StreetSystem& sys) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_streets(os, sys);
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

}  // namespace detail

inline StreetSystem read_streets(std::istream& is) {
  StreetSystem sys;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("street file: missing header");
  for (const auto& kv : detail::split(line, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("street file: bad header field " + kv);
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "model") {
      auto m = model_from_string(val);
      if (!m) throw std::runtime_error("street file: unknown model " + val);
      sys.model = *m;
    } else if (key == "mu") {
      sys.mu = std::stod(val);
    } else if (key == "window") {
      sys.window_radius = std::stod(val);
    } else if (key == "seed") {
      sys.seed = std::stoull(val);
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() < 5) throw std::runtime_error("street file: short record: " + line);
    if (f[0] == "line") {
      sys.lines.emplace_back(std::stod(f[1]), std::stod(f[3]));
    } else if (f[0] == "stick") {
      sys.sticks.emplace_back(Vec2{std::stod(f[1]), std::stod(f[2])}, std::stod(f[3]),
                              std::stod(f[4]), f.size() > 5 && f[5] == "trunc");
    } else {
      throw std::runtime_error("street file: unknown street kind " + f[0]);
    }
  }
  return sys;
}

inline StreetSystem read_streets(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_streets(is);
}

// ---------------------------------------------------------------------------
// Scenario dump: streets (own first, then background) plus vehicle records
// `street_id,offset,active` where offset is the position along the street
// measured from its reference point (line foot / stick midpoint).

inline void write_scenario(const std::string& street_path, const std::string& vehicle_path,
                           const TypicalScenario& sc) {
  StreetSystem all;
  all.model = sc.background.model;
  all.mu = sc.background.mu;
  all.window_radius = sc.sample_radius;
  all.seed = sc.background.seed;
  all.lines = sc.own_lines;
  all.lines.insert(all.lines.end(), sc.background.lines.begin(), sc.background.lines.end());
  all.sticks = sc.own_sticks;
  all.sticks.insert(all.sticks.end(), sc.background.sticks.begin(),
                    sc.background.sticks.end());
  write_streets(street_path, all);

  std::ofstream os(vehicle_path);
  if (!os) throw std::runtime_error("cannot open " + vehicle_path);
  os << "street_id,offset,active\n";
  const std::size_t own_lines = sc.own_lines.size();
  const std::size_t own_sticks = sc.own_sticks.size();
  auto emit = [&](const VehicleSet& vs, bool own) {
    for (const auto& v : vs.points) {
      std::size_t id;
      double offset;
      const std::size_t s = v.street;
      const std::size_t line_count = all.lines.size();
      if (own) {
        if (s < own_lines) {
          id = s;
          offset = (v.pos - sc.own_lines[s].foot()).dot(sc.own_lines[s].dir());
        } else {
          id = line_count + (s - own_lines);
          const auto& st = sc.own_sticks[s - own_lines];
          offset = (v.pos - st.mid).dot(st.dir());
        }
      } else {
        if (s < sc.background.lines.size()) {
          id = own_lines + s;
          offset = (v.pos - sc.background.lines[s].foot()).dot(sc.background.lines[s].dir());
        } else {
          const std::size_t k = s - sc.background.lines.size();
          id = line_count + own_sticks + k;
          const auto& st = sc.background.sticks[k];
          offset = (v.pos - st.mid).dot(st.dir());
        }
      }
      os << id << "," << fmt_double(offset, 17) << "," << (v.active ? 1 : 0) << "\n";
    }
  };
  emit(sc.own_vehicles, true);
  emit(sc.background_vehicles, false);
}

// ---------------------------------------------------------------------------
// CSV outputs

inline void write_curve_csv(const std::string& path, const SirCurve& curve,
                            const std::string& x_name = "theta") {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << x_name << ",value,err_or_ci,kind\n";
  const char* kind = curve.kind == SirCurve::Kind::Analytic ? "analytic" : "mc";
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << fmt_double(curve.theta[i]) << "," << fmt_double(curve.value[i]) << ","
       << fmt_double(curve.err[i]) << "," << kind << "\n";
}

// Several curves over a shared grid, one value/err column pair per curve.
inline void write_curves_csv(const std::string& path, const std::string& x_name,
                             const std::vector<double>& x,
                             const std::vector<std::pair<std::string, const SirCurve*>>& curves) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << x_name;
  for (const auto& [name, c] : curves) os << "," << name << "," << name << "_err";
  os << "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << fmt_double(x[i]);
    for (const auto& [name, c] : curves) {
      if (c->theta.size() != x.size() || c->theta[i] != x[i])
        throw std::invalid_argument("curve " + name + " grid mismatch");
      os << "," << fmt_double(c->value[i]) << "," << fmt_double(c->err[i]);
    }
    os << "\n";
  }
}

inline void write_neighbor_stats_csv(const std::string& path, const NeighborStats& a,
                                     const std::string& name_a, const NeighborStats& b,
                                     const std::string& name_b) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "r," << name_a << "_mean," << name_a << "_mean_ci," << name_a << "_var," << name_a
     << "_var_ci," << name_b << "_mean," << name_b << "_mean_ci," << name_b << "_var,"
     << name_b << "_var_ci\n";
  for (std::size_t i = 0; i < a.r.size(); ++i)
    os << fmt_double(a.r[i]) << "," << fmt_double(a.mean[i]) << "," << fmt_double(a.mean_ci[i])
       << "," << fmt_double(a.var[i]) << "," << fmt_double(a.var_ci[i]) << ","
       << fmt_double(b.mean[i]) << "," << fmt_double(b.mean_ci[i]) << ","
       << fmt_double(b.var[i]) << "," << fmt_double(b.var_ci[i]) << "\n";
}

// Run manifest: plain key=value lines, enough to rerun the experiment.
inline void write_manifest(const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
}

inline void write_equivalence_report(const std::string& csv_path,
                                     const std::string& summary_path,
                                     const EquivalenceReport& rep) {
  {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot open " + csv_path);
    os << "model_a,model_b,order,epsilon,theta_at_max,combined_ci,low_theta_ratio,"
          "high_theta_ratio\n";
    os << rep.model_a << "," << rep.model_b << "," << rep.order << ","
       << fmt_double(rep.tv.epsilon) << "," << fmt_double(rep.tv.theta_at_max) << ","
       << fmt_double(rep.tv.combined_ci) << "," << fmt_double(rep.low_theta_ratio) << ","
       << fmt_double(rep.high_theta_ratio) << "\n";
  }
  std::ofstream os(summary_path);
  if (!os) throw std::runtime_error("cannot open " + summary_path);
  os << rep.model_a << " vs " << rep.model_b << " (order " << rep.order << ")\n";
  os << "  epsilon = " << fmt_double(rep.tv.epsilon) << " at theta = "
     << fmt_double(rep.tv.theta_at_max);
  if (rep.tv.ci_aware)
    os << "  (+/- " << fmt_double(rep.tv.combined_ci) << " combined CI)";
  os << "\n";
  os << "  outage ratio at low theta:  " << fmt_double(rep.low_theta_ratio) << "\n";
  os << "  success ratio at high theta: " << fmt_double(rep.high_theta_ratio) << "\n";
}

}  // namespace coxveh
