#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coxveh/halflength.hpp"
#include "coxveh/rng.hpp"

namespace coxveh {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

// Point-on-segment and contact tests share one absolute tolerance, in window
// units.
inline constexpr double kGeomTol = 1e-9;

inline double normalize_angle(double phi) {
  const double pi = std::numbers::pi;
  phi = std::fmod(phi, pi);
  if (phi < 0.0) phi += pi;
  return phi;
}

inline Vec2 unit(double phi) { return {std::cos(phi), std::sin(phi)}; }

// Infinite street {(a,b): a cos(angle) + b sin(angle) = offset}. The foot of
// the perpendicular from the origin is at offset * unit(angle); the line runs
// along (-sin(angle), cos(angle)).
struct Line {
  double offset = 0.0;
  double angle = 0.0;  // in [0, pi)

  Line() = default;
  Line(double offset, double angle) : offset(offset), angle(normalize_angle(angle)) {}

  Vec2 foot() const { return unit(angle) * offset; }
  Vec2 dir() const { return {-std::sin(angle), std::cos(angle)}; }
  Vec2 point_at(double s) const { return foot() + dir() * s; }
};

// Finite street [mid - h u, mid + h u] with u = unit(angle).
struct Stick {
  Vec2 mid;
  double angle = 0.0;  // in [0, pi)
  double half_len = 0.0;
  bool truncated = false;  // lilypond growth hit the cap instead of a blocker

  Stick() = default;
  Stick(Vec2 mid, double angle, double half_len, bool truncated = false)
      : mid(mid), angle(normalize_angle(angle)), half_len(half_len), truncated(truncated) {
    if (!(half_len > 0.0)) throw std::invalid_argument("stick half-length must be positive");
  }

  Vec2 dir() const { return unit(angle); }
  Vec2 point_at(double s) const { return mid + dir() * s; }
  Vec2 endpoint(int sign) const { return point_at(sign > 0 ? half_len : -half_len); }
  double mid_radius() const { return mid.norm(); }
  double mid_polar_angle() const { return std::atan2(mid.y, mid.x); }
};

enum class ModelKind { OG, PLP, PSP, PLM };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::OG: return "OG";
    case ModelKind::PLP: return "PLP";
    case ModelKind::PSP: return "PSP";
    case ModelKind::PLM: return "PLM";
  }
  return "?";
}

inline std::optional<ModelKind> model_from_string(const std::string& s) {
  if (s == "OG") return ModelKind::OG;
  if (s == "PLP") return ModelKind::PLP;
  if (s == "PSP") return ModelKind::PSP;
  if (s == "PLM") return ModelKind::PLM;
  return std::nullopt;
}

// One realization of a street system in (and somewhat beyond) a disk window.
// Line models populate `lines`, stick models `sticks`. Stick models are
// sampled on a padded disk so that every street that can reach the analysis
// window is present.
struct StreetSystem {
  ModelKind model = ModelKind::PLP;
  double mu = 0.0;
  double window_radius = 0.0;
  std::uint64_t seed = 0;
  std::vector<Line> lines;
  std::vector<Stick> sticks;
  std::vector<Vec2> tjunctions;  // contact points recorded by lilypond growth

  std::size_t street_count() const { return lines.size() + sticks.size(); }
};

// Decomposition of a street system into points of order 1 (free endpoints),
// 3 (T-junctions), 4 (transversal crossings) inside the window, plus the
// total order-2 street length there.
struct JunctionSet {
  std::vector<Vec2> order1;
  std::vector<Vec2> order3;
  std::vector<Vec2> order4;
  double order2_length = 0.0;
};

struct GrowthEvent {
  double time = 0.0;         // equals the stopped stick's final half-length
  std::size_t stopped = 0;
  std::size_t blocker = 0;
  Vec2 contact;
};

// ---------------------------------------------------------------------------
// Chord geometry

// Parameter interval (along the street, relative to its reference point) cut
// out by the disk b(center, r); nullopt if the street misses the disk.
struct ParamInterval {
  double lo, hi;
  double length() const { return hi - lo; }
};

inline std::optional<ParamInterval> clip_to_disk(const Stick& s, Vec2 center, double r) {
  const Vec2 w = s.mid - center;
  const Vec2 u = s.dir();
  const double wu = w.dot(u);
  const double disc = wu * wu - (w.norm2() - r * r);
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double lo = std::max(-wu - root, -s.half_len);
  const double hi = std::min(-wu + root, s.half_len);
  if (hi <= lo) return std::nullopt;
  return ParamInterval{lo, hi};
}

inline std::optional<ParamInterval> clip_to_disk(const Line& l, Vec2 center, double r) {
  const Vec2 n = unit(l.angle);
  const double d = l.offset - center.dot(n);  // signed distance center -> line
  if (std::abs(d) > r) return std::nullopt;
  const double half = std::sqrt(r * r - d * d);
  const double t0 = (center - l.foot()).dot(l.dir());
  return ParamInterval{t0 - half, t0 + half};
}

// |stick ∩ b(o,r)|_1.
inline double disk_chord_length(const Stick& s, double r) {
  auto iv = clip_to_disk(s, Vec2{0.0, 0.0}, r);
  return iv ? iv->length() : 0.0;
}

// |line ∩ b(o,r)|_1 = 2 sqrt(r^2 - x^2).
inline double line_disk_chord(const Line& l, double r) {
  if (std::abs(l.offset) > r) return 0.0;
  return 2.0 * std::sqrt(r * r - l.offset * l.offset);
}

inline double total_length_in(const StreetSystem& sys, Vec2 center, double r) {
  double total = 0.0;
  for (const auto& l : sys.lines)
    if (auto iv = clip_to_disk(l, center, r)) total += iv->length();
  for (const auto& s : sys.sticks)
    if (auto iv = clip_to_disk(s, center, r)) total += iv->length();
  return total;
}

inline double total_length_in(const StreetSystem& sys, double r) {
  return total_length_in(sys, Vec2{0.0, 0.0}, r);
}

// ---------------------------------------------------------------------------
// Samplers

namespace detail {

inline void check_window(double mu, double r_w) {
  if (!(mu > 0.0)) throw std::invalid_argument("street intensity mu must be positive");
  if (!(r_w > 0.0)) throw std::invalid_argument("window radius must be positive");
}

inline Vec2 uniform_in_disk(Rng& rng, double r) {
  const double rad = r * std::sqrt(uniform01(rng));
  const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

template <typename AngleFn>
StreetSystem sample_line_system(ModelKind model, double mu, double r_w, Rng& rng,
                                AngleFn&& angle_of) {
  check_window(mu, r_w);
  StreetSystem sys;
  sys.model = model;
  sys.mu = mu;
  sys.window_radius = r_w;
  const long n = poisson(rng, mu * 2.0 * r_w);
  sys.lines.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = uniform(rng, -r_w, r_w);
    sys.lines.emplace_back(x, angle_of(rng));
  }
  return sys;
}

}  // namespace detail

// Orthogonal grid with exponential spacing: offsets form a 1-D Poisson process
// of intensity mu, angles are 0 or pi/2 with equal probability.
inline StreetSystem sample_og(double mu, double r_w, Rng& rng) {
  return detail::sample_line_system(ModelKind::OG, mu, r_w, rng, [](Rng& r) {
    return bernoulli(r, 0.5) ? 0.0 : std::numbers::pi / 2.0;
  });
}

// Poisson line process: as sample_og but with isotropic orientations.
inline StreetSystem sample_plp(double mu, double r_w, Rng& rng) {
  return detail::sample_line_system(ModelKind::PLP, mu, r_w, rng, [](Rng& r) {
    return uniform(r, 0.0, std::numbers::pi);
  });
}

// Edge-effect guard: midpoints are sampled on a disk padded by the
// (1 - 1e-6) half-length quantile so that sticks reaching into the window
// from outside are not lost.
inline constexpr double kPadQuantile = 1.0 - 1e-6;

// Poisson stick process: midpoints form a 2-D Poisson process of intensity mu
// on the padded disk, orientations are uniform on [0, pi), half-lengths are
// i.i.d. from `law`.
inline StreetSystem sample_psp(double mu, const HalfLengthLaw& law, double r_w, Rng& rng) {
  detail::check_window(mu, r_w);
  const double pad = law.quantile(kPadQuantile);
  const double r_gen = r_w + pad;
  StreetSystem sys;
  sys.model = ModelKind::PSP;
  sys.mu = mu;
  sys.window_radius = r_w;
  const long n = poisson(rng, mu * std::numbers::pi * r_gen * r_gen);
  sys.sticks.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const Vec2 mid = detail::uniform_in_disk(rng, r_gen);
    const double ang = uniform(rng, 0.0, std::numbers::pi);
    sys.sticks.emplace_back(mid, ang, law.sample(rng));
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

// Uniform hash grid over stick midpoints for neighborhood queries.
class StickGrid {
 public:
  StickGrid(const std::vector<Stick>& sticks, double cell) : cell_(cell) {
    buckets_.reserve(sticks.size());
    for (std::size_t i = 0; i < sticks.size(); ++i)
      buckets_[key(sticks[i].mid)].push_back(i);
  }

  template <typename Visit>
  void for_each_in_range(Vec2 p, double range, Visit&& visit) const {
    const int k = static_cast<int>(std::ceil(range / cell_));
    const int cx = coord(p.x), cy = coord(p.y);
    for (int dx = -k; dx <= k; ++dx)
      for (int dy = -k; dy <= k; ++dy) {
        auto it = buckets_.find(pack(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t idx : it->second) visit(idx);
      }
  }

  double cell() const { return cell_; }
  int coord(double v) const { return static_cast<int>(std::floor(v / cell_)); }

 private:
  static std::uint64_t pack(int x, int y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint32_t>(y);
  }
  std::uint64_t key(Vec2 p) const { return pack(coord(p.x), coord(p.y)); }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

inline double grid_cell_for(const std::vector<Stick>& sticks, double fallback) {
  double hmax = 0.0;
  for (const auto& s : sticks) hmax = std::max(hmax, s.half_len);
  return std::max(hmax > 0.0 ? hmax : fallback, 1e-6);
}

// Signed parameters (a on s1, b on s2) of the support-line crossing.
inline std::optional<std::pair<double, double>> line_cross_params(const Stick& s1,
                                                                  const Stick& s2) {
  const Vec2 u1 = s1.dir(), u2 = s2.dir();
  const double cr = u1.cross(u2);
  if (std::abs(cr) < 1e-12) return std::nullopt;
  const Vec2 d = s2.mid - s1.mid;
  return std::make_pair(d.cross(u2) / cr, -u1.cross(d) / cr);
}

inline double point_segment_distance(Vec2 p, const Stick& s) {
  const double t = std::clamp((p - s.mid).dot(s.dir()), -s.half_len, s.half_len);
  return (p - s.point_at(t)).norm();
}

}  // namespace detail

// Enumerates junction points inside the window disk and the order-2 street
// mass there. Endpoint/contact classification uses kGeomTol.
inline JunctionSet decompose(const StreetSystem& sys) {
  JunctionSet js;
  const double r_w = sys.window_radius;
  js.order2_length = total_length_in(sys, r_w);

  // Line-line crossings (OG / PLP).
  for (std::size_t i = 0; i < sys.lines.size(); ++i) {
    for (std::size_t j = i + 1; j < sys.lines.size(); ++j) {
      const Line &a = sys.lines[i], &b = sys.lines[j];
      const Vec2 ua = a.dir(), ub = b.dir();
      const double cr = ua.cross(ub);
      if (std::abs(cr) < 1e-12) continue;
      const Vec2 d = b.foot() - a.foot();
      const double t = d.cross(ub) / cr;
      const Vec2 p = a.point_at(t);
      if (p.norm() <= r_w) js.order4.push_back(p);
    }
  }

  if (sys.sticks.empty()) return js;

  const detail::StickGrid grid(sys.sticks, detail::grid_cell_for(sys.sticks, r_w));

  // Transversal stick crossings: strictly interior on both sticks.
  for (std::size_t i = 0; i < sys.sticks.size(); ++i) {
    const Stick& a = sys.sticks[i];
    grid.for_each_in_range(a.mid, a.half_len + grid.cell(), [&](std::size_t j) {
      if (j <= i) return;
      const Stick& b = sys.sticks[j];
      if ((a.mid - b.mid).norm() > a.half_len + b.half_len + kGeomTol) return;
      auto ab = detail::line_cross_params(a, b);
      if (!ab) return;
      const auto [sa, sb] = *ab;
      if (std::abs(sa) < a.half_len - kGeomTol && std::abs(sb) < b.half_len - kGeomTol) {
        const Vec2 p = a.point_at(sa);
        if (p.norm() <= r_w) js.order4.push_back(p);
      }
    });
  }

  // Endpoints: resting on another stick -> order 3, free -> order 1.
  for (std::size_t i = 0; i < sys.sticks.size(); ++i) {
    const Stick& a = sys.sticks[i];
    for (int sign : {-1, +1}) {
      const Vec2 p = a.endpoint(sign);
      if (p.norm() > r_w) continue;
      bool touching = false;
      grid.for_each_in_range(p, grid.cell(), [&](std::size_t j) {
        if (touching || j == i) return;
        touching = detail::point_segment_distance(p, sys.sticks[j]) <= kGeomTol;
      });
      (touching ? js.order3 : js.order1).push_back(p);
    }
  }
  return js;
}

}  // namespace coxveh
