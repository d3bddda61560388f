#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "coxveh/geometry.hpp"
#include "coxveh/halflength.hpp"
#include "coxveh/lilypond.hpp"
#include "coxveh/rng.hpp"

namespace coxveh {

// SIR model parameters. theta grids live in the experiment configs; delta is
// derived.
struct ModelParams {
  double lambda = 0.0;  // vehicles per unit street length
  double p = 1.0;       // ALOHA transmit probability
  double D = 1.0;       // link distance
  double alpha = 4.0;   // path-loss exponent

  double delta() const { return 2.0 / alpha; }

  void validate() const {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
    if (!(D > 0.0)) throw std::invalid_argument("link distance D must be positive");
    if (!(alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  }
};

struct Vehicle {
  Vec2 pos;
  std::uint32_t street = 0;  // index into the owning street list
  bool active = true;        // ALOHA mark
};

struct VehicleSet {
  std::vector<Vehicle> points;

  std::size_t size() const { return points.size(); }
};

namespace detail {

// 1-D Poisson process of intensity lambda on one street's parameter interval.
template <typename Street>
void sample_on_interval(const Street& st, const ParamInterval& iv, double lambda,
                        std::uint32_t street_id, Rng& rng, std::vector<Vehicle>& out) {
  const long n = poisson(rng, lambda * iv.length());
  for (long k = 0; k < n; ++k) {
    const double s = uniform(rng, iv.lo, iv.hi);
    out.push_back({st.point_at(s), street_id, true});
  }
}

}  // namespace detail

// Vehicles form independent 1-D Poisson processes of intensity lambda along
// the streets, restricted to b(o, cut_radius). Sticks are cut as well, so a
// caller that needs vehicles on full sticks must pass a cut radius that covers
// them.
inline VehicleSet sample_vehicles_within(const StreetSystem& sys, double lambda,
                                         double cut_radius, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  VehicleSet vs;
  if (lambda == 0.0) return vs;
  const Vec2 o{0.0, 0.0};
  std::uint32_t id = 0;
  for (const auto& l : sys.lines) {
    if (auto iv = clip_to_disk(l, o, cut_radius))
      detail::sample_on_interval(l, *iv, lambda, id, rng, vs.points);
    ++id;
  }
  for (const auto& s : sys.sticks) {
    if (auto iv = clip_to_disk(s, o, cut_radius))
      detail::sample_on_interval(s, *iv, lambda, id, rng, vs.points);
    ++id;
  }
  return vs;
}

// Vehicles on the full extent of every street, with lines cut at the window
// (an infinite line cannot carry a realizable point set).
inline VehicleSet sample_vehicles(const StreetSystem& sys, double lambda, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  VehicleSet vs;
  if (lambda == 0.0) return vs;
  const Vec2 o{0.0, 0.0};
  std::uint32_t id = 0;
  for (const auto& l : sys.lines) {
    if (auto iv = clip_to_disk(l, o, sys.window_radius))
      detail::sample_on_interval(l, *iv, lambda, id, rng, vs.points);
    ++id;
  }
  for (const auto& s : sys.sticks) {
    detail::sample_on_interval(s, ParamInterval{-s.half_len, s.half_len}, lambda, id, rng,
                               vs.points);
    ++id;
  }
  return vs;
}

// Independent Bernoulli(p) retention (slotted ALOHA).
inline VehicleSet thin_aloha(const VehicleSet& vs, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
  VehicleSet out;
  out.points.reserve(vs.points.size());
  for (const auto& v : vs.points)
    if (bernoulli(rng, p)) out.points.push_back(v);
  return out;
}

// Marks ALOHA activity in place instead of dropping points.
inline void mark_aloha(VehicleSet& vs, double p, Rng& rng) {
  for (auto& v : vs.points) v.active = bernoulli(rng, p);
}

// Palm-conditioned realization around the typical vehicle of order m: the
// street(s) through (and for order 3, ending at) the origin plus an
// independent background system. Vehicles are sampled within b(o, sample_radius)
// only; the typical vehicle itself is a receiver and never appears in the
// vehicle lists.
struct TypicalScenario {
  int order = 2;
  std::vector<Line> own_lines;
  std::vector<Stick> own_sticks;
  VehicleSet own_vehicles;
  StreetSystem background;
  VehicleSet background_vehicles;
  ModelParams params;
  double sample_radius = 0.0;
  // Palm-estimator weight. Exact conditioning (Slivnyak) yields 1; empirical
  // pick-and-translate conditioning yields the number of pick candidates, so
  // that weighted averages estimate E[sum over candidates]/E[#candidates].
  double weight = 1.0;

  std::size_t vehicle_count() const {
    return own_vehicles.size() + background_vehicles.size();
  }
};

// OG/PLP typical vehicle: m/2 lines through the origin plus an independent
// line system. Order 3 does not exist in (2,4)-street systems.
inline TypicalScenario condition_typical_line_model(ModelKind model, int m,
                                                    const ModelParams& params, double mu,
                                                    double r_w, Rng& rng) {
  if (model != ModelKind::OG && model != ModelKind::PLP)
    throw std::invalid_argument("line-model conditioning needs OG or PLP");
  if (m != 2 && m != 4)
    throw std::invalid_argument("line models support typical-vehicle orders 2 and 4 only");
  params.validate();
  TypicalScenario sc;
  sc.order = m;
  sc.params = params;
  sc.sample_radius = r_w;
  if (model == ModelKind::OG) {
    if (m == 2) {
      sc.own_lines.emplace_back(0.0, bernoulli(rng, 0.5) ? 0.0 : std::numbers::pi / 2.0);
    } else {
      sc.own_lines.emplace_back(0.0, 0.0);
      sc.own_lines.emplace_back(0.0, std::numbers::pi / 2.0);
    }
  } else {
    for (int k = 0; k < m / 2; ++k)
      sc.own_lines.emplace_back(0.0, uniform(rng, 0.0, std::numbers::pi));
  }
  sc.background =
      model == ModelKind::OG ? sample_og(mu, r_w, rng) : sample_plp(mu, r_w, rng);

  const Vec2 o{0.0, 0.0};
  std::uint32_t id = 0;
  for (const auto& l : sc.own_lines) {
    if (auto iv = clip_to_disk(l, o, r_w))
      detail::sample_on_interval(l, *iv, params.lambda, id, rng, sc.own_vehicles.points);
    ++id;
  }
  sc.background_vehicles = sample_vehicles_within(sc.background, params.lambda, r_w, rng);
  return sc;
}

// PSP typical vehicle: each own stick has a length-biased half-length, a
// uniform orientation, and its midpoint at a uniform signed offset along the
// stick, so the origin lies on it.
inline TypicalScenario condition_typical_psp(int m, const ModelParams& params, double mu,
                                             const HalfLengthLaw& law, double r_w, Rng& rng) {
  if (m != 2 && m != 4)
    throw std::invalid_argument("PSP conditioning supports orders 2 and 4 only");
  params.validate();
  TypicalScenario sc;
  sc.order = m;
  sc.params = params;
  sc.sample_radius = r_w;
  for (int k = 0; k < m / 2; ++k) {
    const double h = law.sample_biased(rng);
    const double ang = uniform(rng, 0.0, std::numbers::pi);
    const double w = uniform(rng, -h, h);
    sc.own_sticks.emplace_back(unit(ang) * w, ang, h);
  }
  sc.background = sample_psp(mu, law, r_w, rng);

  const Vec2 o{0.0, 0.0};
  std::uint32_t id = 0;
  for (const auto& s : sc.own_sticks) {
    if (auto iv = clip_to_disk(s, o, r_w))
      detail::sample_on_interval(s, *iv, params.lambda, id, rng, sc.own_vehicles.points);
    ++id;
  }
  sc.background_vehicles = sample_vehicles_within(sc.background, params.lambda, r_w, rng);
  return sc;
}

// PLM typical vehicle by empirical Palm sampling: realize a lilypond field
// with vehicles, pick a uniform vehicle (order 2) or T-junction (order 3)
// inside the central pick region, and translate it to the origin. r_w is the
// radius around the picked point that must be fully covered by the field.
inline TypicalScenario condition_typical_plm(int order, const ModelParams& params, double mu,
                                             double r_w, Rng& rng, double pick_radius = 0.0,
                                             double t_cap = 0.0, int max_retries = 64) {
  if (order != 2 && order != 3)
    throw std::invalid_argument("PLM conditioning supports orders 2 and 3 only");
  params.validate();
  if (t_cap <= 0.0) t_cap = default_t_cap(mu);
  if (pick_radius <= 0.0) pick_radius = std::max(2.0 / std::sqrt(mu), 2.0);
  const double r_field = pick_radius + r_w;
  const double r_gen = r_field + t_cap;

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    const long n = poisson(rng, mu * std::numbers::pi * r_gen * r_gen);
    std::vector<Seed> seeds;
    seeds.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
      seeds.push_back(
          {detail::uniform_in_disk(rng, r_gen), uniform(rng, 0.0, std::numbers::pi)});
    auto grown = grow_lilypond(seeds, t_cap);

    StreetSystem field;
    field.model = ModelKind::PLM;
    field.mu = mu;
    field.window_radius = r_field;
    field.sticks = std::move(grown.sticks);
    VehicleSet field_vehicles =
        sample_vehicles_within(field, params.lambda, r_field, rng);

    Vec2 center;
    std::size_t through_idx = static_cast<std::size_t>(-1);
    std::size_t ending_idx = static_cast<std::size_t>(-1);
    std::size_t picked_vehicle = static_cast<std::size_t>(-1);
    std::size_t candidate_count = 0;
    if (order == 2) {
      // Vehicle-uniform selection inside the pick region; uniformity over
      // vehicles is exactly the length-biased (Palm) weighting of streets.
      std::vector<std::size_t> candidates;
      for (std::size_t k = 0; k < field_vehicles.points.size(); ++k)
        if (field_vehicles.points[k].pos.norm() <= pick_radius) candidates.push_back(k);
      if (candidates.empty()) continue;
      candidate_count = candidates.size();
      picked_vehicle = candidates[static_cast<std::size_t>(
          std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng))];
      center = field_vehicles.points[picked_vehicle].pos;
      through_idx = field_vehicles.points[picked_vehicle].street;
    } else {
      std::vector<std::size_t> candidates;
      for (std::size_t e = 0; e < grown.events.size(); ++e)
        if (grown.events[e].contact.norm() <= pick_radius) candidates.push_back(e);
      if (candidates.empty()) continue;
      candidate_count = candidates.size();
      const auto pick = candidates[static_cast<std::size_t>(
          std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng))];
      center = grown.events[pick].contact;
      ending_idx = grown.events[pick].stopped;
      through_idx = grown.events[pick].blocker;
    }

    TypicalScenario sc;
    sc.order = order;
    sc.params = params;
    sc.sample_radius = r_w;
    sc.weight = static_cast<double>(candidate_count);
    sc.background.model = ModelKind::PLM;
    sc.background.mu = mu;
    sc.background.window_radius = r_w;
    // Translate the field so the picked point sits at the origin, splitting
    // own streets (through/ending) from the rest.
    std::vector<std::uint32_t> remap(field.sticks.size());
    for (std::size_t i = 0; i < field.sticks.size(); ++i) {
      Stick s = field.sticks[i];
      s.mid = s.mid - center;
      if (i == through_idx || i == ending_idx) {
        remap[i] = static_cast<std::uint32_t>(sc.own_sticks.size());
        sc.own_sticks.push_back(s);
      } else {
        remap[i] = static_cast<std::uint32_t>(sc.background.sticks.size());
        sc.background.sticks.push_back(s);
      }
    }
    for (std::size_t k = 0; k < field_vehicles.points.size(); ++k) {
      if (k == picked_vehicle) continue;  // the receiver itself
      Vehicle v = field_vehicles.points[k];
      v.pos = v.pos - center;
      if (v.pos.norm() > r_w) continue;
      const bool own = v.street == through_idx || v.street == ending_idx;
      v.street = remap[v.street];
      (own ? sc.own_vehicles : sc.background_vehicles).points.push_back(v);
    }
    return sc;
  }
  throw std::runtime_error("PLM conditioning: no pick candidate after bounded retries");
}

// Distance from the typical vehicle to its nearest neighbor.
inline double nearest_neighbor_distance(const TypicalScenario& sc) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : sc.own_vehicles.points) best = std::min(best, v.pos.norm());
  for (const auto& v : sc.background_vehicles.points) best = std::min(best, v.pos.norm());
  if (!std::isfinite(best))
    throw std::runtime_error("nearest_neighbor_distance: scenario has no vehicles");
  return best;
}

}  // namespace coxveh
