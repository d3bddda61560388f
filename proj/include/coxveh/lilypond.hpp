#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "coxveh/geometry.hpp"
#include "coxveh/rng.hpp"

namespace coxveh {

// Seed of a lilypond stick: location and orientation; the half-length is the
// outcome of the growth process.
struct Seed {
  Vec2 pos;
  double angle = 0.0;
};

// Growth-time state of a potential blocker as seen by collision_time: either
// still growing (extent = current time) or frozen at a fixed half-length.
struct BlockerState {
  Vec2 mid;
  Vec2 dir;
  std::optional<double> frozen_half_len;  // nullopt while growing
};

// Earliest time t > 0 at which the endpoint mid + sign*t*dir of a growing
// stick lies on the blocker's extent at time t. The support lines are fixed,
// so the contact can only happen at their crossing; growth only decides
// when/whether the extents reach it. The blocker's extent at the contact time
// is min(t, h): every stick had extent tau at time tau before freezing, so a
// crossing the endpoint passed before the blocker reached it never counts.
// Parallel supports never produce a contact (general position).
inline std::optional<double> collision_time(Vec2 mid, Vec2 dir, int sign,
                                            const BlockerState& other) {
  const double cr = dir.cross(other.dir);
  if (std::abs(cr) < 1e-12) return std::nullopt;
  const Vec2 d = other.mid - mid;
  const double a = d.cross(other.dir) / cr;   // crossing offset on the grower
  const double b = -dir.cross(d) / cr;        // crossing offset on the blocker
  const double t = a * sign;
  if (t <= 0.0) return std::nullopt;
  const double reach =
      other.frozen_half_len ? std::min(t, *other.frozen_half_len) : t;
  if (std::abs(b) > reach + kGeomTol) return std::nullopt;
  return t;
}

struct LilypondResult {
  std::vector<Stick> sticks;           // index-aligned with the seeds
  std::vector<GrowthEvent> events;     // one per stick stopped by a contact
};

namespace detail {

struct Candidate {
  double t;
  std::size_t stick;
  int sign;              // -1 before +1 on ties
  std::size_t blocker;
  bool blocker_frozen;   // blocker state when the candidate was computed

  bool operator>(const Candidate& o) const {
    if (t != o.t) return t > o.t;
    if (stick != o.stick) return stick > o.stick;
    return sign > o.sign;
  }
};

}  // namespace detail

// Exact event-driven lilypond growth: every stick grows at unit rate on both
// sides from time 0 and freezes entirely the first time one of its endpoints
// touches another stick's extent; sticks without a contact before t_cap are
// frozen there and flagged truncated. Ties are resolved by
// (time, stick index, endpoint sign). Deterministic in the seed order.
inline LilypondResult grow_lilypond(const std::vector<Seed>& seeds, double t_cap) {
  if (!(t_cap > 0.0)) throw std::invalid_argument("t_cap must be positive");
  const std::size_t n = seeds.size();
  LilypondResult out;
  if (n == 0) return out;

  {
    std::vector<std::pair<double, double>> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = {seeds[i].pos.x, seeds[i].pos.y};
    std::sort(pos.begin(), pos.end());
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
      throw std::invalid_argument("duplicate seed locations");
  }

  std::vector<Vec2> dirs(n);
  for (std::size_t i = 0; i < n; ++i) dirs[i] = unit(seeds[i].angle);
  std::vector<double> frozen_h(n, -1.0);  // < 0 while growing

  // Hash grid over seed positions; the scan radius around an endpoint's seed
  // is bounded by twice the best candidate time (a contact at time t needs
  // the blocker's seed within 2t).
  double lo_x = seeds[0].pos.x, hi_x = lo_x, lo_y = seeds[0].pos.y, hi_y = lo_y;
  for (const auto& s : seeds) {
    lo_x = std::min(lo_x, s.pos.x);
    hi_x = std::max(hi_x, s.pos.x);
    lo_y = std::min(lo_y, s.pos.y);
    hi_y = std::max(hi_y, s.pos.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  const double cell = std::max(span / std::max(std::sqrt(static_cast<double>(n)), 1.0), 1e-6);
  const int ncell = static_cast<int>(std::ceil(span / cell)) + 1;
  std::vector<std::vector<std::size_t>> grid(static_cast<std::size_t>(ncell) * ncell);
  auto cell_of = [&](Vec2 p) {
    int cx = std::clamp(static_cast<int>((p.x - lo_x) / cell), 0, ncell - 1);
    int cy = std::clamp(static_cast<int>((p.y - lo_y) / cell), 0, ncell - 1);
    return std::make_pair(cx, cy);
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto [cx, cy] = cell_of(seeds[i].pos);
    grid[static_cast<std::size_t>(cx) * ncell + cy].push_back(i);
  }

  // Best feasible candidate for one endpoint under current blocker states.
  auto scan_endpoint = [&](std::size_t i, int sign) -> std::optional<detail::Candidate> {
    std::optional<detail::Candidate> best;
    auto consider = [&](std::size_t j) {
      if (j == i) return;
      BlockerState st{seeds[j].pos, dirs[j],
                      frozen_h[j] >= 0.0 ? std::optional<double>(frozen_h[j]) : std::nullopt};
      auto t = collision_time(seeds[i].pos, dirs[i], sign, st);
      if (!t || *t > t_cap) return;
      if (!best || *t < best->t || (*t == best->t && j < best->blocker))
        best = detail::Candidate{*t, i, sign, j, frozen_h[j] >= 0.0};
    };
    const auto [cx, cy] = cell_of(seeds[i].pos);
    const int kmax = ncell;  // rings terminate early via the distance bound
    for (int k = 0; k <= kmax; ++k) {
      const double ring_min_dist = (k - 1) * cell;
      const double bound = 2.0 * (best ? best->t : t_cap);
      if (k > 1 && ring_min_dist > bound) break;
      for (int dx = -k; dx <= k; ++dx)
        for (int dy = -k; dy <= k; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != k) continue;  // ring only
          const int x = cx + dx, y = cy + dy;
          if (x < 0 || x >= ncell || y < 0 || y >= ncell) continue;
          for (std::size_t j : grid[static_cast<std::size_t>(x) * ncell + y]) consider(j);
        }
    }
    return best;
  };

  std::priority_queue<detail::Candidate, std::vector<detail::Candidate>, std::greater<>> queue;
  for (std::size_t i = 0; i < n; ++i)
    for (int sign : {-1, +1})
      if (auto c = scan_endpoint(i, sign)) queue.push(*c);

  while (!queue.empty()) {
    const detail::Candidate c = queue.top();
    queue.pop();
    if (c.t > t_cap) break;
    if (frozen_h[c.stick] >= 0.0) continue;
    const bool blocker_now_frozen = frozen_h[c.blocker] >= 0.0;
    if (blocker_now_frozen != c.blocker_frozen) {
      // Blocker froze after this candidate was computed; its extent may no
      // longer reach the contact. Candidate times are lower bounds, so
      // re-scanning now keeps the queue order correct.
      if (auto r = scan_endpoint(c.stick, c.sign)) queue.push(*r);
      continue;
    }
    frozen_h[c.stick] = c.t;
    const Vec2 contact = seeds[c.stick].pos + dirs[c.stick] * (c.t * c.sign);
    out.events.push_back({c.t, c.stick, c.blocker, contact});
  }

  out.sticks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool truncated = frozen_h[i] < 0.0;
    out.sticks.emplace_back(seeds[i].pos, seeds[i].angle, truncated ? t_cap : frozen_h[i],
                            truncated);
  }
  return out;
}

// Default growth cap: far above the mean half-length at intensity mu, so the
// truncated mass is negligible.
inline double default_t_cap(double mu) { return 10.0 / std::sqrt(mu); }

// Poisson lilypond model on a window of radius r_w: seeds form a 2-D Poisson
// process of intensity mu on the disk padded by t_cap, then grow until contact.
inline StreetSystem sample_plm(double mu, double r_w, Rng& rng, double t_cap = 0.0) {
  detail::check_window(mu, r_w);
  if (t_cap <= 0.0) t_cap = default_t_cap(mu);
  const double r_gen = r_w + t_cap;
  const long n = poisson(rng, mu * std::numbers::pi * r_gen * r_gen);
  std::vector<Seed> seeds;
  seeds.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    seeds.push_back({detail::uniform_in_disk(rng, r_gen), uniform(rng, 0.0, std::numbers::pi)});
  auto grown = grow_lilypond(seeds, t_cap);
  StreetSystem sys;
  sys.model = ModelKind::PLM;
  sys.mu = mu;
  sys.window_radius = r_w;
  sys.sticks = std::move(grown.sticks);
  sys.tjunctions.reserve(grown.events.size());
  for (const auto& e : grown.events) sys.tjunctions.push_back(e.contact);
  return sys;
}

}  // namespace coxveh
