#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coxveh/cox.hpp"

using namespace coxveh;

namespace {

double dist_to_stick(Vec2 p, const Stick& s) {
  const double t = std::clamp((p - s.mid).dot(s.dir()), -s.half_len, s.half_len);
  return (p - s.point_at(t)).norm();
}

ModelParams base_params() {
  ModelParams mp;
  mp.lambda = 0.3;
  mp.p = 1.0;
  mp.D = 0.25;
  mp.alpha = 4.0;
  return mp;
}

}  // namespace

TEST_CASE("vehicle sampling basics", "[cox]") {
  StreetSystem sys;
  sys.model = ModelKind::PSP;
  sys.window_radius = 50.0;
  sys.sticks.emplace_back(Vec2{0.0, 0.0}, 0.3, 10.0);

  Rng rng = make_stream(21, 0);
  CHECK(sample_vehicles(sys, 0.0, rng).size() == 0);
  CHECK_THROWS_AS(sample_vehicles(sys, -0.1, rng), std::invalid_argument);

  // Mean count over many draws ~ Poisson(lambda * 2h) = 6.
  const int reps = 10000;
  long total = 0;
  for (int i = 0; i < reps; ++i) {
    Rng r = make_stream(22, i);
    auto vs = sample_vehicles(sys, 0.3, r);
    total += static_cast<long>(vs.size());
    for (const auto& v : vs.points) CHECK(dist_to_stick(v.pos, sys.sticks[0]) <= 1e-9);
  }
  const double mean = double(total) / reps;
  CHECK(std::abs(mean - 6.0) < 3.0 * std::sqrt(6.0 / reps));
}

TEST_CASE("aloha thinning", "[cox]") {
  StreetSystem sys;
  sys.model = ModelKind::PSP;
  sys.window_radius = 50.0;
  sys.sticks.emplace_back(Vec2{0.0, 0.0}, 0.0, 20.0);
  Rng rng = make_stream(23, 0);
  auto vs = sample_vehicles(sys, 1.0, rng);

  auto all = thin_aloha(vs, 1.0, rng);
  CHECK(all.size() == vs.size());
  auto none = thin_aloha(vs, 0.0, rng);
  CHECK(none.size() == 0);
  CHECK_THROWS_AS(thin_aloha(vs, 1.5, rng), std::invalid_argument);

  long kept = 0;
  const int reps = 4000;
  for (int i = 0; i < reps; ++i) {
    Rng r = make_stream(24, i);
    kept += static_cast<long>(thin_aloha(vs, 0.3, r).size());
  }
  const double mean = double(kept) / reps;
  const double expect = 0.3 * double(vs.size());
  CHECK(std::abs(mean - expect) < 4.0 * std::sqrt(expect / reps));
}

TEST_CASE("cox 2-D intensity is lambda tau", "[cox][slow]") {
  const double mu = 1.0, lambda = 0.1, R = 15.0;
  long total = 0;
  const int reps = 300;
  for (int i = 0; i < reps; ++i) {
    Rng rng = make_stream(25, i);
    auto sys = sample_plp(mu, R, rng);
    total += static_cast<long>(sample_vehicles(sys, lambda, rng).size());
  }
  const double intensity = double(total) / reps / (std::numbers::pi * R * R);
  CHECK(std::abs(intensity - lambda * mu) < 0.01);
}

TEST_CASE("line-model conditioning", "[cox]") {
  Rng rng = make_stream(26, 0);
  auto mp = base_params();
  auto sc2 = condition_typical_line_model(ModelKind::PLP, 2, mp, 1.0, 20.0, rng);
  REQUIRE(sc2.own_lines.size() == 1);
  CHECK(sc2.own_lines[0].offset == 0.0);
  CHECK(sc2.order == 2);

  auto sc4 = condition_typical_line_model(ModelKind::OG, 4, mp, 1.0, 20.0, rng);
  REQUIRE(sc4.own_lines.size() == 2);
  CHECK(sc4.own_lines[0].angle == 0.0);
  CHECK(sc4.own_lines[1].angle == Catch::Approx(std::numbers::pi / 2.0));

  CHECK_THROWS_AS(condition_typical_line_model(ModelKind::PLP, 3, mp, 1.0, 20.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(condition_typical_line_model(ModelKind::PSP, 2, mp, 1.0, 20.0, rng),
                  std::invalid_argument);

  for (const auto& v : sc2.own_vehicles.points)
    CHECK(std::abs(v.pos.dot(unit(sc2.own_lines[0].angle))) <= 1e-9);
}

TEST_CASE("psp conditioning: origin on every own stick", "[cox]") {
  Rng rng = make_stream(27, 0);
  auto mp = base_params();
  auto law = HalfLengthLaw::deterministic(10.0);
  auto sc = condition_typical_psp(4, mp, 0.1, law, 30.0, rng);
  REQUIRE(sc.own_sticks.size() == 2);
  for (const auto& s : sc.own_sticks) {
    CHECK(s.half_len == 10.0);  // deterministic law is bias-invariant
    CHECK(dist_to_stick({0.0, 0.0}, s) <= 1e-9);
  }
  for (const auto& v : sc.own_vehicles.points) {
    REQUIRE(v.street < sc.own_sticks.size());
    CHECK(dist_to_stick(v.pos, sc.own_sticks[v.street]) <= 1e-9);
  }
  for (const auto& v : sc.background_vehicles.points) {
    REQUIRE(v.street >= sc.background.lines.size());
    const auto& st = sc.background.sticks[v.street - sc.background.lines.size()];
    CHECK(dist_to_stick(v.pos, st) <= 1e-9);
  }
}

TEST_CASE("psp conditioning: own half-length follows the biased law", "[cox][slow]") {
  auto mp = base_params();
  auto law = HalfLengthLaw::rayleigh(1.04);
  double sum = 0.0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    Rng rng = make_stream(28, i);
    const double h = law.sample_biased(rng);
    sum += h;
  }
  const double mean = sum / reps;
  CHECK(std::abs(mean - law.biased_mean()) / law.biased_mean() < 0.01);

  // Two-point law: the own street is long with probability ~ 0.9999.
  auto two = HalfLengthLaw::discrete({{1e-2, 0.5}, {1e2, 0.5}});
  int long_count = 0;
  for (int i = 0; i < 2000; ++i) {
    Rng rng = make_stream(29, i);
    auto sc = condition_typical_psp(2, mp, 1e-4, two, 5.0, rng);
    if (sc.own_sticks[0].half_len > 1.0) ++long_count;
  }
  CHECK(long_count >= 1995);
}

TEST_CASE("order-4 own streets are two independent copies of order-2", "[cox][slow]") {
  auto mp = base_params();
  auto law = HalfLengthLaw::deterministic(10.0);
  const double a = 2.0;  // count vehicles in b(o, a) on own streets
  const int reps = 20000;
  long c2 = 0, c4 = 0;
  for (int i = 0; i < reps; ++i) {
    Rng r2 = make_stream(30, i);
    auto s2 = condition_typical_psp(2, mp, 1e-6, law, 25.0, r2);
    for (const auto& v : s2.own_vehicles.points)
      if (v.pos.norm() <= a) ++c2;
    Rng r4 = make_stream(31, i);
    auto s4 = condition_typical_psp(4, mp, 1e-6, law, 25.0, r4);
    for (const auto& v : s4.own_vehicles.points)
      if (v.pos.norm() <= a) ++c4;
  }
  const double m2 = double(c2) / reps, m4 = double(c4) / reps;
  // Means: m4 = 2 m2 (counts are Poisson(2 lambda a) and Poisson(4 lambda a)).
  CHECK(std::abs(m4 - 2.0 * m2) < 4.0 * std::sqrt((4.0 * mp.lambda * a) / reps) * 2.0);
  CHECK(std::abs(m2 - 2.0 * mp.lambda * a) < 0.05);
}

TEST_CASE("plm conditioning order 2", "[cox][slow]") {
  auto mp = base_params();
  Rng rng = make_stream(32, 0);
  auto sc = condition_typical_plm(2, mp, 1.0, 6.0, rng);
  REQUIRE(sc.own_sticks.size() == 1);
  CHECK(dist_to_stick({0.0, 0.0}, sc.own_sticks[0]) <= 1e-9);
  CHECK(sc.order == 2);
  for (const auto& v : sc.own_vehicles.points)
    CHECK(dist_to_stick(v.pos, sc.own_sticks[v.street]) <= 1e-9);
}

TEST_CASE("plm conditioning order 3: through street plus ending street", "[cox][slow]") {
  auto mp = base_params();
  Rng rng = make_stream(33, 0);
  auto sc = condition_typical_plm(3, mp, 1.0, 6.0, rng);
  REQUIRE(sc.own_sticks.size() == 2);
  // own_sticks[1] is the ending street (the stopped stick): one endpoint at
  // the origin, the other at distance 2h.
  const Stick& ending = sc.own_sticks[1];
  const double d_minus = ending.endpoint(-1).norm();
  const double d_plus = ending.endpoint(+1).norm();
  const double near = std::min(d_minus, d_plus), far = std::max(d_minus, d_plus);
  CHECK(near <= 1e-9);
  CHECK(far == Catch::Approx(2.0 * ending.half_len).margin(1e-9));
  // own_sticks[0] is the street passing through the origin.
  CHECK(dist_to_stick({0.0, 0.0}, sc.own_sticks[0]) <= 1e-9);
}

TEST_CASE("nearest neighbor distance", "[cox]") {
  TypicalScenario sc;
  sc.params = base_params();
  CHECK_THROWS_AS(nearest_neighbor_distance(sc), std::runtime_error);
  sc.background_vehicles.points.push_back({{3.0, 4.0}, 0, true});
  CHECK(nearest_neighbor_distance(sc) == Catch::Approx(5.0));
  sc.own_vehicles.points.push_back({{0.0, 1.0}, 0, true});
  CHECK(nearest_neighbor_distance(sc) == Catch::Approx(1.0));
}

TEST_CASE("empirical palm sampling matches exact conditioning on the psp", "[cox][slow]") {
  // Pick-a-vehicle-and-translate sampling (the PLM path) applied to a PSP
  // must reproduce the exact length-biased conditioning. Validates the pick
  // weighting end to end.
  auto mp = base_params();
  const double mu = 0.01, pick_radius = 20.0, r_w = 26.0;
  auto law = HalfLengthLaw::rayleigh(0.0103);
  auto empirical = [&](Rng& rng) -> TypicalScenario {
    for (int attempt = 0; attempt < 64; ++attempt) {
      StreetSystem field = sample_psp(mu, law, pick_radius + r_w, rng);
      VehicleSet vs = sample_vehicles_within(field, mp.lambda, pick_radius + r_w, rng);
      std::vector<std::size_t> cand;
      for (std::size_t k = 0; k < vs.points.size(); ++k)
        if (vs.points[k].pos.norm() <= pick_radius) cand.push_back(k);
      if (cand.empty()) continue;
      const auto pick =
          cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
      const Vec2 c = vs.points[pick].pos;
      TypicalScenario sc;
      sc.order = 2;
      sc.params = mp;
      sc.sample_radius = r_w;
      sc.weight = static_cast<double>(cand.size());
      for (std::size_t k = 0; k < vs.points.size(); ++k) {
        if (k == pick) continue;
        Vehicle v = vs.points[k];
        v.pos = v.pos - c;
        if (v.pos.norm() > r_w) continue;
        (v.street == vs.points[pick].street ? sc.own_vehicles : sc.background_vehicles)
            .points.push_back(v);
      }
      return sc;
    }
    throw std::runtime_error("no pick candidate");
  };

  McConfig mc;
  mc.realizations = 4000;
  mc.seed = 36;
  auto grid = std::vector<double>{2.0, 8.0, 20.0};
  auto emp = neighbor_count_stats(empirical, grid, mc);
  McConfig mc2 = mc;
  mc2.seed = 37;
  auto exact = neighbor_count_stats(
      [&](Rng& rng) { return condition_typical_psp(2, mp, mu, law, r_w, rng); }, grid,
      mc2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    INFO("r=" << grid[k]);
    CHECK(std::abs(emp.mean[k] - exact.mean[k]) <=
          emp.mean_ci[k] + exact.mean_ci[k] + 0.05);
  }
}

TEST_CASE("nn survival factorizes over own and background", "[cox][slow]") {
  auto mp = base_params();
  const double r = 1.0;
  const int reps = 20000;
  int joint = 0, own = 0, bg = 0;
  for (int i = 0; i < reps; ++i) {
    Rng rng = make_stream(34, i);
    auto sc = condition_typical_line_model(ModelKind::PLP, 2, mp, 1.0, 12.0, rng);
    double d_own = std::numeric_limits<double>::infinity();
    double d_bg = d_own;
    for (const auto& v : sc.own_vehicles.points) d_own = std::min(d_own, v.pos.norm());
    for (const auto& v : sc.background_vehicles.points) d_bg = std::min(d_bg, v.pos.norm());
    if (d_own > r) ++own;
    if (d_bg > r) ++bg;
    if (std::min(d_own, d_bg) > r) ++joint;
  }
  const double pj = double(joint) / reps;
  const double pp = double(own) / reps * double(bg) / reps;
  CHECK(std::abs(pj - pp) < 0.015);
}
