#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hoferlab/crit.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/scenarios.hpp"

using namespace hoferlab;

namespace {

constexpr double kPi = std::numbers::pi;

ScenarioContext small_context(const std::string& id, int mesh = 128,
                              int tsamples = 21, double extra = -1.0) {
  ScenarioConfig cfg;
  cfg.scenario = id;
  cfg.mesh = mesh;
  cfg.tsamples = tsamples;
  cfg.steps = 100;
  if (id == "torus-graph" && extra >= 0.0) cfg.amplitude = extra;
  if (id == "projective-rotation" && extra >= 0.0) cfg.s = extra;
  return build_scenario_context(cfg);
}

}  // namespace

TEST_CASE("extrema sets at different tolerances") {
  std::vector<double> constant(40, 2.0);
  auto [cmax, cmin] = extrema_sets(constant, 0.0);
  CHECK(cmax.size() == 40);
  CHECK(cmin.size() == 40);

  std::vector<double> slice;
  const int m = 128;
  for (int j = 0; j < m; ++j) slice.push_back(std::cos(2.0 * kPi * j / m));
  auto [mx, mn] = extrema_sets(slice, 1e-12);
  REQUIRE(mx.size() == 1);
  REQUIRE(mn.size() == 1);
  CHECK(mx[0] == 0);
  CHECK(mn[0] == m / 2);
}

TEST_CASE("rotation extrema sets land on the fixed loci") {
  auto ctx = small_context("projective-rotation", 256, 11, 0.5);
  auto tols = derive_tolerances(ctx.lift, ctx.h);
  auto track = extrema_track(ctx.lift, ctx.h, tols.tol_track);
  for (int ti : {0, 5, 10}) {
    REQUIRE_FALSE(track.maxset[ti].empty());
    REQUIRE_FALSE(track.minset[ti].empty());
    for (const auto& p : track.maxset_points[ti]) {
      // Max locus: z_1 = 0.
      CHECK(std::hypot(p.coords[2], p.coords[3]) < 1e-6);
    }
    for (const auto& p : track.minset_points[ti]) {
      // Min locus: z_0 = 0 (RP^0 at [0:1]).
      CHECK(std::hypot(p.coords[0], p.coords[1]) < 1e-6);
    }
  }
}

TEST_CASE("persistent extrema: fixed points survive, moving points do not") {
  auto rot = small_context("projective-rotation", 256, 21);
  auto tols = derive_tolerances(rot.lift, rot.h);
  auto pe = persistent_extrema(rot.lift, rot.H, tols.tol_val, tols.tol_geo);
  REQUIRE_FALSE(pe.plus.empty());
  REQUIRE_FALSE(pe.minus.empty());
  CHECK(distance(rot.lift.kind, pe.plus.front().p,
                 Point{{1.0, 0.0, 0.0, 0.0}}) < 1e-9);
  CHECK(distance(rot.lift.kind, pe.minus.front().p,
                 Point{{0.0, 0.0, 1.0, 0.0}}) < 1e-9);
  CHECK(pe.plus.front().drift_geo < 1e-9);

  auto circle = small_context("translated-circle", 128, 21);
  auto ctols = derive_tolerances(circle.lift, circle.h);
  auto cpe =
      persistent_extrema(circle.lift, circle.H, ctols.tol_val, ctols.tol_geo);
  CHECK(cpe.plus.empty());
  CHECK(cpe.minus.empty());

  auto graph = small_context("torus-graph", 128, 21, 0.1);
  auto gtols = derive_tolerances(graph.lift, graph.h);
  auto gpe =
      persistent_extrema(graph.lift, graph.H, gtols.tol_val, gtols.tol_geo);
  REQUIRE_FALSE(gpe.plus.empty());
  REQUIRE_FALSE(gpe.minus.empty());
  CHECK(distance(graph.lift.kind, gpe.plus.front().p, Point{{0.0, 0.0}}) <
        1e-9);
  CHECK(distance(graph.lift.kind, gpe.minus.front().p, Point{{0.5, 0.0}}) <
        1e-9);
}

TEST_CASE("separable probe construction and membership") {
  auto kind = euclidean_kind(1);
  auto cosine = [](double t) { return std::cos(2.0 * kPi * t); };
  auto bump = [](const Point& p) {
    double d = std::hypot(p.coords[0] - 1.0, p.coords[1]);
    double u = d / 0.4;
    return u < 1.0 ? std::pow(1.0 - u * u, 3) : 0.0;
  };
  auto probe = make_probe_separable(cosine, bump, "test");
  CHECK(probe.zero_mean_certified);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    Point p{{box(rng), box(rng)}};
    CHECK(std::abs(probe.time_integral(p)) <= 1e-8);
  }

  auto ones = [](double) { return 1.0; };
  CHECK_THROWS_AS(make_probe_separable(ones, bump, "bad"), InvalidConfig);
}

TEST_CASE("canonical probe subtracts the time mean") {
  HamiltonianSpec ramp;
  ramp.value = [](double t, const Point& p) { return t * p.coords[0]; };
  auto G = canonical_probe(ramp, 101);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    Point p{{box(rng), box(rng)}};
    for (double t : {0.0, 0.25, 0.8})
      CHECK(G.eval(t, p) ==
            doctest::Approx((t - 0.5) * p.coords[0]).epsilon(1e-12));
    CHECK(std::abs(G.time_integral(p)) <= 1e-8);
  }

  HamiltonianSpec autonomous;
  autonomous.value = [](double, const Point& p) { return p.coords[0]; };
  autonomous.autonomous = true;
  auto G0 = canonical_probe(autonomous);
  CHECK(G0.eval(0.37, Point{{1.0, 2.0}}) == 0.0);
}

TEST_CASE("probe length function: constants, convexity, certificates") {
  auto ctx = small_context("translated-circle", 128, 21);
  auto sgrid = default_sgrid();
  double u0 = hofer_norm(ctx.h, ctx.lift.tgrid);

  // The zero probe keeps u constant.
  HamiltonianSpec autonomous;
  autonomous.value = [](double, const Point& p) { return p.coords[0]; };
  autonomous.autonomous = true;
  auto zero = canonical_probe(autonomous);
  auto uz = probe_length_function(ctx.h, ctx.lift, zero, sgrid);
  for (double u : uz) CHECK(u == doctest::Approx(u0).epsilon(1e-14));

  // Convexity along the grid for a bag of probes.
  auto probes = random_probe_library(ctx.lift, ctx.h, 8, 99);
  probes.push_back(extension_canonical_probe(ctx.lift, ctx.h));
  probes.push_back(tracking_probe(ctx.lift, ctx.h));
  for (const auto& G : probes) {
    auto u = probe_length_function(ctx.h, ctx.lift, G, sgrid);
    CHECK(u[10] == doctest::Approx(u0).epsilon(1e-14));  // s = 0 entry
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
      double chord = 0.5 * (u[i - 1] + u[i + 1]);
      CHECK(u[i] <= chord + 1e-10);
    }
  }

  ProbeDirection uncertified;
  uncertified.eval = [](double, const Point&) { return 1.0; };
  uncertified.quad_grid = {0.0, 1.0};
  CHECK_THROWS_AS(probe_length_function(ctx.h, ctx.lift, uncertified, sgrid),
                  InvalidConfig);
}

TEST_CASE("no probe shortens the rotation path") {
  auto ctx = small_context("projective-rotation", 256, 21);
  auto sgrid = default_sgrid();
  double u0 = hofer_norm(ctx.h, ctx.lift.tgrid);
  auto probes = random_probe_library(ctx.lift, ctx.h, 50, 4242);
  for (const auto& G : probes) {
    auto u = probe_length_function(ctx.h, ctx.lift, G, sgrid);
    double umin = *std::min_element(u.begin(), u.end());
    CHECK(umin >= u0 - 1e-3 * u0);
  }
}

TEST_CASE("descent search finds a certificate on the translated circle") {
  auto ctx = small_context("translated-circle", 256, 21);
  auto res = descent_search(ctx.lift, ctx.H, ctx.h, 40, 7);
  CHECK(res.best.decrease >= 0.05);
  CHECK(res.u0 == doctest::Approx(2.0).epsilon(1e-3));

  // The stored spec reproduces the claimed decrease from scratch.
  ProbeDirection rebuilt = probe_from_spec(res.best.spec, ctx.lift, ctx.H, ctx.h);
  std::vector<double> sg = {0.0, res.best.s_star};
  auto u = probe_length_function(ctx.h, ctx.lift, rebuilt, sg);
  CHECK(std::abs((u[0] - u[1]) - res.best.decrease) <= 1e-9);
}

TEST_CASE("descent search finds nothing on the rotation path") {
  auto ctx = small_context("projective-rotation", 128, 21);
  auto res = descent_search(ctx.lift, ctx.H, ctx.h, 24, 7);
  CHECK(res.best.decrease <= 1e-3);
}

TEST_CASE("verdicts across the scenario family") {
  auto rot = small_context("projective-rotation", 256, 21);
  VerdictConfig vc;
  vc.probe_budget = 24;
  auto rrep = quasi_autonomy_verdict(rot.lift, rot.H, vc);
  CHECK(rrep.verdict == "critical");
  REQUIRE_FALSE(rrep.p_plus.empty());
  CHECK(distance(rot.lift.kind, rrep.p_plus.front().p,
                 Point{{1.0, 0.0, 0.0, 0.0}}) < 1e-2);

  auto circle = small_context("translated-circle", 256, 21);
  auto crep = quasi_autonomy_verdict(circle.lift, circle.H, vc);
  CHECK(crep.verdict == "non-critical");
  CHECK(crep.has_certificate);
  CHECK(crep.certificate.decrease >= 0.05);

  auto disjoint = small_context("disjoint-endpoints", 128, 21);
  auto drep = quasi_autonomy_verdict(disjoint.lift, disjoint.H, vc);
  CHECK(drep.verdict == "non-critical");
  CHECK(drep.has_certificate);
  CHECK(drep.certificate.decrease > drep.tols.tol_probe);

  auto flat = small_context("torus-graph", 128, 11, 0.0);
  auto frep = quasi_autonomy_verdict(flat.lift, flat.H, vc);
  CHECK(frep.verdict == "inconclusive");
  CHECK(frep.reason.find("non-regular") != std::string::npos);

  auto graph = small_context("torus-graph", 128, 21, 0.1);
  auto grep = quasi_autonomy_verdict(graph.lift, graph.H, vc);
  CHECK(grep.verdict == "critical");

  auto wrong = linear_height_hamiltonian(2.0);
  CHECK_THROWS_AS(quasi_autonomy_verdict(circle.lift, wrong, vc),
                  ConsistencyFailure);
}

TEST_CASE("convex majorant bound") {
  // Constant path: l(s) = s^2 |K o iota| exactly while u stays 0.
  HamiltonianSpec zero;
  zero.value = [](double, const Point&) { return 0.0; };
  zero.autonomous = true;
  LagrangianMesh L0 = unit_circle_mesh(128);
  FlowConfig fc;
  fc.steps_per_unit = 50;
  PathLift flat = integrate_path(L0.kind, zero, L0, uniform_tgrid(11), fc);
  AssociatedFunction h0 = associated_function_from_H(flat, zero);

  auto zeroG = canonical_probe(zero);
  ProbeSpec bump;
  bump.profile = "cos";
  bump.harmonic = 1;
  bump.center = {1.0, 0.0};
  bump.radius = 0.8;
  bump.amplitude = 1.0;
  auto K = separable_bump_probe(L0.kind, bump);

  std::vector<double> sgrid;
  for (double s = -1.0; s <= 1.01; s += 0.25)
    if (std::abs(s) > 1e-9) sgrid.push_back(s);
  auto res = convex_majorant_check(h0, flat, zeroG, K, sgrid);
  CHECK(res.sup_ratio == doctest::Approx(res.bound).epsilon(1e-12));

  // Generic probes on the translated circle stay under the triangle bound.
  auto ctx = small_context("translated-circle", 128, 21);
  auto lib = random_probe_library(ctx.lift, ctx.h, 6, 31);
  for (std::size_t i = 0; i + 1 < lib.size(); i += 2) {
    auto r = convex_majorant_check(ctx.h, ctx.lift, lib[i], lib[i + 1], sgrid);
    CHECK(r.sup_ratio <= r.bound + 1e-9);
  }

  std::vector<double> with_zero = {-0.5, 0.0, 0.5};
  CHECK_THROWS_AS(convex_majorant_check(h0, flat, zeroG, K, with_zero),
                  InvalidConfig);

  // K identically zero: the curved family equals the convex model.
  auto moving = small_context("translated-circle", 128, 11);
  auto res0 = convex_majorant_check(moving.h, moving.lift, K, zeroG, sgrid);
  CHECK(res0.sup_ratio == 0.0);
  CHECK(res0.bound == 0.0);
}

TEST_CASE("critical verdicts survive time-grid refinement") {
  auto graph = small_context("torus-graph", 128, 21, 0.1);
  VerdictConfig vc;
  vc.probe_budget = 8;
  auto rep = quasi_autonomy_verdict(graph.lift, graph.H, vc);
  REQUIRE(rep.verdict == "critical");
  REQUIRE_FALSE(rep.p_plus.empty());

  // Re-examine the winning candidate on a twice-refined time grid.
  auto fine = small_context("torus-graph", 128, 41, 0.1);
  auto hfine = fine.h;
  const Point& p = rep.p_plus.front().p;
  double worst_gap = 0.0;
  for (int ti = 0; ti < fine.lift.times(); ++ti) {
    double mx = *std::max_element(hfine.values[ti].begin(),
                                  hfine.values[ti].end());
    worst_gap = std::max(worst_gap,
                         mx - fine.H.value(fine.lift.tgrid[ti], p));
  }
  CHECK(worst_gap <= 2.0 * rep.tols.tol_val);
}

TEST_CASE("adding a time-dependent constant changes nothing that matters") {
  auto base = small_context("torus-graph", 128, 21, 0.1);
  HamiltonianSpec shifted = base.H;
  auto orig_value = base.H.value;
  shifted.value = [orig_value](double t, const Point& p) {
    return orig_value(t, p) + 0.3 * std::sin(2.0 * kPi * t) + 0.1;
  };
  shifted.autonomous = false;  // the shift depends on t
  ScenarioConfig cfg;
  cfg.scenario = "torus-graph";
  cfg.mesh = 128;
  cfg.tsamples = 21;
  cfg.steps = 100;
  cfg.amplitude = 0.1;
  // Same analytic gradient: identical trajectories, bit for bit.
  auto lift2 = integrate_path(base.lift.kind, shifted,
                              torus_graph_mesh(cfg.mesh), base.lift.tgrid,
                              FlowConfig{FlowConfig::Stepper::RK4, 100, 1e-5});
  for (int ti = 0; ti < base.lift.times(); ++ti)
    for (int v = 0; v < base.lift.nodes(); ++v)
      CHECK(lift2.meshes[ti].images[v].coords ==
            base.lift.meshes[ti].images[v].coords);

  auto h2 = associated_function_from_H(lift2, shifted);
  auto tols = derive_tolerances(base.lift, base.h);
  auto tols2 = derive_tolerances(lift2, h2);
  CHECK(std::abs(tols.tol_val - tols2.tol_val) < 1e-12);

  auto track1 = extrema_track(base.lift, base.h, tols.tol_track);
  auto track2 = extrema_track(lift2, h2, tols.tol_track);
  for (int ti = 0; ti < base.lift.times(); ++ti) {
    CHECK(track1.maxset[ti] == track2.maxset[ti]);
    CHECK(track1.minset[ti] == track2.minset[ti]);
    CHECK(std::abs(oscillation(base.h.values[ti]) -
                   oscillation(h2.values[ti])) < 1e-12);
  }

  VerdictConfig vc;
  vc.probe_budget = 16;
  auto rep1 = quasi_autonomy_verdict(base.lift, base.H, vc);
  auto rep2 = quasi_autonomy_verdict(lift2, shifted, vc);
  CHECK(rep1.verdict == rep2.verdict);
  CHECK(rep1.verdict == "critical");
}

TEST_CASE("full-coordinate rotation (k = n) is still critical") {
  // Max locus degenerates to the pole, which the hemisphere grid excludes;
  // the nearby ring must still certify persistence.
  ScenarioConfig cfg;
  cfg.scenario = "projective-rotation";
  cfg.n = 2;
  cfg.k = 2;
  cfg.s = 0.5;
  cfg.mesh = 64;
  cfg.mesh_theta = 16;
  cfg.tsamples = 11;
  cfg.steps = 100;
  auto ctx = build_scenario_context(cfg);
  VerdictConfig vc;
  vc.probe_budget = 8;
  auto rep = quasi_autonomy_verdict(ctx.lift, ctx.H, vc);
  CHECK(rep.verdict == "critical");
  REQUIRE_FALSE(rep.p_minus.empty());
  // Min locus is the full real equator z_0 = 0.
  double z0 = std::hypot(rep.p_minus.front().p.coords[0],
                         rep.p_minus.front().p.coords[1]);
  CHECK(z0 < 1e-9);
}

TEST_CASE("a starved probe budget still yields a sound verdict") {
  auto ctx = small_context("translated-circle", 128, 11);
  VerdictConfig vc;
  vc.probe_budget = 1;  // only the (trivial) canonical probe survives
  auto rep = quasi_autonomy_verdict(ctx.lift, ctx.H, vc);
  CHECK(rep.verdict == "non-critical");
  CHECK_FALSE(rep.has_certificate);
  CHECK(rep.reason.find("persistent") != std::string::npos);
  CHECK(rep.probes.size() == 1);
}

TEST_CASE("random probe library is deterministic per seed") {
  auto ctx = small_context("translated-circle", 128, 11);
  auto a = random_probe_library(ctx.lift, ctx.h, 12, 77);
  auto b = random_probe_library(ctx.lift, ctx.h, 12, 77);
  auto c = random_probe_library(ctx.lift, ctx.h, 12, 78);
  REQUIRE(a.size() == 12);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 12; ++i) {
    all_equal = all_equal && a[i].id == b[i].id &&
                a[i].spec.center == b[i].spec.center &&
                a[i].spec.radius == b[i].spec.radius;
    any_diff = any_diff || a[i].spec.center != c[i].spec.center ||
               a[i].spec.radius != c[i].spec.radius;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("criticality csv shape") {
  auto ctx = small_context("torus-graph", 128, 11, 0.1);
  VerdictConfig vc;
  vc.probe_budget = 8;
  auto rep = quasi_autonomy_verdict(ctx.lift, ctx.H, vc);
  auto len = hofer_length(ctx.lift, ctx.H);
  auto csv = criticality_csv(rep, len);
  CHECK(csv.rfind("t,max,min,dist_plus,dist_minus\n", 0) == 0);
  int rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 12);
}
