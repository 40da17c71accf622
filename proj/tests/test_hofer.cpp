#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hoferlab/errors.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/scenarios.hpp"
#include "hoferlab/serialize.hpp"

using namespace hoferlab;

namespace {

ScenarioContext small_context(const std::string& id, int mesh = 128,
                              int tsamples = 21, double offset = 0.0) {
  ScenarioConfig cfg;
  cfg.scenario = id;
  cfg.mesh = mesh;
  cfg.tsamples = tsamples;
  cfg.steps = 100;
  cfg.mesh_offset = offset;
  return build_scenario_context(cfg);
}

}  // namespace

TEST_CASE("oscillation basics") {
  std::vector<double> constant(32, 1.7);
  CHECK(oscillation(constant) == 0.0);

  std::vector<double> slice;
  for (int j = 0; j < 256; ++j)
    slice.push_back(std::cos(2.0 * std::numbers::pi * j / 256.0));
  CHECK(oscillation(slice) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> empty;
  CHECK_THROWS_AS(oscillation(empty), InvalidConfig);
}

TEST_CASE("oscillation of the rotation slice is s/2") {
  const double s = 1.0;
  auto ctx = small_context("projective-rotation", 512, 5);
  for (const auto& slice : ctx.h.values)
    CHECK(oscillation(slice) == doctest::Approx(s / 2.0).epsilon(1e-3));
}

TEST_CASE("hofer norm quadrature") {
  AssociatedFunction zero;
  zero.values.assign(5, std::vector<double>(16, 0.0));
  CHECK(hofer_norm(zero, uniform_tgrid(5)) == 0.0);

  AssociatedFunction osc2;
  osc2.values.assign(5, {});
  for (auto& s : osc2.values) s = {-1.0, 0.0, 1.0};
  CHECK(hofer_norm(osc2, uniform_tgrid(5)) == doctest::Approx(2.0));

  AssociatedFunction bad;
  bad.values.assign(3, {0.0});
  CHECK_THROWS_AS(hofer_norm(bad, uniform_tgrid(5)), DimensionMismatch);
}

TEST_CASE("hofer length of the flat path vanishes") {
  HamiltonianSpec H;
  H.value = [](double, const Point&) { return 0.0; };
  H.autonomous = true;
  LagrangianMesh L0 = unit_circle_mesh(64);
  FlowConfig cfg;
  cfg.steps_per_unit = 50;
  PathLift lift = integrate_path(L0.kind, H, L0, uniform_tgrid(5), cfg);
  auto b = hofer_length(lift, H);
  CHECK(b.total == 0.0);
}

TEST_CASE("hofer length of the translated circle is 2") {
  auto ctx = small_context("translated-circle", 256, 21);
  auto b = hofer_length(ctx.lift, ctx.H);
  CHECK(b.total == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(b.quadrature == "trapezoid");
  for (double o : b.osc) CHECK(o >= 0.0);
}

TEST_CASE("hofer length of the rotation path is s/2") {
  auto ctx = small_context("projective-rotation", 256, 21);
  auto b = hofer_length(ctx.lift, ctx.H);
  CHECK(b.total == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("length refuses a mismatched Hamiltonian") {
  auto ctx = small_context("translated-circle", 128, 11);
  auto wrong = linear_height_hamiltonian(2.0);  // twice the generating speed
  CHECK_THROWS_AS(hofer_length(ctx.lift, wrong), ConsistencyFailure);
  auto check = generator_consistency(ctx.lift, ctx.H);
  CHECK(check.consistent());
}

TEST_CASE("consistency gate passes on every scenario") {
  for (const char* id : {"projective-rotation", "torus-graph",
                         "translated-circle", "disjoint-endpoints"}) {
    auto ctx = small_context(id, 128, 11);
    auto check = generator_consistency(ctx.lift, ctx.H);
    INFO(id);
    CHECK(check.consistent());
  }
}

TEST_CASE("relabeling the grid leaves the length unchanged") {
  auto ctx = small_context("translated-circle", 128, 11);
  double base = hofer_length(ctx.lift, ctx.H).total;

  const int shift = 17;
  std::vector<std::vector<Point>> rotated(ctx.lift.times());
  for (int ti = 0; ti < ctx.lift.times(); ++ti) {
    rotated[ti].resize(ctx.lift.nodes());
    for (int v = 0; v < ctx.lift.nodes(); ++v)
      rotated[ti][v] =
          ctx.lift.meshes[ti].images[(v + shift) % ctx.lift.nodes()];
  }
  PathLift relabeled = make_lift(ctx.lift.kind, ctx.lift.grid, ctx.lift.tgrid,
                                 std::move(rotated));
  double moved = hofer_length(relabeled, ctx.H).total;
  CHECK(std::abs(moved - base) <= 1e-12);

  auto p0 = exactness_periods(ctx.lift, 5);
  auto p1 = exactness_periods(relabeled, 5);
  CHECK(std::abs(p0[0] - p1[0]) <= 1e-12);
}

TEST_CASE("time refinement moves the length by at most the quadrature order") {
  auto coarse = small_context("torus-graph", 128, 11);
  auto fine = small_context("torus-graph", 128, 21);
  double lc = hofer_length(coarse.lift, coarse.H).total;
  double lf = hofer_length(fine.lift, fine.H).total;
  CHECK(std::abs(lc - lf) <= 1e-4);
}

TEST_CASE("resolution error bars cover the sampling gap") {
  // Offset sampling keeps the extrema strictly between nodes.
  auto ctx = small_context("translated-circle", 128, 11, 0.37);
  auto b = hofer_length(ctx.lift, ctx.H);
  CHECK(b.total < 2.0);
  CHECK(b.resolution_error > 0.0);
  CHECK(std::abs(b.total + b.resolution_error - 2.0) < 1e-4);
}

TEST_CASE("length breakdown serializes to csv and json") {
  auto ctx = small_context("translated-circle", 128, 5);
  auto b = hofer_length(ctx.lift, ctx.H);
  std::string csv = to_csv(b);
  CHECK(csv.rfind("t,max,min,osc\n", 0) == 0);
  int rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 6);  // header + 5 times
  CHECK(csv.find("nan") == std::string::npos);

  auto j = breakdown_to_json(b);
  for (const char* key : {"total", "quadrature", "resolution_error", "t",
                          "max", "min", "osc"})
    CHECK(j.contains(key));
  CHECK(j["total"] == b.total);
  CHECK(j["t"].size() == 5);
}
