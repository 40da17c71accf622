#include "hoferlab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "hoferlab/errors.hpp"
#include "hoferlab/serialize.hpp"

namespace hoferlab {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep01(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothstep01_deriv(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u);
}

}  // namespace

std::vector<double> uniform_tgrid(int tsamples) {
  if (tsamples < 2) throw InvalidConfig("need at least 2 time samples");
  std::vector<double> t(tsamples);
  for (int i = 0; i < tsamples; ++i)
    t[i] = static_cast<double>(i) / (tsamples - 1);
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

LagrangianMesh unit_circle_mesh(int m, double offset, double radius, double cx,
                                double cy) {
  ManifoldKind kind = euclidean_kind(1);
  GridPtr grid = circle_grid(m, offset);
  std::vector<Point> images;
  images.reserve(m);
  for (int j = 0; j < m; ++j) {
    double th = grid->params[j][0];
    images.push_back(
        Point{{cx + radius * std::cos(th), cy + radius * std::sin(th)}});
  }
  return make_mesh(kind, grid, std::move(images));
}

LagrangianMesh rp1_mesh(int m, double offset) {
  ManifoldKind kind = projective_kind(1);
  GridPtr grid = circle_grid(m, offset);
  std::vector<Point> images;
  images.reserve(m);
  for (int j = 0; j < m; ++j) {
    // Model angle runs twice around; the half-angle traverses the real
    // points of CP^1 exactly once.
    double th = 0.5 * grid->params[j][0];
    images.push_back(Point{{std::cos(th), 0.0, std::sin(th), 0.0}});
  }
  return make_mesh(kind, grid, std::move(images));
}

LagrangianMesh rp2_mesh(int m_theta, int m_phi, double offset) {
  ManifoldKind kind = projective_kind(2);
  GridPtr grid = sphere2_grid(m_theta, m_phi, /*antipodal=*/true, offset);
  std::vector<Point> images;
  images.reserve(grid->node_count);
  for (int v = 0; v < grid->node_count; ++v) {
    double theta = grid->params[v][0];
    double phi = grid->params[v][1];
    double x0 = std::cos(theta);
    double x1 = std::sin(theta) * std::cos(phi);
    double x2 = std::sin(theta) * std::sin(phi);
    images.push_back(Point{{x0, 0.0, x1, 0.0, x2, 0.0}});
  }
  return make_mesh(kind, grid, std::move(images));
}

LagrangianMesh torus_graph_mesh(int m, double offset) {
  ManifoldKind kind = torus_kind(1);
  GridPtr grid = circle_grid(m, offset);
  std::vector<Point> images;
  images.reserve(m);
  for (int j = 0; j < m; ++j) {
    double x = grid->params[j][0] / (2.0 * kPi);
    x -= std::floor(x);
    images.push_back(Point{{x, 0.0}});
  }
  return make_mesh(kind, grid, std::move(images));
}

HamiltonianSpec projective_rotation_hamiltonian(int n, int k, double s) {
  if (k < 1 || k > n) throw InvalidConfig("need 1 <= k <= n");
  HamiltonianSpec H;
  H.autonomous = true;
  H.support = HamiltonianSpec::Support::Global;
  H.value = [n, k, s](double, const Point& p) {
    double q = 0.0, nrm = 0.0;
    for (int j = 0; j <= n; ++j) {
      double a = p.coords[2 * j], b = p.coords[2 * j + 1];
      double m = a * a + b * b;
      nrm += m;
      if (j >= 1 && j <= k) q += m;
    }
    return -s * q / (2.0 * nrm);
  };
  H.gradient = [n, k, s](double, const Point& p) {
    double q = 0.0, nrm = 0.0;
    for (int j = 0; j <= n; ++j) {
      double a = p.coords[2 * j], b = p.coords[2 * j + 1];
      double m = a * a + b * b;
      nrm += m;
      if (j >= 1 && j <= k) q += m;
    }
    double ratio = q / nrm;
    std::vector<double> g(2 * (n + 1));
    for (int j = 0; j <= n; ++j) {
      double pj = (j >= 1 && j <= k) ? 1.0 : 0.0;
      g[2 * j] = -s * (pj - ratio) * p.coords[2 * j] / nrm;
      g[2 * j + 1] = -s * (pj - ratio) * p.coords[2 * j + 1] / nrm;
    }
    return g;
  };
  H.exact_flow = [n, k, s](double t, const Point& p) {
    return exact_flow_projective_rotation(n, k, s, t, p);
  };
  return H;
}

HamiltonianSpec linear_height_hamiltonian(double a, double r_plateau,
                                          double r_cutoff) {
  if (!(r_cutoff > r_plateau) || r_plateau <= 0.0)
    throw InvalidConfig("window radii must satisfy 0 < plateau < cutoff");
  HamiltonianSpec H;
  H.autonomous = true;
  H.support = HamiltonianSpec::Support::Compact;
  H.cutoff_radius = r_cutoff;
  auto window = [r_plateau, r_cutoff](double r) {
    return 1.0 - smoothstep01((r - r_plateau) / (r_cutoff - r_plateau));
  };
  H.value = [a, window](double, const Point& p) {
    double r = std::hypot(p.coords[0], p.coords[1]);
    return a * p.coords[0] * window(r);
  };
  H.gradient = [a, r_plateau, r_cutoff, window](double, const Point& p) {
    double x = p.coords[0], y = p.coords[1];
    double r = std::hypot(x, y);
    double w = window(r);
    double dw = -smoothstep01_deriv((r - r_plateau) / (r_cutoff - r_plateau)) /
                (r_cutoff - r_plateau);
    std::vector<double> g(2);
    if (r > 1e-300) {
      g[0] = a * w + a * x * dw * x / r;
      g[1] = a * x * dw * y / r;
    } else {
      g[0] = a * w;
      g[1] = 0.0;
    }
    return g;
  };
  H.exact_flow = [a](double t, const Point& p) {
    // Valid on the plateau, where the flow is a rigid vertical translation.
    return Point{{p.coords[0], p.coords[1] - a * t}};
  };
  return H;
}

HamiltonianSpec torus_cosine_hamiltonian(double a) {
  HamiltonianSpec H;
  H.autonomous = true;
  H.support = HamiltonianSpec::Support::Global;
  H.value = [a](double, const Point& p) {
    return a * std::cos(2.0 * kPi * p.coords[0]) / (2.0 * kPi);
  };
  H.gradient = [a](double, const Point& p) {
    return std::vector<double>{-a * std::sin(2.0 * kPi * p.coords[0]), 0.0};
  };
  H.exact_flow = [a](double t, const Point& p) {
    double y = p.coords[1] + t * a * std::sin(2.0 * kPi * p.coords[0]);
    y -= std::floor(y);
    return Point{{p.coords[0], y}};
  };
  return H;
}

namespace {

double oracle_delta(const PathLift& lift, const HamiltonianSpec& H) {
  if (!H.exact_flow) return std::numeric_limits<double>::quiet_NaN();
  double worst = 0.0;
  const auto& start = lift.meshes.front().images;
  for (int ti = 0; ti < lift.times(); ++ti) {
    for (int v = 0; v < lift.nodes(); ++v) {
      Point ref = H.exact_flow(lift.tgrid[ti], start[v]);
      worst = std::max(worst,
                       distance(lift.kind, ref, lift.meshes[ti].images[v]));
    }
  }
  return worst;
}

void self_check(const ScenarioReport& rep) {
  const auto& b = rep.length;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < b.t.size(); ++i) {
    if (b.osc[i] < -1e-15) throw std::logic_error("negative oscillation");
    total += 0.5 * (b.osc[i] + b.osc[i + 1]) * (b.t[i + 1] - b.t[i]);
  }
  if (std::abs(total - b.total) > 1e-12 * (1.0 + std::abs(total)))
    throw std::logic_error("length is not the quadrature of its samples");
  const auto& c = rep.crit;
  if (c.verdict == "critical") {
    if (c.p_plus.empty() || c.p_minus.empty())
      throw std::logic_error("critical verdict without persistent candidates");
    for (const auto& p : c.probes)
      if (p.decrease > c.tols.tol_probe)
        throw std::logic_error("critical verdict with a descending probe");
  } else if (c.verdict == "non-critical") {
    if (!c.has_certificate && !c.p_plus.empty() && !c.p_minus.empty())
      throw std::logic_error("non-critical verdict lacks evidence");
  } else if (c.verdict != "inconclusive") {
    throw std::logic_error("unknown verdict: " + c.verdict);
  }
}

ScenarioReport finish_report(const ScenarioConfig& cfg, ScenarioContext ctx,
                             std::string id, std::string note,
                             std::chrono::steady_clock::time_point begun) {
  ScenarioReport rep;
  rep.scenario_id = std::move(id);
  rep.config = cfg;
  rep.note = std::move(note);
  rep.length = hofer_length(ctx.lift, ctx.H);
  VerdictConfig vc;
  vc.probe_budget = cfg.budget;
  vc.seed = cfg.seed;
  rep.crit = quasi_autonomy_verdict(ctx.lift, ctx.H, vc);
  rep.oracle_delta = oracle_delta(ctx.lift, ctx.H);
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - begun)
                         .count();
  self_check(rep);
  return rep;
}

}  // namespace

ScenarioContext build_scenario_context(const ScenarioConfig& cfg) {
  ScenarioContext ctx;
  FlowConfig fc;
  fc.steps_per_unit = cfg.steps;
  auto tgrid = uniform_tgrid(cfg.tsamples);

  if (cfg.scenario == "projective-rotation") {
    if (cfg.n < 1 || cfg.n > 2)
      throw InvalidConfig("projective-rotation ships RP^1 and RP^2 meshes only "
                          "(n must be 1 or 2)");
    if (cfg.k < 1 || cfg.k > cfg.n) throw InvalidConfig("need 1 <= k <= n");
    if (!(cfg.s > 0.0) || cfg.s > 1.0)
      throw InvalidConfig("need s in (0, 1]");
    ctx.kind = projective_kind(cfg.n);
    ctx.H = projective_rotation_hamiltonian(cfg.n, cfg.k, cfg.s);
    LagrangianMesh L0 =
        cfg.n == 1
            ? rp1_mesh(cfg.mesh, cfg.mesh_offset)
            : [&] {
                int mphi = std::min(cfg.mesh, 128);
                mphi -= mphi % 4;
                int mtheta = cfg.mesh_theta > 0 ? cfg.mesh_theta : mphi / 2;
                return rp2_mesh(mtheta, mphi, cfg.mesh_offset);
              }();
    ctx.lift = integrate_path(ctx.kind, ctx.H, L0, tgrid, fc);
  } else if (cfg.scenario == "torus-graph") {
    if (!(cfg.amplitude >= 0.0) || cfg.amplitude >= 0.25)
      throw InvalidConfig("amplitude must lie in [0, 0.25) to keep the graphs "
                          "embedded");
    ctx.kind = torus_kind(1);
    ctx.H = torus_cosine_hamiltonian(cfg.amplitude);
    ctx.lift = integrate_path(ctx.kind, ctx.H,
                              torus_graph_mesh(cfg.mesh, cfg.mesh_offset), tgrid,
                              fc);
  } else if (cfg.scenario == "translated-circle") {
    ctx.kind = euclidean_kind(1);
    ctx.H = linear_height_hamiltonian(1.0);
    ctx.lift = integrate_path(ctx.kind, ctx.H,
                              unit_circle_mesh(cfg.mesh, cfg.mesh_offset), tgrid,
                              fc);
  } else if (cfg.scenario == "disjoint-endpoints") {
    if (!(cfg.gap > 0.0)) throw InvalidConfig("gap must be positive");
    ctx.kind = euclidean_kind(1);
    ctx.H = linear_height_hamiltonian(2.0 + cfg.gap);
    ctx.lift = integrate_path(ctx.kind, ctx.H,
                              unit_circle_mesh(cfg.mesh, cfg.mesh_offset), tgrid,
                              fc);
  } else {
    throw InvalidConfig("unknown scenario: " + cfg.scenario);
  }
  ctx.h = associated_function_from_H(ctx.lift, ctx.H);
  return ctx;
}

ScenarioReport scenario_projective_rotation(const ScenarioConfig& cfg) {
  auto begun = std::chrono::steady_clock::now();
  ScenarioConfig c = cfg;
  c.scenario = "projective-rotation";
  ScenarioContext ctx = build_scenario_context(c);
  return finish_report(
      c, std::move(ctx), "projective-rotation",
      "real projective subspace rotated by coordinate phases; extrema stay "
      "pointwise fixed",
      begun);
}

ScenarioReport scenario_torus_graph(const ScenarioConfig& cfg) {
  auto begun = std::chrono::steady_clock::now();
  ScenarioConfig c = cfg;
  c.scenario = "torus-graph";
  ScenarioContext ctx = build_scenario_context(c);
  return finish_report(c, std::move(ctx), "torus-graph",
                       "graph of an exact one-form drifting under an "
                       "autonomous profile; critical points of the profile "
                       "stay fixed",
                       begun);
}

ScenarioReport scenario_translated_circle(const ScenarioConfig& cfg) {
  auto begun = std::chrono::steady_clock::now();
  ScenarioConfig c = cfg;
  c.scenario = "translated-circle";
  ScenarioContext ctx = build_scenario_context(c);
  return finish_report(c, std::move(ctx), "translated-circle",
                       "rigidly translated circle: every extremal point "
                       "moves, so descent directions exist",
                       begun);
}

ScenarioReport scenario_disjoint_endpoints(const ScenarioConfig& cfg) {
  auto begun = std::chrono::steady_clock::now();
  ScenarioConfig c = cfg;
  c.scenario = "disjoint-endpoints";
  ScenarioContext ctx = build_scenario_context(c);
  double endpoint_gap = std::numeric_limits<double>::infinity();
  const auto& first = ctx.lift.meshes.front().images;
  const auto& last = ctx.lift.meshes.back().images;
  for (const auto& p : first)
    for (const auto& q : last)
      endpoint_gap = std::min(endpoint_gap, distance(ctx.kind, p, q));
  ScenarioReport rep = finish_report(
      c, std::move(ctx), "disjoint-endpoints",
      "disjoint endpoints: a length-critical connecting path would force a "
      "point lying on every intermediate submanifold, hence on both "
      "endpoints; none can exist",
      begun);
  rep.endpoint_min_distance = endpoint_gap;
  return rep;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  if (cfg.scenario == "projective-rotation")
    return scenario_projective_rotation(cfg);
  if (cfg.scenario == "torus-graph") return scenario_torus_graph(cfg);
  if (cfg.scenario == "translated-circle")
    return scenario_translated_circle(cfg);
  if (cfg.scenario == "disjoint-endpoints")
    return scenario_disjoint_endpoints(cfg);
  throw InvalidConfig("unknown scenario: " + cfg.scenario);
}

std::vector<std::pair<std::string, std::string>> scenario_list() {
  return {
      {"projective-rotation",
       "RP^n in CP^n under coordinate phase rotation (params: n, k, s)"},
      {"torus-graph",
       "graph in T^2 drifting under a cosine profile (params: amplitude)"},
      {"translated-circle", "unit circle translated by a linear height"},
      {"disjoint-endpoints",
       "exact path connecting two disjoint circles (params: gap)"},
  };
}

nlohmann::json report_to_json(const ScenarioReport& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario_id;
  j["length"] = {{"total", report.length.total},
                 {"quadrature", report.length.quadrature},
                 {"resolution_error", report.length.resolution_error}};
  j["criticality"] = criticality_to_json(report.crit);
  j["oracle_delta"] = report.oracle_delta;
  if (report.endpoint_min_distance >= 0.0)
    j["endpoint_min_distance"] = report.endpoint_min_distance;
  j["note"] = report.note;
  const auto& c = report.config;
  j["config"] = {{"scenario", c.scenario},
                 {"n", c.n},
                 {"k", c.k},
                 {"s", c.s},
                 {"gap", c.gap},
                 {"amplitude", c.amplitude},
                 {"mesh", c.mesh},
                 {"mesh_theta", c.mesh_theta},
                 {"tsamples", c.tsamples},
                 {"steps", c.steps},
                 {"budget", c.budget},
                 {"mesh_offset", c.mesh_offset},
                 {"seed", c.seed},
                 {"out", c.out_dir}};
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  j["meta"] = {{"generated_at", stamp}, {"wall_seconds", report.wall_seconds}};
  return j;
}

std::string probes_csv(const ScenarioReport& report) {
  std::string out = "id,s_star,decrease\n";
  char buf[200];
  for (const auto& p : report.crit.probes) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", p.id.c_str(), p.s_star,
                  p.decrease);
    out += buf;
  }
  return out;
}

void write_report_files(const ScenarioReport& report,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " in " + out_dir);
    f << text;
  };
  write("report.json", report_to_json(report).dump(2) + "\n");
  write("length.csv", to_csv(report.length));
  write("probes.csv", probes_csv(report));
  write("criticality.csv", criticality_csv(report.crit, report.length));
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"hoferlab: Hofer lengths and length-criticality of exact "
               "Lagrangian paths"};
  app.require_subcommand(0, 1);
  auto* run = app.add_subcommand("run", "run a scenario and write reports");

  ScenarioConfig cfg;
  std::string config_path;
  bool list = false;
  auto* opt_scenario =
      run->add_option("--scenario", cfg.scenario, "scenario id (see --list)");
  auto* opt_n = run->add_option("--n", cfg.n, "projective dimension");
  auto* opt_k = run->add_option("--k", cfg.k, "rotated coordinate count");
  auto* opt_s = run->add_option("--s", cfg.s, "rotation speed in (0,1]");
  auto* opt_gap = run->add_option("--gap", cfg.gap, "endpoint gap");
  auto* opt_amp =
      run->add_option("--amplitude", cfg.amplitude, "profile amplitude");
  auto* opt_mesh =
      run->add_option("--mesh", cfg.mesh, "samples per circle dimension");
  auto* opt_ts = run->add_option("--tsamples", cfg.tsamples, "time samples");
  auto* opt_steps =
      run->add_option("--steps", cfg.steps, "integrator steps per unit time");
  auto* opt_budget = run->add_option("--budget", cfg.budget, "probe budget");
  auto* opt_seed = run->add_option("--seed", cfg.seed, "probe sampling seed");
  auto* opt_out = run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--config", config_path, "flat JSON config (flags override)");
  run->add_flag("--list", list, "list scenarios and exit");

  std::vector<const char*> argv;
  argv.push_back("hoferlab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (!run->parsed()) {
    std::cout << app.help();
    return 1;
  }
  if (list) {
    for (const auto& [id, desc] : scenario_list())
      std::cout << id << "\t" << desc << "\n";
    return 0;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidConfig("cannot open config file " + config_path);
      nlohmann::json j = nlohmann::json::parse(f);
      ScenarioConfig file_cfg;
      file_cfg.scenario = j.value("scenario", file_cfg.scenario);
      file_cfg.n = j.value("n", file_cfg.n);
      file_cfg.k = j.value("k", file_cfg.k);
      file_cfg.s = j.value("s", file_cfg.s);
      file_cfg.gap = j.value("gap", file_cfg.gap);
      file_cfg.amplitude = j.value("amplitude", file_cfg.amplitude);
      file_cfg.mesh = j.value("mesh", file_cfg.mesh);
      file_cfg.mesh_theta = j.value("mesh_theta", file_cfg.mesh_theta);
      file_cfg.tsamples = j.value("tsamples", file_cfg.tsamples);
      file_cfg.steps = j.value("steps", file_cfg.steps);
      file_cfg.budget = j.value("budget", file_cfg.budget);
      file_cfg.mesh_offset = j.value("mesh_offset", file_cfg.mesh_offset);
      file_cfg.seed = j.value("seed", file_cfg.seed);
      file_cfg.out_dir = j.value("out", file_cfg.out_dir);
      // Flags given on the command line win over the file.
      if (!opt_scenario->count()) cfg.scenario = file_cfg.scenario;
      if (!opt_n->count()) cfg.n = file_cfg.n;
      if (!opt_k->count()) cfg.k = file_cfg.k;
      if (!opt_s->count()) cfg.s = file_cfg.s;
      if (!opt_gap->count()) cfg.gap = file_cfg.gap;
      if (!opt_amp->count()) cfg.amplitude = file_cfg.amplitude;
      if (!opt_mesh->count()) cfg.mesh = file_cfg.mesh;
      cfg.mesh_theta = file_cfg.mesh_theta;
      if (!opt_ts->count()) cfg.tsamples = file_cfg.tsamples;
      if (!opt_steps->count()) cfg.steps = file_cfg.steps;
      if (!opt_budget->count()) cfg.budget = file_cfg.budget;
      cfg.mesh_offset = file_cfg.mesh_offset;
      if (!opt_seed->count()) cfg.seed = file_cfg.seed;
      if (!opt_out->count()) cfg.out_dir = file_cfg.out_dir;
    }
    if (cfg.scenario.empty())
      throw InvalidConfig("no scenario given; use --scenario or --list");
    if (cfg.out_dir.empty()) cfg.out_dir = "out";

    ScenarioReport rep = run_scenario(cfg);
    write_report_files(rep, cfg.out_dir);
    std::cout << rep.scenario_id << ": verdict=" << rep.crit.verdict
              << " length=" << rep.length.total;
    if (rep.crit.has_certificate)
      std::cout << " best_decrease=" << rep.crit.certificate.decrease << " ("
                << rep.crit.certificate.id << ")";
    std::cout << " -> " << cfg.out_dir << "\n";
    return rep.crit.verdict == "inconclusive" ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hoferlab
