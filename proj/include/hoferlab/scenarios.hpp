#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoferlab/crit.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

struct ScenarioConfig {
  std::string scenario;
  int n = 1;
  int k = 1;
  double s = 1.0;
  double gap = 1.0;
  double amplitude = 0.1;
  int mesh = 512;        // samples per circle dimension
  int mesh_theta = 0;    // RP^2 rows; 0 = derive from mesh
  int tsamples = 201;
  int steps = 200;
  int budget = 200;
  double mesh_offset = 0.0;
  std::uint64_t seed = 12345;
  std::string out_dir;
};

struct ScenarioReport {
  std::string scenario_id;
  LengthBreakdown length;
  CriticalityReport crit;
  double oracle_delta = 0.0;  // max node distance, integrated vs exact flow
  double endpoint_min_distance = -1.0;  // disjoint-endpoints only
  double wall_seconds = 0.0;
  ScenarioConfig config;
  std::string note;
};

// --- building blocks shared by scenarios and tests ---

std::vector<double> uniform_tgrid(int tsamples);

LagrangianMesh unit_circle_mesh(int m, double offset = 0.0, double radius = 1.0,
                                double cx = 0.0, double cy = 0.0);
// Real projective line/plane embedded as the real points of CP^1 / CP^2.
LagrangianMesh rp1_mesh(int m, double offset = 0.0);
LagrangianMesh rp2_mesh(int m_theta, int m_phi, double offset = 0.0);
LagrangianMesh torus_graph_mesh(int m, double offset = 0.0);

// H = -s (|z_1|^2 + ... + |z_k|^2) / (2 |z|^2) with its analytic gradient and
// the explicit phase-rotation flow.
HamiltonianSpec projective_rotation_hamiltonian(int n, int k, double s);
// H = a * x, smoothly windowed to compact support far outside the scenarios'
// sweep region; flow translates vertically with speed a.
HamiltonianSpec linear_height_hamiltonian(double a, double r_plateau = 8.0,
                                          double r_cutoff = 12.0);
// H = a cos(2 pi x) / (2 pi) on the torus.
HamiltonianSpec torus_cosine_hamiltonian(double a);

// --- scenario runners ---

ScenarioReport scenario_projective_rotation(const ScenarioConfig& cfg);
ScenarioReport scenario_torus_graph(const ScenarioConfig& cfg);
ScenarioReport scenario_translated_circle(const ScenarioConfig& cfg);
ScenarioReport scenario_disjoint_endpoints(const ScenarioConfig& cfg);

ScenarioReport run_scenario(const ScenarioConfig& cfg);

std::vector<std::pair<std::string, std::string>> scenario_list();

// Rebuilds the scenario's lift and Hamiltonian (deterministic given the
// config); used to re-verify stored probe certificates.
struct ScenarioContext {
  ManifoldKind kind;
  HamiltonianSpec H;
  PathLift lift;
  AssociatedFunction h;
};
ScenarioContext build_scenario_context(const ScenarioConfig& cfg);

nlohmann::json report_to_json(const ScenarioReport& report);
std::string probes_csv(const ScenarioReport& report);

// Writes report.json, length.csv, probes.csv, criticality.csv into out_dir.
void write_report_files(const ScenarioReport& report, const std::string& out_dir);

// `run` subcommand: parses flags/config, runs the scenario, writes outputs.
// Returns 0 on success, 2 when the verdict is inconclusive, 1 on errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace hoferlab
