#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hoferlab/geom.hpp"
#include "hoferlab/grid.hpp"

namespace hoferlab {

// Sampled Lagrangian embedding of a model grid. Frames are finite-difference
// tangent vectors recomputed on demand; the Lagrangian defect
// max |omega(e_a, e_b)| / (|e_a||e_b|) must stay below tol_lag_rel.
struct LagrangianMesh {
  ManifoldKind kind;
  GridPtr grid;
  std::vector<Point> images;
  double tol_lag_rel = 1e-4;

  double lagrangian_defect = 0.0;  // computed at construction
  double max_spacing = 0.0;        // max frame-vector norm
};

// Per node, per direction tangent frame vectors (components only, based at
// the node image).
struct FrameSet {
  int dirs = 1;
  std::vector<std::array<std::vector<double>, 2>> e;
};

LagrangianMesh make_mesh(const ManifoldKind& kind, GridPtr grid,
                         std::vector<Point> images, double tol_lag_rel = 1e-4);

FrameSet frames(const LagrangianMesh& mesh);

// Time-indexed family of meshes over one shared grid: a lift, node labels
// align across time. tgrid is strictly increasing in [0,1]; with two or more
// samples it must start at 0 and end at 1.
struct PathLift {
  ManifoldKind kind;
  GridPtr grid;
  std::vector<double> tgrid;
  std::vector<LagrangianMesh> meshes;

  int times() const { return static_cast<int>(tgrid.size()); }
  int nodes() const { return grid->node_count; }
};

PathLift make_lift(const ManifoldKind& kind, GridPtr grid,
                   std::vector<double> tgrid,
                   std::vector<std::vector<Point>> images_per_time,
                   double tol_lag_rel = 1e-4);

// Sampled function on [0,1] x L, indexed like a lift: values[ti][node].
struct AssociatedFunction {
  enum class Normalization { Raw, MeanZeroPerTime };
  std::vector<std::vector<double>> values;
  Normalization normalization = Normalization::Raw;
};

// h(ti, node) = H(t_i, image(ti, node)).
AssociatedFunction associated_function(
    const PathLift& lift,
    const std::function<double(double, const Point&)>& H);

// Node velocities d iota / dt at time index ti by centered differences
// (one-sided at the ends); projective images are phase-aligned and the
// result horizontal-projected. Throws on single-time lifts.
std::vector<std::vector<double>> time_velocities(const PathLift& lift, int ti);

// alpha_t(e_d) = omega(d iota/dt, e_d) per node and frame direction.
struct OneFormSamples {
  int dirs = 1;
  std::vector<std::array<double, 2>> alpha;
};
OneFormSamples velocity_one_form(const PathLift& lift, int ti);

// Loop integrals of the velocity one-form over the grid's homology
// generator loops (empty when the model has none).
std::vector<double> exactness_periods(const PathLift& lift, int ti);

// Line-integrates the velocity one-form over a spanning tree from the
// basepoint; requires loop periods below tol_period (default
// 1e-2 * max|alpha| * loop length). Result is zero at the basepoint.
std::vector<double> recover_h_from_alpha(const PathLift& lift, int ti,
                                         int basepoint,
                                         double tol_period = -1.0);

// Reach proxy: min over node pairs at grid distance > 2 of
// |chord|^2 / (2 |normal part of chord|). Bounds tube radii for extensions.
double mesh_separation(const LagrangianMesh& mesh);

}  // namespace hoferlab
