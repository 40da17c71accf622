#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hoferlab/geom.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

// Radial cutoff in squared normal norm tau: 1 on tau <= eps/2, 0 on
// tau >= eps, quintic smoothstep between (C^2 joins). eps < 1 keeps the
// (1 - |v|^2) factor positive on the support.
struct BumpProfile {
  double epsilon = 0.0;
  double alpha(double tau) const;
};

BumpProfile make_bump(double epsilon);

// Shifts a non-constant slice by -(max+min)/2 so its maximum is positive and
// its minimum negative; a constant slice becomes identically zero. The
// applied shift is returned through shift_out.
std::vector<double> normalize_for_extension(const std::vector<double>& slice,
                                            double* shift_out = nullptr);

// Ambient extension of a normalized mesh function: zero outside the tube,
// alpha(|v|^2) * h(x) * (1 - |v|^2) at normal offset v from the nearest
// node x. Restriction to the mesh reproduces h exactly and the ambient
// extrema sets match the mesh extrema sets.
class AmbientExtension {
 public:
  AmbientExtension(LagrangianMesh mesh, std::vector<double> h_normalized,
                   BumpProfile bump);

  double operator()(const Point& p) const;

  // Nearest mesh node within the tube, or -1 (ties break to the smallest
  // node index).
  int nearest_node(const Point& p, double* dist2_out = nullptr) const;

  const LagrangianMesh& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return h_; }
  const BumpProfile& bump() const { return bump_; }

 private:
  static constexpr int kMaxDim = 8;

  LagrangianMesh mesh_;
  std::vector<double> h_;
  BumpProfile bump_;
  int dim_ = 0;
  bool torus_ = false;
  std::vector<double> flat_images_;         // node-major coordinates
  std::vector<double> flat_frames_;         // node-major, dirs * dim
  std::vector<double> frame_gram_;          // per node: g00 g01 g11 (dirs=2)
  int dirs_ = 1;
  double cell_ = 0.0;
  std::int64_t wrap_cells_ = 0;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;

  std::int64_t bucket_key(const std::int64_t* cells) const;
};

// Requires a Euclidean/Torus mesh, a normalized slice, and
// bump.epsilon <= mesh_separation(mesh). Computing the separation is
// quadratic in the node count; callers that already know it can pass it as
// separation_hint.
AmbientExtension tubular_extension(const LagrangianMesh& mesh,
                                   const std::vector<double>& h_normalized,
                                   const BumpProfile& bump,
                                   double separation_hint = -1.0);

struct ExtensionExtremaReport {
  bool degenerate = false;   // constant slice, extension identically zero
  double mesh_max = 0.0, mesh_min = 0.0;
  double cloud_max = 0.0, cloud_min = 0.0;
  bool argmax_near_mesh_maxset = true;
  bool argmin_near_mesh_minset = true;
  // Value clearance between the extrema and the best cloud point farther
  // than tol_geo from the corresponding extremal nodes.
  double clearance_max = 0.0, clearance_min = 0.0;
};

ExtensionExtremaReport extension_extrema_check(const AmbientExtension& ext,
                                               const std::vector<Point>& cloud,
                                               double tol_geo);

// Extension of a whole path: one tube per time slice, linear interpolation
// in t between slices, a single epsilon for all times.
struct PathExtension {
  std::vector<double> tgrid;
  std::vector<AmbientExtension> slices;
  std::vector<double> shifts;
  double epsilon = 0.0;

  double operator()(double t, const Point& p) const;
};

// Minimum mesh separation over sampled time slices of the lift.
double path_separation(const PathLift& lift);

// Builds per-time tubes over the lift using the normalized values of h.
// epsilon defaults to min(0.9, 0.9*sep, (0.8*sep)^2) with sep the minimum
// separation over sampled time slices (precomputable via separation_hint).
PathExtension extend_along_path(const PathLift& lift,
                                const AssociatedFunction& h,
                                double epsilon = -1.0,
                                double separation_hint = -1.0);

}  // namespace hoferlab
