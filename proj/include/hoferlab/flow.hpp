#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hoferlab/geom.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

// Time-dependent ambient Hamiltonian H(t, p). The optional gradient hook
// returns the metric gradient of H in the flat chart (Euclidean/Torus
// coordinates, or the ambient R^{2n+2} gradient of H composed with the
// unit-sphere chart for Projective); when absent, central finite differences
// are used. The optional exact_flow hook is a reference isotopy psi_t used
// by oracle comparisons.
struct HamiltonianSpec {
  enum class Support { Global, Compact };

  std::function<double(double, const Point&)> value;
  std::function<std::vector<double>(double, const Point&)> gradient;
  std::function<Point(double, const Point&)> exact_flow;
  Support support = Support::Global;
  double cutoff_radius = 0.0;
  bool autonomous = false;

  double operator()(double t, const Point& p) const { return value(t, p); }
};

struct FlowConfig {
  enum class Stepper { RK4, Midpoint };
  Stepper stepper = Stepper::RK4;
  int steps_per_unit = 200;  // >= 50
  double fd_step = 1e-5;     // in [1e-7, 1e-3]
};

void validate(const FlowConfig& cfg);

// Metric gradient of H(t, .) in chart coordinates (finite differences unless
// a gradient hook is set). Projective results are horizontal-projected.
std::vector<double> hamiltonian_gradient(const ManifoldKind& kind,
                                         const HamiltonianSpec& H, double t,
                                         const Point& p, double fd_step = 1e-5);

// The unique X with omega(X, .) = dH(t, .): (dH/dy, -dH/dx) on flat
// backends, -pi * i * grad on the projective unit-sphere chart.
TangentVector hamiltonian_vector_field(const ManifoldKind& kind,
                                       const HamiltonianSpec& H, double t,
                                       const Point& p,
                                       const FlowConfig& cfg = {});

// Advances every node of L0 through the Hamiltonian flow and assembles the
// lift sampled at tgrid. Rejects the result if the Lagrangian defect of any
// time slice exceeds the mesh tolerance.
PathLift integrate_path(const ManifoldKind& kind, const HamiltonianSpec& H,
                        const LagrangianMesh& L0,
                        const std::vector<double>& tgrid,
                        const FlowConfig& cfg);

// Phase rotation [z_0 : e^{i pi s t} z_1 : ... : e^{i pi s t} z_k : ... : z_n].
Point exact_flow_projective_rotation(int n, int k, double s, double t,
                                     const Point& p);

// h(ti, node) = H(t_i, image).
AssociatedFunction associated_function_from_H(const PathLift& lift,
                                              const HamiltonianSpec& H);

}  // namespace hoferlab
