#pragma once

#include <span>
#include <string>
#include <vector>

#include "hoferlab/flow.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

struct LengthBreakdown {
  std::vector<double> t;
  std::vector<double> max_h;
  std::vector<double> min_h;
  std::vector<double> osc;
  double total = 0.0;
  std::string quadrature = "trapezoid";
  // Mesh-resolution error bar from quadratic fits around the extrema.
  double resolution_error = 0.0;
};

double oscillation(std::span<const double> slice);

// Trapezoid quadrature of per-time oscillations over the time grid.
double hofer_norm(const AssociatedFunction& h, const std::vector<double>& tgrid);

// Max deviation between the velocity one-form and the edge differential of
// H's associated function, in units of the frame scale, plus the admissible
// threshold C * (dt + mesh spacing). A lift/Hamiltonian pair is consistent
// when deviation <= threshold.
struct ConsistencyCheck {
  double deviation = 0.0;
  double threshold = 0.0;
  bool consistent() const { return deviation <= threshold; }
};
ConsistencyCheck generator_consistency(const PathLift& lift,
                                   const HamiltonianSpec& H);

// Hofer length of the lift generated by H. Refuses (ConsistencyFailure) when
// the pair fails the consistency gate, since the oscillation integral would
// not be the length of this path.
LengthBreakdown hofer_length(const PathLift& lift, const HamiltonianSpec& H);

// 4-column plot data: t,max,min,osc.
std::string to_csv(const LengthBreakdown& b);

}  // namespace hoferlab
