#pragma once

#include <array>
#include <memory>
#include <vector>

namespace hoferlab {

// Combinatorial sample grid of the model manifold L. Shipped models: the
// circle (m nodes, one homology generator loop) and the 2-sphere on a
// colatitude/longitude grid. With antipodal=true the sphere grid covers one
// hemisphere with equator gluing (theta, phi) ~ (pi - theta, phi + pi) and
// represents RP^2; loop integrals over real coefficients vanish there, so it
// carries no generator loops.
struct ModelGrid {
  enum class Model { Circle, Sphere2 };

  struct Stencil {
    int prev = -1;
    int next = -1;
    bool has_prev = false;
    bool has_next = false;
  };

  Model model = Model::Circle;
  int m = 0;                  // circle node count
  int m_theta = 0, m_phi = 0; // sphere grid sizes
  bool antipodal = false;
  double offset = 0.0;        // sample offset in grid units

  int node_count = 0;
  int dirs = 1;
  // stencils[node][dir]
  std::vector<std::array<Stencil, 2>> stencils;
  // node parameters: circle angle in [0, 2*pi), or (theta, phi)
  std::vector<std::array<double, 2>> params;
  std::vector<std::vector<int>> generator_loops;

  std::vector<int> neighbors(int node) const;
};

using GridPtr = std::shared_ptr<const ModelGrid>;

// m >= 64; offset shifts every sample by offset/m of a grid cell.
GridPtr circle_grid(int m, double offset = 0.0);

// m_theta >= 16 rows, m_phi >= 64 columns (even; multiple of 4 when
// antipodal so the gluing lands on grid nodes).
GridPtr sphere2_grid(int m_theta, int m_phi, bool antipodal,
                     double offset = 0.0);

}  // namespace hoferlab
