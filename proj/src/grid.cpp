#include "hoferlab/grid.hpp"

#include <cmath>
#include <numbers>

#include "hoferlab/errors.hpp"

namespace hoferlab {

std::vector<int> ModelGrid::neighbors(int node) const {
  std::vector<int> out;
  for (int d = 0; d < dirs; ++d) {
    const Stencil& s = stencils[node][d];
    if (s.has_prev) out.push_back(s.prev);
    if (s.has_next) out.push_back(s.next);
  }
  return out;
}

GridPtr circle_grid(int m, double offset) {
  if (m < 64) throw InvalidConfig("circle grid needs at least 64 samples");
  auto g = std::make_shared<ModelGrid>();
  g->model = ModelGrid::Model::Circle;
  g->m = m;
  g->offset = offset;
  g->node_count = m;
  g->dirs = 1;
  g->stencils.resize(m);
  g->params.resize(m);
  for (int j = 0; j < m; ++j) {
    g->stencils[j][0] = {(j + m - 1) % m, (j + 1) % m, true, true};
    g->params[j] = {2.0 * std::numbers::pi * (j + offset) / m, 0.0};
  }
  std::vector<int> loop(m);
  for (int j = 0; j < m; ++j) loop[j] = j;
  g->generator_loops.push_back(std::move(loop));
  return g;
}

GridPtr sphere2_grid(int m_theta, int m_phi, bool antipodal, double offset) {
  if (m_theta < 16) throw InvalidConfig("sphere grid needs at least 16 rows");
  if (m_phi < 64) throw InvalidConfig("sphere grid needs at least 64 columns");
  if (m_phi % 2 != 0) throw InvalidConfig("sphere grid column count must be even");
  if (antipodal && m_phi % 4 != 0)
    throw InvalidConfig("antipodal sphere grid column count must be a multiple of 4");

  auto g = std::make_shared<ModelGrid>();
  g->model = ModelGrid::Model::Sphere2;
  g->m_theta = m_theta;
  g->m_phi = m_phi;
  g->antipodal = antipodal;
  g->offset = offset;
  g->dirs = 2;

  const int R = m_theta;
  const int C = m_phi;
  const double pi = std::numbers::pi;

  if (!antipodal) {
    // Full sphere, both polar caps left open.
    g->node_count = R * C;
    g->stencils.resize(g->node_count);
    g->params.resize(g->node_count);
    auto id = [C](int i, int j) { return i * C + j; };
    for (int i = 0; i < R; ++i) {
      double theta = pi * (i + 1) / (R + 1);
      for (int j = 0; j < C; ++j) {
        int v = id(i, j);
        g->params[v] = {theta, 2.0 * pi * (j + offset) / C};
        auto& st = g->stencils[v];
        st[0] = {i > 0 ? id(i - 1, j) : -1, i < R - 1 ? id(i + 1, j) : -1,
                 i > 0, i < R - 1};
        st[1] = {id(i, (j + C - 1) % C), id(i, (j + 1) % C), true, true};
      }
    }
    return g;
  }

  // Hemisphere rows theta in (0, pi/2], equator row exactly at pi/2 with
  // only half a ring; crossing the equator continues at phi + pi.
  const int H = C / 2;
  g->node_count = (R - 1) * C + H;
  g->stencils.resize(g->node_count);
  g->params.resize(g->node_count);
  auto id = [C](int i, int j) { return i * C + j; };
  const int eq_base = (R - 1) * C;
  auto eq_id = [eq_base, H](int j) { return eq_base + (j % H); };

  for (int i = 0; i + 1 < R; ++i) {
    double theta = (pi / 2.0) * (i + 1) / R;
    for (int j = 0; j < C; ++j) {
      int v = id(i, j);
      g->params[v] = {theta, 2.0 * pi * (j + offset) / C};
      auto& st = g->stencils[v];
      int down = (i + 2 < R) ? id(i + 1, j) : eq_id(j);
      st[0] = {i > 0 ? id(i - 1, j) : -1, down, i > 0, true};
      st[1] = {id(i, (j + C - 1) % C), id(i, (j + 1) % C), true, true};
    }
  }
  for (int j = 0; j < H; ++j) {
    int v = eq_base + j;
    g->params[v] = {pi / 2.0, 2.0 * pi * (j + offset) / C};
    auto& st = g->stencils[v];
    // Through the equator: the antipodal continuation lives at phi + pi.
    st[0] = {id(R - 2, j), id(R - 2, j + H), true, true};
    st[1] = {eq_base + (j + H - 1) % H, eq_base + (j + 1) % H, true, true};
  }
  return g;
}

}  // namespace hoferlab
