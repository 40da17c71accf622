#include "hoferlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>

#include "hoferlab/errors.hpp"

namespace hoferlab {

namespace {

std::vector<double> sub(const std::vector<double>& a,
                        const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// Canonical gauge for duplicate detection: largest-|z_j| coordinate made
// real positive, so coincident projective points (including antipodal real
// representatives) collide.
std::vector<double> dedup_key(const ManifoldKind& kind, const Point& p) {
  if (kind.backend != Backend::Projective) return p.coords;
  int best = 0;
  double best_mag = -1.0;
  for (int j = 0; j <= kind.n; ++j) {
    double m = std::abs(cx_at(p.coords, j));
    if (m > best_mag) {
      best_mag = m;
      best = j;
    }
  }
  Cx z = cx_at(p.coords, best);
  Cx phase = best_mag > 1e-300 ? std::conj(z) / best_mag : Cx{1.0, 0.0};
  std::vector<double> out(p.coords.size());
  for (int j = 0; j <= kind.n; ++j) {
    Cx w = cx_at(p.coords, j) * phase;
    out[2 * j] = w.real();
    out[2 * j + 1] = w.imag();
  }
  return out;
}

void check_no_duplicates(const ManifoldKind& kind, const GridPtr& grid,
                         const std::vector<Point>& images, double scale) {
  const double cell = std::max(scale * 1e-9, 1e-300);
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) {
        h ^= static_cast<std::size_t>(v);
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  std::unordered_map<std::vector<std::int64_t>, std::vector<int>, KeyHash> buckets;
  std::vector<std::vector<double>> keys(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    keys[i] = dedup_key(kind, images[i]);
    std::vector<std::int64_t> cellkey(keys[i].size());
    for (std::size_t d = 0; d < keys[i].size(); ++d)
      cellkey[d] = static_cast<std::int64_t>(std::floor(keys[i][d] / cell));
    buckets[cellkey].push_back(static_cast<int>(i));
  }
  for (const auto& [cellkey, members] : buckets) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        int i = members[a], j = members[b];
        double d = 0.0;
        for (std::size_t x = 0; x < keys[i].size(); ++x) {
          double dd = keys[i][x] - keys[j][x];
          d += dd * dd;
        }
        if (std::sqrt(d) > cell) continue;
        auto nbrs = grid->neighbors(i);
        if (std::find(nbrs.begin(), nbrs.end(), j) == nbrs.end())
          throw DegenerateMesh("non-neighbor nodes " + std::to_string(i) +
                               " and " + std::to_string(j) +
                               " have coincident images");
      }
    }
  }
}

}  // namespace

FrameSet frames(const LagrangianMesh& mesh) {
  const auto& kind = mesh.kind;
  const auto& grid = *mesh.grid;
  FrameSet fs;
  fs.dirs = grid.dirs;
  fs.e.resize(grid.node_count);
  for (int v = 0; v < grid.node_count; ++v) {
    const Point& base = mesh.images[v];
    for (int d = 0; d < grid.dirs; ++d) {
      const auto& st = grid.stencils[v][d];
      std::vector<double> comps;
      if (st.has_prev && st.has_next) {
        Point nxt = align_representative(kind, base, mesh.images[st.next]);
        Point prv = align_representative(kind, base, mesh.images[st.prev]);
        comps = sub(nxt.coords, prv.coords);
        for (double& c : comps) c *= 0.5;
      } else if (st.has_next) {
        Point nxt = align_representative(kind, base, mesh.images[st.next]);
        comps = sub(nxt.coords, base.coords);
      } else if (st.has_prev) {
        Point prv = align_representative(kind, base, mesh.images[st.prev]);
        comps = sub(base.coords, prv.coords);
      } else {
        comps.assign(kind.point_dim(), 0.0);
      }
      if (kind.backend == Backend::Projective)
        comps = project_horizontal(kind, base, comps).components;
      fs.e[v][d] = std::move(comps);
    }
  }
  return fs;
}

LagrangianMesh make_mesh(const ManifoldKind& kind, GridPtr grid,
                         std::vector<Point> images, double tol_lag_rel) {
  if (!grid) throw InvalidConfig("mesh needs a grid");
  if (static_cast<int>(images.size()) != grid->node_count)
    throw DimensionMismatch("image count does not match grid node count");
  for (auto& p : images) {
    if (static_cast<int>(p.coords.size()) != kind.point_dim())
      throw DimensionMismatch("image dimension does not match backend");
    if (kind.backend == Backend::Projective &&
        std::abs(norm_of(p.coords) - 1.0) > 1e-12)
      throw DimensionMismatch("projective image is not a unit representative");
  }

  LagrangianMesh mesh{kind, std::move(grid), std::move(images), tol_lag_rel};
  FrameSet fs = frames(mesh);
  double defect = 0.0;
  double spacing = 0.0;
  for (int v = 0; v < mesh.grid->node_count; ++v) {
    for (int d = 0; d < fs.dirs; ++d)
      spacing = std::max(spacing, norm_of(fs.e[v][d]));
    for (int a = 0; a < fs.dirs; ++a) {
      for (int b = a + 1; b < fs.dirs; ++b) {
        double na = norm_of(fs.e[v][a]);
        double nb = norm_of(fs.e[v][b]);
        if (na < 1e-300 || nb < 1e-300) continue;
        double w = std::abs(omega_raw(kind, fs.e[v][a], fs.e[v][b]));
        defect = std::max(defect, w / (na * nb));
      }
    }
  }
  mesh.lagrangian_defect = defect;
  mesh.max_spacing = spacing;
  if (defect > tol_lag_rel)
    throw DegenerateMesh("Lagrangian defect " + std::to_string(defect) +
                         " exceeds tolerance " + std::to_string(tol_lag_rel));
  check_no_duplicates(kind, mesh.grid, mesh.images,
                      std::max(spacing, 1e-12));
  return mesh;
}

PathLift make_lift(const ManifoldKind& kind, GridPtr grid,
                   std::vector<double> tgrid,
                   std::vector<std::vector<Point>> images_per_time,
                   double tol_lag_rel) {
  if (tgrid.empty()) throw InvalidConfig("lift needs at least one time");
  if (tgrid.size() != images_per_time.size())
    throw DimensionMismatch("time grid and image slices disagree");
  for (std::size_t i = 0; i + 1 < tgrid.size(); ++i)
    if (!(tgrid[i] < tgrid[i + 1]))
      throw InvalidConfig("time grid must be strictly increasing");
  if (tgrid.size() >= 2) {
    if (std::abs(tgrid.front()) > 1e-12 || std::abs(tgrid.back() - 1.0) > 1e-12)
      throw InvalidConfig("time grid must span [0,1]");
  }
  PathLift lift;
  lift.kind = kind;
  lift.grid = grid;
  lift.tgrid = std::move(tgrid);
  lift.meshes.reserve(images_per_time.size());
  for (auto& slice : images_per_time)
    lift.meshes.push_back(make_mesh(kind, grid, std::move(slice), tol_lag_rel));
  return lift;
}

AssociatedFunction associated_function(
    const PathLift& lift,
    const std::function<double(double, const Point&)>& H) {
  AssociatedFunction h;
  h.values.resize(lift.times());
  for (int ti = 0; ti < lift.times(); ++ti) {
    h.values[ti].resize(lift.nodes());
    for (int v = 0; v < lift.nodes(); ++v)
      h.values[ti][v] = H(lift.tgrid[ti], lift.meshes[ti].images[v]);
  }
  return h;
}

std::vector<std::vector<double>> time_velocities(const PathLift& lift, int ti) {
  if (lift.times() < 2)
    throw InvalidConfig("cannot differentiate a single-time lift");
  if (ti < 0 || ti >= lift.times()) throw InvalidConfig("time index out of range");
  const auto& kind = lift.kind;
  int lo = std::max(ti - 1, 0);
  int hi = std::min(ti + 1, lift.times() - 1);
  double dt = lift.tgrid[hi] - lift.tgrid[lo];
  std::vector<std::vector<double>> vel(lift.nodes());
  for (int v = 0; v < lift.nodes(); ++v) {
    const Point& base = lift.meshes[ti].images[v];
    Point a = align_representative(kind, base, lift.meshes[lo].images[v]);
    Point b = align_representative(kind, base, lift.meshes[hi].images[v]);
    std::vector<double> d = sub(b.coords, a.coords);
    for (double& c : d) c /= dt;
    if (kind.backend == Backend::Projective)
      d = project_horizontal(kind, base, d).components;
    vel[v] = std::move(d);
  }
  return vel;
}

OneFormSamples velocity_one_form(const PathLift& lift, int ti) {
  auto vel = time_velocities(lift, ti);
  FrameSet fs = frames(lift.meshes[ti]);
  OneFormSamples out;
  out.dirs = fs.dirs;
  out.alpha.resize(lift.nodes());
  for (int v = 0; v < lift.nodes(); ++v) {
    out.alpha[v] = {0.0, 0.0};
    for (int d = 0; d < fs.dirs; ++d)
      out.alpha[v][d] = omega_raw(lift.kind, vel[v], fs.e[v][d]);
  }
  return out;
}

namespace {

// Trapezoid edge integral of the velocity one-form along u -> w.
double edge_integral(const ManifoldKind& kind, const LagrangianMesh& mesh,
                     const std::vector<std::vector<double>>& vel, int u, int w) {
  const Point& pu = mesh.images[u];
  Point pw = align_representative(kind, pu, mesh.images[w]);
  std::vector<double> chord = sub(pw.coords, pu.coords);
  std::vector<double> vmid(vel[u].size());
  for (std::size_t i = 0; i < vmid.size(); ++i)
    vmid[i] = 0.5 * (vel[u][i] + vel[w][i]);
  if (kind.backend == Backend::Projective) {
    chord = project_horizontal(kind, pu, chord).components;
    vmid = project_horizontal(kind, pu, vmid).components;
  }
  return omega_raw(kind, vmid, chord);
}

double edge_length(const ManifoldKind& kind, const LagrangianMesh& mesh,
                   int u, int w) {
  return distance(kind, mesh.images[u], mesh.images[w]);
}

}  // namespace

std::vector<double> exactness_periods(const PathLift& lift, int ti) {
  auto vel = time_velocities(lift, ti);
  const auto& mesh = lift.meshes[ti];
  std::vector<double> periods;
  for (const auto& loop : lift.grid->generator_loops) {
    double acc = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
      int u = loop[k];
      int w = loop[(k + 1) % loop.size()];
      acc += edge_integral(lift.kind, mesh, vel, u, w);
    }
    periods.push_back(acc);
  }
  return periods;
}

std::vector<double> recover_h_from_alpha(const PathLift& lift, int ti,
                                         int basepoint, double tol_period) {
  if (basepoint < 0 || basepoint >= lift.nodes())
    throw InvalidConfig("basepoint out of range");
  auto vel = time_velocities(lift, ti);
  const auto& mesh = lift.meshes[ti];
  const auto& grid = *lift.grid;

  if (!grid.generator_loops.empty()) {
    double alpha_max = 0.0;
    {
      FrameSet fs = frames(mesh);
      for (int v = 0; v < grid.node_count; ++v)
        for (int d = 0; d < fs.dirs; ++d)
          alpha_max = std::max(
              alpha_max, std::abs(omega_raw(lift.kind, vel[v], fs.e[v][d])));
    }
    auto periods = exactness_periods(lift, ti);
    for (std::size_t li = 0; li < periods.size(); ++li) {
      const auto& loop = grid.generator_loops[li];
      double len = 0.0;
      for (std::size_t k = 0; k < loop.size(); ++k)
        len += edge_length(lift.kind, mesh, loop[k], loop[(k + 1) % loop.size()]);
      double tol = tol_period >= 0.0 ? tol_period : 1e-2 * alpha_max * len;
      if (std::abs(periods[li]) > tol)
        throw NotExact("loop period " + std::to_string(periods[li]) +
                       " exceeds tolerance " + std::to_string(tol) +
                       "; the velocity one-form is not exact");
    }
  }

  std::vector<double> h(grid.node_count,
                        std::numeric_limits<double>::quiet_NaN());
  std::deque<int> queue;
  h[basepoint] = 0.0;
  queue.push_back(basepoint);
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : grid.neighbors(u)) {
      if (!std::isnan(h[w])) continue;
      h[w] = h[u] + edge_integral(lift.kind, mesh, vel, u, w);
      queue.push_back(w);
    }
  }
  for (double x : h)
    if (std::isnan(x)) throw DegenerateMesh("grid is not connected");
  return h;
}

double mesh_separation(const LagrangianMesh& mesh) {
  const auto& kind = mesh.kind;
  const auto& grid = *mesh.grid;
  const int N = grid.node_count;

  // Nodes within grid distance <= 2 are "adjacent" here.
  std::vector<std::vector<int>> nearby(N);
  for (int v = 0; v < N; ++v) {
    auto n1 = grid.neighbors(v);
    std::vector<int> acc = n1;
    for (int w : n1) {
      auto n2 = grid.neighbors(w);
      acc.insert(acc.end(), n2.begin(), n2.end());
    }
    acc.push_back(v);
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    nearby[v] = std::move(acc);
  }

  FrameSet fs = frames(mesh);
  double best = std::numeric_limits<double>::infinity();
  // On the torus a tube meets its own wrapped copy at half the period, a
  // self-approach no node pair can witness.
  if (kind.backend == Backend::Torus) best = 0.5;
  const double scale = std::max(mesh.max_spacing, 1e-12);
  for (int i = 0; i < N; ++i) {
    const auto& nb = nearby[i];
    for (int j = 0; j < N; ++j) {
      if (std::binary_search(nb.begin(), nb.end(), j)) continue;
      TangentVector chord = difference_vector(kind, mesh.images[i],
                                              mesh.images[j]);
      double d2 = metric_raw(kind, chord.components, chord.components);
      double d = std::sqrt(std::max(d2, 0.0));
      if (d < 1e-9 * scale)
        throw DegenerateMesh("mesh touches itself at nodes " +
                             std::to_string(i) + ", " + std::to_string(j));
      // Remove the tangential part of the chord at node i.
      std::vector<double> nrm = chord.components;
      if (fs.dirs == 1) {
        const auto& e = fs.e[i][0];
        double ee = metric_raw(kind, e, e);
        if (ee > 1e-300) {
          double c = metric_raw(kind, chord.components, e) / ee;
          for (std::size_t x = 0; x < nrm.size(); ++x) nrm[x] -= c * e[x];
        }
      } else {
        const auto& e0 = fs.e[i][0];
        const auto& e1 = fs.e[i][1];
        double g00 = metric_raw(kind, e0, e0), g01 = metric_raw(kind, e0, e1),
               g11 = metric_raw(kind, e1, e1);
        double b0 = metric_raw(kind, chord.components, e0);
        double b1 = metric_raw(kind, chord.components, e1);
        double det = g00 * g11 - g01 * g01;
        if (std::abs(det) > 1e-300) {
          double c0 = (b0 * g11 - b1 * g01) / det;
          double c1 = (b1 * g00 - b0 * g01) / det;
          for (std::size_t x = 0; x < nrm.size(); ++x)
            nrm[x] -= c0 * e0[x] + c1 * e1[x];
        }
      }
      double nn = std::sqrt(std::max(metric_raw(kind, nrm, nrm), 0.0));
      if (nn < 1e-9 * d) continue;  // nearly tangential chord, not binding
      best = std::min(best, d2 / (2.0 * nn));
    }
  }
  if (!std::isfinite(best))
    throw DegenerateMesh("mesh separation is unbounded on this grid");
  return best;
}

}  // namespace hoferlab
