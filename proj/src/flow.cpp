#include "hoferlab/flow.hpp"

#include <cmath>
#include <numbers>

#include "hoferlab/errors.hpp"
#include "hoferlab/parallel.hpp"

namespace hoferlab {

void validate(const FlowConfig& cfg) {
  if (cfg.steps_per_unit < 50)
    throw InvalidConfig("flow needs at least 50 steps per unit time");
  if (cfg.fd_step < 1e-7 || cfg.fd_step > 1e-3)
    throw InvalidConfig("finite-difference step must lie in [1e-7, 1e-3]");
}

std::vector<double> hamiltonian_gradient(const ManifoldKind& kind,
                                         const HamiltonianSpec& H, double t,
                                         const Point& p, double fd_step) {
  if (H.gradient) {
    auto g = H.gradient(t, p);
    if (static_cast<int>(g.size()) != kind.point_dim())
      throw DimensionMismatch("gradient hook returned wrong dimension");
    return g;
  }
  const int dim = kind.point_dim();
  std::vector<double> g(dim);
  Point q = p;
  for (int i = 0; i < dim; ++i) {
    const double saved = q.coords[i];
    q.coords[i] = saved + fd_step;
    double hp = H.value(t, canonicalize(kind, q));
    q.coords[i] = saved - fd_step;
    double hm = H.value(t, canonicalize(kind, q));
    q.coords[i] = saved;
    g[i] = (hp - hm) / (2.0 * fd_step);
  }
  return g;
}

namespace {

// Field components at a chart point (not necessarily canonical).
std::vector<double> field_components(const ManifoldKind& kind,
                                     const HamiltonianSpec& H, double t,
                                     const Point& p, double fd_step) {
  Point pc = canonicalize(kind, p);
  std::vector<double> g = hamiltonian_gradient(kind, H, t, pc, fd_step);
  const int dim = kind.point_dim();
  std::vector<double> X(dim);
  if (kind.backend == Backend::Projective) {
    g = project_horizontal(kind, pc, g).components;
    // X = -pi * i * grad: per complex coordinate (a, b) -> pi * (b, -a).
    for (int j = 0; j <= kind.n; ++j) {
      X[2 * j] = std::numbers::pi * g[2 * j + 1];
      X[2 * j + 1] = -std::numbers::pi * g[2 * j];
    }
  } else {
    const int n = kind.n;
    for (int i = 0; i < n; ++i) {
      X[i] = g[n + i];
      X[n + i] = -g[i];
    }
  }
  return X;
}

}  // namespace

TangentVector hamiltonian_vector_field(const ManifoldKind& kind,
                                       const HamiltonianSpec& H, double t,
                                       const Point& p, const FlowConfig& cfg) {
  if (!H.value) throw InvalidConfig("Hamiltonian has no evaluator");
  Point pc = canonicalize(kind, p);
  std::vector<double> X = field_components(kind, H, t, pc, cfg.fd_step);
  if (kind.backend == Backend::Projective)
    return project_horizontal(kind, pc, X);
  return {pc, std::move(X)};
}

PathLift integrate_path(const ManifoldKind& kind, const HamiltonianSpec& H,
                        const LagrangianMesh& L0,
                        const std::vector<double>& tgrid,
                        const FlowConfig& cfg) {
  validate(cfg);
  if (!H.value) throw InvalidConfig("Hamiltonian has no evaluator");
  if (tgrid.size() < 2) throw InvalidConfig("integration needs >= 2 times");

  const int dim = kind.point_dim();
  const int N = L0.grid->node_count;
  std::vector<std::vector<Point>> slices(tgrid.size());
  for (auto& s : slices) s.resize(N, Point{std::vector<double>(dim, 0.0)});

  parallel_for(static_cast<std::size_t>(N), [&](std::size_t v) {
    Point z = L0.images[v];
    slices[0][v] = z;
    for (std::size_t seg = 0; seg + 1 < tgrid.size(); ++seg) {
      const double t0 = tgrid[seg];
      const double t1 = tgrid[seg + 1];
      const int substeps = std::max(
          1, static_cast<int>(std::ceil((t1 - t0) * cfg.steps_per_unit)));
      const double dt = (t1 - t0) / substeps;
      for (int s = 0; s < substeps; ++s) {
        const double t = t0 + s * dt;
        auto eval = [&](double tt, const std::vector<double>& c) {
          return field_components(kind, H, tt, Point{c}, cfg.fd_step);
        };
        std::vector<double> y = z.coords;
        if (cfg.stepper == FlowConfig::Stepper::Midpoint) {
          auto k1 = eval(t, y);
          std::vector<double> ymid(y);
          for (int i = 0; i < dim; ++i) ymid[i] += 0.5 * dt * k1[i];
          auto k2 = eval(t + 0.5 * dt, ymid);
          for (int i = 0; i < dim; ++i) y[i] += dt * k2[i];
        } else {
          auto k1 = eval(t, y);
          std::vector<double> tmp(y);
          for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
          auto k2 = eval(t + 0.5 * dt, tmp);
          for (int i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
          auto k3 = eval(t + 0.5 * dt, tmp);
          for (int i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
          auto k4 = eval(t + dt, tmp);
          for (int i = 0; i < dim; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        z = canonicalize(kind, Point{std::move(y)});
      }
      slices[seg + 1][v] = z;
    }
  });

  try {
    return make_lift(kind, L0.grid, tgrid, std::move(slices), L0.tol_lag_rel);
  } catch (const DegenerateMesh& e) {
    throw StepRejected(std::string("integrated path violates mesh invariants (") +
                       e.what() + "); try more steps per unit time");
  }
}

Point exact_flow_projective_rotation(int n, int k, double s, double t,
                                     const Point& p) {
  if (k < 1 || k > n) throw InvalidConfig("rotation needs 1 <= k <= n");
  ManifoldKind kind = projective_kind(n);
  if (static_cast<int>(p.coords.size()) != kind.point_dim())
    throw DimensionMismatch("point dimension does not match CP^n");
  Point out = p;
  const Cx phase = std::polar(1.0, std::numbers::pi * s * t);
  for (int j = 1; j <= k; ++j) set_cx(out.coords, j, cx_at(p.coords, j) * phase);
  return out;
}

AssociatedFunction associated_function_from_H(const PathLift& lift,
                                              const HamiltonianSpec& H) {
  if (!H.value) throw InvalidConfig("Hamiltonian has no evaluator");
  return associated_function(lift, H.value);
}

}  // namespace hoferlab
