#include "hoferlab/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hoferlab/errors.hpp"

namespace hoferlab {

namespace {

constexpr double kUnitNormTol = 1e-12;
constexpr double kHorizontalTol = 1e-10;

void check_dim(const ManifoldKind& kind, const std::vector<double>& v,
               const char* what) {
  if (static_cast<int>(v.size()) != kind.point_dim())
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(kind.point_dim()) + ", got " +
                            std::to_string(v.size()));
}

void check_horizontal(const Point& p, const std::vector<double>& comps) {
  Cx ip = hermitian(p.coords, comps);
  double scale = std::max(1.0, norm_of(comps));
  if (std::abs(ip) > kHorizontalTol * scale)
    throw DimensionMismatch("projective tangent vector is not horizontal");
}

void check_based_at(const ManifoldKind& kind, const Point& p,
                    const TangentVector& u) {
  check_dim(kind, u.base.coords, "tangent base");
  // Projective bases compare up to phase; others exactly. The projective
  // distance is arccos-based and amplifies roundoff near coincident points,
  // so this is a coarse sanity bound.
  if (distance(kind, p, u.base) > 1e-6)
    throw DimensionMismatch("tangent vector not based at the given point");
}

}  // namespace

ManifoldKind euclidean_kind(int n) {
  if (n < 1) throw InvalidConfig("euclidean half-dimension must be >= 1");
  return {Backend::Euclidean, n};
}

ManifoldKind torus_kind(int n) {
  if (n < 1) throw InvalidConfig("torus half-dimension must be >= 1");
  return {Backend::Torus, n};
}

ManifoldKind projective_kind(int n) {
  if (n < 1) throw InvalidConfig("projective complex dimension must be >= 1");
  return {Backend::Projective, n};
}

Cx cx_at(const std::vector<double>& v, int j) { return {v[2 * j], v[2 * j + 1]}; }

void set_cx(std::vector<double>& v, int j, Cx z) {
  v[2 * j] = z.real();
  v[2 * j + 1] = z.imag();
}

Cx hermitian(const std::vector<double>& u, const std::vector<double>& v) {
  Cx acc{0.0, 0.0};
  const int m = static_cast<int>(u.size()) / 2;
  for (int j = 0; j < m; ++j) acc += std::conj(cx_at(u, j)) * cx_at(v, j);
  return acc;
}

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double wrap_half(double d) {
  d -= std::round(d);
  return d;
}

Point make_point(const ManifoldKind& kind, std::vector<double> coords) {
  check_dim(kind, coords, "point");
  Point p{std::move(coords)};
  if (kind.backend == Backend::Projective) {
    double nrm = norm_of(p.coords);
    if (std::abs(nrm - 1.0) > kUnitNormTol)
      throw DimensionMismatch("projective representative must have unit norm");
  } else if (kind.backend == Backend::Torus) {
    for (double& c : p.coords) {
      c -= std::floor(c);
      if (c >= 1.0) c = 0.0;  // guards c = 1 - ulp rounding up
    }
  }
  return p;
}

TangentVector make_tangent(const ManifoldKind& kind, Point base,
                           std::vector<double> components) {
  check_dim(kind, base.coords, "tangent base");
  check_dim(kind, components, "tangent components");
  if (kind.backend == Backend::Projective)
    check_horizontal(base, components);
  return {std::move(base), std::move(components)};
}

double omega_raw(const ManifoldKind& kind, const std::vector<double>& u,
                 const std::vector<double>& v) {
  if (kind.backend == Backend::Projective)
    return hermitian(u, v).imag() / std::numbers::pi;
  const int n = kind.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += u[i] * v[n + i] - u[n + i] * v[i];
  return s;
}

double metric_raw(const ManifoldKind& kind, const std::vector<double>& u,
                  const std::vector<double>& v) {
  if (kind.backend == Backend::Projective)
    return hermitian(u, v).real() / std::numbers::pi;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double omega(const ManifoldKind& kind, const Point& p, const TangentVector& u,
             const TangentVector& v) {
  check_dim(kind, p.coords, "point");
  check_dim(kind, u.components, "tangent");
  check_dim(kind, v.components, "tangent");
  check_based_at(kind, p, u);
  check_based_at(kind, p, v);
  if (kind.backend == Backend::Projective) {
    check_horizontal(p, u.components);
    check_horizontal(p, v.components);
  }
  return omega_raw(kind, u.components, v.components);
}

double metric(const ManifoldKind& kind, const Point& p, const TangentVector& u,
              const TangentVector& v) {
  check_dim(kind, p.coords, "point");
  check_dim(kind, u.components, "tangent");
  check_dim(kind, v.components, "tangent");
  check_based_at(kind, p, u);
  check_based_at(kind, p, v);
  if (kind.backend == Backend::Projective) {
    check_horizontal(p, u.components);
    check_horizontal(p, v.components);
  }
  return metric_raw(kind, u.components, v.components);
}

double distance(const ManifoldKind& kind, const Point& p, const Point& q) {
  check_dim(kind, p.coords, "point");
  check_dim(kind, q.coords, "point");
  switch (kind.backend) {
    case Backend::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.coords.size(); ++i) {
        double d = p.coords[i] - q.coords[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Backend::Torus: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.coords.size(); ++i) {
        double d = wrap_half(p.coords[i] - q.coords[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Backend::Projective: {
      Cx ip = hermitian(p.coords, q.coords);
      double mag = std::abs(ip);
      if (mag < 0.5) return std::acos(std::clamp(mag, 0.0, 1.0));
      // Near-coincident representatives: arccos loses half the digits, the
      // phase-aligned chord does not. 2 asin(chord/2) = arccos|<p,q>| exactly.
      Cx phase = std::conj(ip) / mag;
      double chord2 = 0.0;
      const int m = static_cast<int>(p.coords.size()) / 2;
      for (int j = 0; j < m; ++j) {
        Cx d = cx_at(q.coords, j) * phase - cx_at(p.coords, j);
        chord2 += std::norm(d);
      }
      double half = 0.5 * std::sqrt(chord2);
      return 2.0 * std::asin(std::clamp(half, 0.0, 1.0));
    }
  }
  return 0.0;
}

TangentVector project_horizontal(const ManifoldKind& kind, const Point& p,
                                 const std::vector<double>& raw) {
  if (kind.backend != Backend::Projective)
    throw UnsupportedBackend("project_horizontal is projective-only");
  check_dim(kind, p.coords, "point");
  check_dim(kind, raw, "raw vector");
  Cx ip = hermitian(p.coords, raw);
  std::vector<double> out(raw);
  const int m = kind.n + 1;
  for (int j = 0; j < m; ++j)
    set_cx(out, j, cx_at(out, j) - ip * cx_at(p.coords, j));
  return {p, std::move(out)};
}

Point exp_normal(const ManifoldKind& kind, const Point& p,
                 const TangentVector& v) {
  if (kind.backend == Backend::Projective)
    throw UnsupportedBackend("exp_normal is not available on the projective backend");
  check_dim(kind, p.coords, "point");
  check_dim(kind, v.components, "tangent");
  std::vector<double> out(p.coords);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v.components[i];
  return make_point(kind, std::move(out));
}

Point align_representative(const ManifoldKind& kind, const Point& ref,
                           const Point& q) {
  switch (kind.backend) {
    case Backend::Euclidean:
      return q;
    case Backend::Torus: {
      Point out = q;
      for (std::size_t i = 0; i < out.coords.size(); ++i)
        out.coords[i] = ref.coords[i] + wrap_half(q.coords[i] - ref.coords[i]);
      return out;
    }
    case Backend::Projective: {
      Cx ip = hermitian(q.coords, ref.coords);
      double mag = std::abs(ip);
      Cx phase = mag > 1e-300 ? ip / mag : Cx{1.0, 0.0};
      Point out = q;
      const int m = kind.n + 1;
      for (int j = 0; j < m; ++j) set_cx(out.coords, j, cx_at(q.coords, j) * phase);
      return out;
    }
  }
  return q;
}

TangentVector difference_vector(const ManifoldKind& kind, const Point& p,
                                const Point& q) {
  Point qa = align_representative(kind, p, q);
  std::vector<double> d(p.coords.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = qa.coords[i] - p.coords[i];
  if (kind.backend == Backend::Projective)
    return project_horizontal(kind, p, d);
  return {p, std::move(d)};
}

Point canonicalize(const ManifoldKind& kind, Point p) {
  check_dim(kind, p.coords, "point");
  if (kind.backend == Backend::Torus) {
    for (double& c : p.coords) {
      c -= std::floor(c);
      if (c >= 1.0) c = 0.0;
    }
  } else if (kind.backend == Backend::Projective) {
    double nrm = norm_of(p.coords);
    if (nrm < 1e-300) throw DegenerateMesh("cannot normalize a zero vector");
    for (double& c : p.coords) c /= nrm;
  }
  return p;
}

}  // namespace hoferlab
