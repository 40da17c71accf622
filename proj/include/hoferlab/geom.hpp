#pragma once

#include <complex>
#include <vector>

namespace hoferlab {

enum class Backend { Euclidean, Torus, Projective };

// Concrete symplectic backend. n is the half-dimension for Euclidean/Torus
// (coordinates [x_1..x_n, y_1..y_n], torus periods 1) and the complex
// dimension for Projective (unit vectors in C^{n+1}, stored interleaved
// [re_0, im_0, ..., re_n, im_n]; representatives equal up to global phase).
struct ManifoldKind {
  Backend backend = Backend::Euclidean;
  int n = 1;

  int point_dim() const {
    return backend == Backend::Projective ? 2 * (n + 1) : 2 * n;
  }
  bool operator==(const ManifoldKind&) const = default;
};

ManifoldKind euclidean_kind(int n);
ManifoldKind torus_kind(int n);
ManifoldKind projective_kind(int n);

struct Point {
  std::vector<double> coords;
};

struct TangentVector {
  Point base;
  std::vector<double> components;
};

using Cx = std::complex<double>;

// Complex view of interleaved projective coordinates.
Cx cx_at(const std::vector<double>& v, int j);
void set_cx(std::vector<double>& v, int j, Cx z);
// Hermitian inner product sum_j conj(u_j) v_j of interleaved vectors.
Cx hermitian(const std::vector<double>& u, const std::vector<double>& v);

double norm_of(const std::vector<double>& v);

// Wraps a torus coordinate difference into (-1/2, 1/2].
double wrap_half(double d);

Point make_point(const ManifoldKind& kind, std::vector<double> coords);
TangentVector make_tangent(const ManifoldKind& kind, Point base,
                           std::vector<double> components);

// Symplectic form. Euclidean/Torus: sum dx_i ^ dy_i. Projective:
// Im<u,v> / pi on horizontal lifts (scaling calibrated so that
// omega(X_H, .) = dH reproduces the projective rotation flows).
double omega(const ManifoldKind& kind, const Point& p, const TangentVector& u,
             const TangentVector& v);

// Unchecked kernels for inner loops; callers guarantee matching dimensions
// and (projective) horizontality.
double omega_raw(const ManifoldKind& kind, const std::vector<double>& u,
                 const std::vector<double>& v);
double metric_raw(const ManifoldKind& kind, const std::vector<double>& u,
                  const std::vector<double>& v);

// Riemannian metric compatible with omega: dot product, resp.
// Re<u,v> / pi on horizontal lifts.
double metric(const ManifoldKind& kind, const Point& p, const TangentVector& u,
              const TangentVector& v);

// Euclidean distance, per-coordinate wrapped distance, or the phase-invariant
// angle arccos|<p,q>| between unit representatives.
double distance(const ManifoldKind& kind, const Point& p, const Point& q);

// Projective only: removes the component along the complex line through p.
TangentVector project_horizontal(const ManifoldKind& kind, const Point& p,
                                 const std::vector<double>& raw);

// Straight-line exponential used by tubular neighborhoods. Euclidean/Torus
// only; the projective backend is rejected.
Point exp_normal(const ManifoldKind& kind, const Point& p,
                 const TangentVector& v);

// Representative of q suited for differencing against ref: identity on
// Euclidean, nearest unwrapped representative on Torus, phase-aligned
// (max Re<ref, q'>) on Projective.
Point align_representative(const ManifoldKind& kind, const Point& ref,
                           const Point& q);

// Mesh-scale difference vector from p to q: chord (wrapped chord on Torus),
// horizontal-projected phase-aligned difference on Projective.
TangentVector difference_vector(const ManifoldKind& kind, const Point& p,
                                const Point& q);

// Torus: reduce coordinates into [0,1). Projective: renormalize to unit norm.
// Euclidean: identity.
Point canonicalize(const ManifoldKind& kind, Point p);

}  // namespace hoferlab
