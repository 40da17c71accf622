#include "hoferlab/extend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hoferlab/errors.hpp"

namespace hoferlab {

double BumpProfile::alpha(double tau) const {
  if (tau <= 0.5 * epsilon) return 1.0;
  if (tau >= epsilon) return 0.0;
  double u = (tau - 0.5 * epsilon) / (0.5 * epsilon);
  double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  return 1.0 - s;
}

BumpProfile make_bump(double epsilon) {
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw InvalidConfig("bump support must satisfy 0 < epsilon < 1");
  return BumpProfile{epsilon};
}

std::vector<double> normalize_for_extension(const std::vector<double>& slice,
                                            double* shift_out) {
  if (slice.empty()) throw InvalidConfig("cannot normalize an empty slice");
  auto [mn, mx] = std::minmax_element(slice.begin(), slice.end());
  std::vector<double> out(slice.size());
  if (*mx - *mn <= 0.0) {
    if (shift_out) *shift_out = -*mx;
    return out;  // constant slice -> identically zero
  }
  double shift = -0.5 * (*mx + *mn);
  for (std::size_t i = 0; i < slice.size(); ++i) out[i] = slice[i] + shift;
  if (shift_out) *shift_out = shift;
  return out;
}

std::int64_t AmbientExtension::bucket_key(const std::int64_t* cells) const {
  std::int64_t h = 1469598103934665603ll;
  for (int i = 0; i < dim_; ++i) {
    h ^= cells[i];
    h *= 1099511628211ll;
  }
  return h;
}

AmbientExtension::AmbientExtension(LagrangianMesh mesh,
                                   std::vector<double> h_normalized,
                                   BumpProfile bump)
    : mesh_(std::move(mesh)), h_(std::move(h_normalized)), bump_(bump) {
  if (mesh_.kind.backend == Backend::Projective)
    throw UnsupportedBackend("tubular extensions are flat-backend only");
  if (static_cast<int>(h_.size()) != mesh_.grid->node_count)
    throw DimensionMismatch("slice size does not match the mesh");
  dim_ = mesh_.kind.point_dim();
  if (dim_ > kMaxDim)
    throw UnsupportedBackend("tubular extensions support dimension <= 8");
  torus_ = mesh_.kind.backend == Backend::Torus;

  const int N = mesh_.grid->node_count;
  FrameSet fs = frames(mesh_);
  dirs_ = fs.dirs;
  flat_images_.resize(static_cast<std::size_t>(N) * dim_);
  flat_frames_.resize(static_cast<std::size_t>(N) * dirs_ * dim_);
  frame_gram_.resize(static_cast<std::size_t>(N) * 3);
  for (int v = 0; v < N; ++v) {
    for (int i = 0; i < dim_; ++i)
      flat_images_[v * dim_ + i] = mesh_.images[v].coords[i];
    for (int d = 0; d < dirs_; ++d)
      for (int i = 0; i < dim_; ++i)
        flat_frames_[(v * dirs_ + d) * dim_ + i] = fs.e[v][d][i];
    double g00 = 0.0, g01 = 0.0, g11 = 0.0;
    const double* e0 = &flat_frames_[(v * dirs_ + 0) * dim_];
    for (int i = 0; i < dim_; ++i) g00 += e0[i] * e0[i];
    if (dirs_ == 2) {
      const double* e1 = &flat_frames_[(v * dirs_ + 1) * dim_];
      for (int i = 0; i < dim_; ++i) {
        g01 += e0[i] * e1[i];
        g11 += e1[i] * e1[i];
      }
    }
    frame_gram_[v * 3] = g00;
    frame_gram_[v * 3 + 1] = g01;
    frame_gram_[v * 3 + 2] = g11;
  }

  if (torus_) {
    // Cell size divides the period exactly so wrapped cells tile [0,1).
    wrap_cells_ = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::floor(1.0 / std::sqrt(bump_.epsilon))));
    cell_ = 1.0 / static_cast<double>(wrap_cells_);
  } else {
    cell_ = std::sqrt(bump_.epsilon);
  }
  for (int v = 0; v < N; ++v) {
    std::int64_t cells[kMaxDim];
    for (int i = 0; i < dim_; ++i)
      cells[i] = static_cast<std::int64_t>(
          std::floor(flat_images_[v * dim_ + i] / cell_));
    buckets_[bucket_key(cells)].push_back(v);
  }
  for (auto& [key, list] : buckets_) std::sort(list.begin(), list.end());
}

int AmbientExtension::nearest_node(const Point& p, double* dist2_out) const {
  std::int64_t base[kMaxDim];
  for (int i = 0; i < dim_; ++i)
    base[i] = static_cast<std::int64_t>(std::floor(p.coords[i] / cell_));

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::int64_t cells[kMaxDim];
  // Scan the 3^dim neighborhood of the query cell.
  int combos = 1;
  for (int i = 0; i < dim_; ++i) combos *= 3;
  for (int c = 0; c < combos; ++c) {
    int rem = c;
    for (int i = 0; i < dim_; ++i) {
      cells[i] = base[i] + (rem % 3) - 1;
      rem /= 3;
      if (torus_) {
        std::int64_t m = cells[i] % wrap_cells_;
        if (m < 0) m += wrap_cells_;
        cells[i] = m;
      }
    }
    auto it = buckets_.find(bucket_key(cells));
    if (it == buckets_.end()) continue;
    for (int v : it->second) {
      const double* img = &flat_images_[v * static_cast<std::size_t>(dim_)];
      double d2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        double d = p.coords[i] - img[i];
        if (torus_) d = wrap_half(d);
        d2 += d * d;
      }
      if (d2 < best_d2 || (d2 == best_d2 && v < best)) {
        best_d2 = d2;
        best = v;
      }
    }
  }
  if (dist2_out) *dist2_out = best_d2;
  if (!(best_d2 < bump_.epsilon)) return -1;
  return best;
}

double AmbientExtension::operator()(const Point& p) const {
  double d2 = 0.0;
  int x = nearest_node(p, &d2);
  if (x < 0) return 0.0;
  // Normal part of the offset at x.
  double off[kMaxDim];
  const double* img = &flat_images_[x * static_cast<std::size_t>(dim_)];
  for (int i = 0; i < dim_; ++i) {
    off[i] = p.coords[i] - img[i];
    if (torus_) off[i] = wrap_half(off[i]);
  }
  const double* e0 = &flat_frames_[(x * dirs_ + 0) * static_cast<std::size_t>(dim_)];
  const double g00 = frame_gram_[x * 3];
  if (dirs_ == 1) {
    if (g00 > 1e-300) {
      double b0 = 0.0;
      for (int i = 0; i < dim_; ++i) b0 += off[i] * e0[i];
      double c = b0 / g00;
      for (int i = 0; i < dim_; ++i) off[i] -= c * e0[i];
    }
  } else {
    const double* e1 = &flat_frames_[(x * dirs_ + 1) * static_cast<std::size_t>(dim_)];
    const double g01 = frame_gram_[x * 3 + 1];
    const double g11 = frame_gram_[x * 3 + 2];
    double b0 = 0.0, b1 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      b0 += off[i] * e0[i];
      b1 += off[i] * e1[i];
    }
    double det = g00 * g11 - g01 * g01;
    if (std::abs(det) > 1e-300) {
      double c0 = (b0 * g11 - b1 * g01) / det;
      double c1 = (b1 * g00 - b0 * g01) / det;
      for (int i = 0; i < dim_; ++i) off[i] -= c0 * e0[i] + c1 * e1[i];
    }
  }
  double tau = 0.0;
  for (int i = 0; i < dim_; ++i) tau += off[i] * off[i];
  return bump_.alpha(tau) * h_[x] * (1.0 - tau);
}

AmbientExtension tubular_extension(const LagrangianMesh& mesh,
                                   const std::vector<double>& h_normalized,
                                   const BumpProfile& bump,
                                   double separation_hint) {
  if (mesh.kind.backend == Backend::Projective)
    throw UnsupportedBackend("tubular extensions are flat-backend only");
  auto [mn, mx] =
      std::minmax_element(h_normalized.begin(), h_normalized.end());
  const bool constant = (*mx - *mn <= 0.0);
  if (!constant && !(*mx > 0.0 && *mn < 0.0))
    throw InvalidConfig("slice must be normalized (positive max, negative min)");
  if (constant && *mx != 0.0)
    throw InvalidConfig("constant slice must be normalized to zero");
  double sep = separation_hint >= 0.0 ? separation_hint : mesh_separation(mesh);
  if (bump.epsilon > sep)
    throw InvalidConfig("tube support " + std::to_string(bump.epsilon) +
                        " exceeds mesh separation " + std::to_string(sep) +
                        "; the tube would self-intersect");
  return AmbientExtension(mesh, h_normalized, bump);
}

ExtensionExtremaReport extension_extrema_check(const AmbientExtension& ext,
                                               const std::vector<Point>& cloud,
                                               double tol_geo) {
  if (cloud.empty()) throw InvalidConfig("empty sample cloud");
  const auto& mesh = ext.mesh();
  const auto& h = ext.values();
  ExtensionExtremaReport rep;
  auto [mn, mx] = std::minmax_element(h.begin(), h.end());
  rep.mesh_max = *mx;
  rep.mesh_min = *mn;
  if (*mx - *mn <= 0.0) {
    rep.degenerate = true;
    return rep;
  }
  const double val_tol = 1e-12 * std::max(std::abs(*mx), std::abs(*mn));
  std::vector<int> maxset, minset;
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (h[v] >= *mx - val_tol) maxset.push_back(static_cast<int>(v));
    if (h[v] <= *mn + val_tol) minset.push_back(static_cast<int>(v));
  }
  auto dist_to = [&](const Point& p, const std::vector<int>& nodes) {
    double best = std::numeric_limits<double>::infinity();
    for (int v : nodes)
      best = std::min(best, distance(mesh.kind, p, mesh.images[v]));
    return best;
  };

  double cmax = -std::numeric_limits<double>::infinity();
  double cmin = std::numeric_limits<double>::infinity();
  Point argmax, argmin;
  double far_max = -std::numeric_limits<double>::infinity();
  double far_min = std::numeric_limits<double>::infinity();
  for (const Point& p : cloud) {
    double val = ext(p);
    if (val > cmax) {
      cmax = val;
      argmax = p;
    }
    if (val < cmin) {
      cmin = val;
      argmin = p;
    }
    if (dist_to(p, maxset) > tol_geo) far_max = std::max(far_max, val);
    if (dist_to(p, minset) > tol_geo) far_min = std::min(far_min, val);
  }
  rep.cloud_max = cmax;
  rep.cloud_min = cmin;
  rep.argmax_near_mesh_maxset = dist_to(argmax, maxset) <= tol_geo;
  rep.argmin_near_mesh_minset = dist_to(argmin, minset) <= tol_geo;
  rep.clearance_max =
      std::isfinite(far_max) ? rep.mesh_max - far_max : rep.mesh_max;
  rep.clearance_min =
      std::isfinite(far_min) ? far_min - rep.mesh_min : -rep.mesh_min;
  return rep;
}

double PathExtension::operator()(double t, const Point& p) const {
  if (slices.empty()) throw InvalidConfig("empty path extension");
  if (t <= tgrid.front()) return slices.front()(p);
  if (t >= tgrid.back()) return slices.back()(p);
  auto it = std::upper_bound(tgrid.begin(), tgrid.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - tgrid.begin());
  std::size_t lo = hi - 1;
  double w = (t - tgrid[lo]) / (tgrid[hi] - tgrid[lo]);
  if (w <= 0.0) return slices[lo](p);
  if (w >= 1.0) return slices[hi](p);
  return (1.0 - w) * slices[lo](p) + w * slices[hi](p);
}

double path_separation(const PathLift& lift) {
  double sep = std::numeric_limits<double>::infinity();
  const int stride = std::max(1, lift.times() / 16);
  for (int ti = 0; ti < lift.times(); ti += stride)
    sep = std::min(sep, mesh_separation(lift.meshes[ti]));
  sep = std::min(sep, mesh_separation(lift.meshes[lift.times() - 1]));
  return sep;
}

PathExtension extend_along_path(const PathLift& lift,
                                const AssociatedFunction& h, double epsilon,
                                double separation_hint) {
  if (lift.kind.backend == Backend::Projective)
    throw UnsupportedBackend("tubular extensions are flat-backend only");
  if (static_cast<int>(h.values.size()) != lift.times())
    throw DimensionMismatch("associated function does not match the lift");

  double sep = separation_hint >= 0.0 ? separation_hint : path_separation(lift);

  double eps = epsilon > 0.0
                   ? epsilon
                   : std::min({0.9, 0.9 * sep, 0.64 * sep * sep});
  if (eps > sep)
    throw InvalidConfig("requested tube support exceeds the path separation");
  BumpProfile bump = make_bump(eps);

  PathExtension out;
  out.tgrid = lift.tgrid;
  out.epsilon = eps;
  out.shifts.resize(lift.times());
  out.slices.reserve(lift.times());
  for (int ti = 0; ti < lift.times(); ++ti) {
    auto norm = normalize_for_extension(h.values[ti], &out.shifts[ti]);
    out.slices.push_back(
        tubular_extension(lift.meshes[ti], norm, bump, sep));
  }
  return out;
}

}  // namespace hoferlab
