#include "hoferlab/crit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hoferlab/errors.hpp"
#include "hoferlab/extend.hpp"
#include "hoferlab/parallel.hpp"

namespace hoferlab {

namespace {

std::vector<double> uniform_grid(int samples) {
  if (samples < 2) throw InvalidConfig("quadrature needs >= 2 samples");
  std::vector<double> g(samples);
  for (int i = 0; i < samples; ++i)
    g[i] = static_cast<double>(i) / (samples - 1);
  return g;
}

double trapz(const std::vector<double>& grid, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    acc += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
  return acc;
}

// C^2 compactly supported radial profile on [0,1).
double bump_shape(double u) {
  double a = 1.0 - u * u;
  return a > 0.0 ? a * a * a : 0.0;
}

double smoothed_square_wave(double t, double phase, double sharpness) {
  return std::tanh(std::sin(2.0 * std::numbers::pi * (t - phase)) / sharpness) /
         std::tanh(1.0 / sharpness);
}

double mesh_diameter_estimate(const PathLift& lift) {
  const auto& mesh = lift.meshes.front();
  double best = 0.0;
  const int N = lift.nodes();
  const int stride = std::max(1, N / 256);
  for (int v = 0; v < N; v += stride)
    best = std::max(best, distance(lift.kind, mesh.images[0], mesh.images[v]));
  return std::max(best, 1e-9);
}

std::string format_short(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

}  // namespace

std::vector<double> default_sgrid() {
  std::vector<double> g(21);
  for (int i = 0; i < 21; ++i) g[i] = -1.0 + i * 0.1;
  g[10] = 0.0;
  return g;
}

double ProbeDirection::time_integral(const Point& p) const {
  std::vector<double> f(quad_grid.size());
  for (std::size_t i = 0; i < quad_grid.size(); ++i) f[i] = eval(quad_grid[i], p);
  return trapz(quad_grid, f);
}

ProbeDirection make_probe_separable(
    const std::function<double(double)>& c,
    const std::function<double(const Point&)>& g, std::string id,
    int quad_samples) {
  ProbeDirection probe;
  probe.quad_grid = uniform_grid(quad_samples);
  std::vector<double> cf(probe.quad_grid.size());
  for (std::size_t i = 0; i < cf.size(); ++i) cf[i] = c(probe.quad_grid[i]);
  double mean = trapz(probe.quad_grid, cf);
  if (std::abs(mean) > 1e-10)
    throw InvalidConfig("time profile has nonzero mean " + std::to_string(mean) +
                        "; not a loop direction");
  probe.family = ProbeDirection::Family::Separable;
  probe.id = std::move(id);
  probe.spec.type = "separable-opaque";
  probe.spec.quad_samples = quad_samples;
  probe.zero_mean_certified = true;
  probe.eval = [c, g](double t, const Point& p) { return c(t) * g(p); };
  return probe;
}

ProbeDirection canonical_probe(const HamiltonianSpec& H, int quad_samples) {
  if (!H.value) throw InvalidConfig("Hamiltonian has no evaluator");
  ProbeDirection probe;
  probe.family = ProbeDirection::Family::Canonical;
  probe.id = "canonical";
  probe.spec.type = "canonical";
  probe.spec.quad_samples = quad_samples;
  probe.quad_grid = uniform_grid(quad_samples);
  probe.zero_mean_certified = true;
  if (H.autonomous) {
    probe.eval = [](double, const Point&) { return 0.0; };
    return probe;
  }
  auto grid = probe.quad_grid;
  auto Hval = H.value;
  probe.eval = [grid, Hval](double t, const Point& p) {
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = Hval(grid[i], p);
    return Hval(t, p) - trapz(grid, f);
  };
  return probe;
}

ProbeDirection extension_canonical_probe(const PathLift& lift,
                                         const AssociatedFunction& h,
                                         double epsilon,
                                         double separation_hint) {
  auto ext = std::make_shared<PathExtension>(
      extend_along_path(lift, h, epsilon, separation_hint));
  // The time mean is taken on a thinned copy of the path grid; the probe's
  // native quadrature matches it, so its pointwise time integral vanishes
  // identically.
  std::vector<double> grid;
  const int T = static_cast<int>(lift.tgrid.size());
  for (int i = 0; i < T; i += 4) grid.push_back(lift.tgrid[i]);
  if (grid.back() != lift.tgrid.back()) grid.push_back(lift.tgrid.back());

  ProbeDirection probe;
  probe.family = ProbeDirection::Family::Custom;
  probe.id = "ext-canonical:e" + format_short(ext->epsilon);
  probe.spec.type = "extension-canonical";
  probe.spec.epsilon = ext->epsilon;
  probe.spec.quad_samples = static_cast<int>(grid.size());
  probe.quad_grid = grid;
  probe.zero_mean_certified = true;
  probe.eval = [ext, grid](double t, const Point& p) {
    double mean = 0.0;
    double prev = (*ext)(grid[0], p);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double cur = (*ext)(grid[i], p);
      mean += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
      prev = cur;
    }
    return (*ext)(t, p) - mean;
  };
  return probe;
}

ProbeDirection tracking_probe(const PathLift& lift, const AssociatedFunction& h,
                              int samples, double radius, double window,
                              double amplitude) {
  if (samples < 2) throw InvalidConfig("tracking probe needs >= 2 samples");
  const int T = lift.times();
  std::vector<int> tidx(samples);
  for (int j = 0; j < samples; ++j)
    tidx[j] = static_cast<int>(std::lround(static_cast<double>(j) * (T - 1) /
                                           (samples - 1)));
  std::vector<Point> cplus, cminus;
  std::vector<double> tj(samples);
  for (int j = 0; j < samples; ++j) {
    const auto& slice = h.values[tidx[j]];
    int amax = static_cast<int>(std::max_element(slice.begin(), slice.end()) -
                                slice.begin());
    int amin = static_cast<int>(std::min_element(slice.begin(), slice.end()) -
                                slice.begin());
    cplus.push_back(lift.meshes[tidx[j]].images[amax]);
    cminus.push_back(lift.meshes[tidx[j]].images[amin]);
    tj[j] = lift.tgrid[tidx[j]];
  }

  if (window <= 0.0) window = 1.2 / (samples - 1);
  if (radius <= 0.0) {
    double hop = 0.0;
    for (int j = 0; j + 1 < samples; ++j) {
      hop = std::max(hop, distance(lift.kind, cplus[j], cplus[j + 1]));
      hop = std::max(hop, distance(lift.kind, cminus[j], cminus[j + 1]));
    }
    double spacing = lift.meshes.front().max_spacing;
    double diam = mesh_diameter_estimate(lift);
    radius = std::min(std::max(3.0 * spacing, 1.5 * hop), 0.6 * diam);
  }
  if (amplitude <= 0.0) {
    amplitude = oscillation(h.values.front());
    if (amplitude <= 0.0) amplitude = 1.0;
  }

  ProbeDirection probe;
  probe.family = ProbeDirection::Family::Custom;
  probe.id = "tracking";
  probe.spec.type = "tracking";
  probe.spec.track_samples = samples;
  probe.spec.track_radius = radius;
  probe.spec.track_window = window;
  probe.spec.amplitude = amplitude;
  probe.spec.quad_samples = 201;
  probe.quad_grid = uniform_grid(201);
  probe.zero_mean_certified = true;

  // Per-window time means on the native grid; subtracting them makes every
  // window integrate to zero exactly under this quadrature.
  std::vector<double> means(samples);
  for (int j = 0; j < samples; ++j) {
    std::vector<double> f(probe.quad_grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      double u = (probe.quad_grid[i] - tj[j]) / window;
      f[i] = bump_shape(std::abs(u));
    }
    means[j] = trapz(probe.quad_grid, f);
  }

  auto kind = lift.kind;
  probe.eval = [kind, cplus, cminus, tj, means, window, radius,
                amplitude](double t, const Point& p) {
    double acc = 0.0;
    for (std::size_t j = 0; j < tj.size(); ++j) {
      double c = bump_shape(std::abs((t - tj[j]) / window)) - means[j];
      if (c == 0.0) continue;
      double gp = bump_shape(distance(kind, p, cplus[j]) / radius);
      double gm = bump_shape(distance(kind, p, cminus[j]) / radius);
      acc += c * (gp - gm);
    }
    return amplitude * acc;
  };
  return probe;
}

ProbeDirection separable_bump_probe(const ManifoldKind& kind, ProbeSpec spec) {
  if (spec.radius <= 0.0) throw InvalidConfig("bump probe needs a radius");
  if (spec.center.empty()) throw InvalidConfig("bump probe needs a center");
  Point center{spec.center};
  std::function<double(double)> c;
  if (spec.profile == "cos") {
    int k = spec.harmonic;
    double phase = spec.phase;
    c = [k, phase](double t) {
      return std::cos(2.0 * std::numbers::pi * k * (t - phase));
    };
  } else if (spec.profile == "sqw") {
    double phase = spec.phase, sharp = spec.sharpness;
    c = [phase, sharp](double t) { return smoothed_square_wave(t, phase, sharp); };
  } else {
    throw InvalidConfig("unknown probe profile: " + spec.profile);
  }
  double amp = spec.amplitude, radius = spec.radius;
  auto g = [kind, center, amp, radius](const Point& p) {
    return amp * bump_shape(distance(kind, p, center) / radius);
  };
  std::string id = "sep:" + spec.profile +
                   (spec.profile == "cos" ? std::to_string(spec.harmonic) : "") +
                   ":p" + format_short(spec.phase) + ":r" +
                   format_short(spec.radius);
  ProbeDirection probe = make_probe_separable(c, g, id, spec.quad_samples);
  spec.type = "separable";
  probe.spec = std::move(spec);
  return probe;
}

ProbeDirection probe_from_spec(const ProbeSpec& spec, const PathLift& lift,
                               const HamiltonianSpec& H,
                               const AssociatedFunction& h) {
  if (spec.type == "canonical") return canonical_probe(H, spec.quad_samples);
  if (spec.type == "extension-canonical")
    return extension_canonical_probe(lift, h, spec.epsilon);
  if (spec.type == "tracking")
    return tracking_probe(lift, h, spec.track_samples, spec.track_radius,
                          spec.track_window, spec.amplitude);
  if (spec.type == "separable") return separable_bump_probe(lift.kind, spec);
  throw InvalidConfig("probe spec of type '" + spec.type +
                      "' cannot be reconstructed");
}

std::vector<ProbeDirection> random_probe_library(const PathLift& lift,
                                                 const AssociatedFunction& h,
                                                 int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double diam = mesh_diameter_estimate(lift);
  double osc0 = oscillation(h.values.front());
  if (osc0 <= 0.0) osc0 = 1.0;
  const int T = lift.times();
  const int N = lift.nodes();

  std::vector<ProbeDirection> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ProbeSpec spec;
    int prof = static_cast<int>(rng() % 4);
    if (prof < 3) {
      spec.profile = "cos";
      spec.harmonic = prof + 1;
    } else {
      spec.profile = "sqw";
      spec.sharpness = 0.15 + 0.2 * unit(rng);
    }
    spec.phase = unit(rng);
    int ti = static_cast<int>(rng() % T);
    const auto& slice = h.values[ti];
    int node;
    switch (rng() % 3) {
      case 0:
        node = static_cast<int>(std::max_element(slice.begin(), slice.end()) -
                                slice.begin());
        break;
      case 1:
        node = static_cast<int>(std::min_element(slice.begin(), slice.end()) -
                                slice.begin());
        break;
      default:
        node = static_cast<int>(rng() % N);
    }
    spec.center = lift.meshes[ti].images[node].coords;
    spec.radius = diam * (0.08 + 0.27 * unit(rng));
    spec.amplitude = osc0 * (0.4 + 0.8 * unit(rng));
    spec.quad_samples = 201;
    ProbeDirection p = separable_bump_probe(lift.kind, spec);
    p.id += ":rnd" + std::to_string(i);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<std::vector<double>> probe_on_lift(const PathLift& lift,
                                               const ProbeDirection& G) {
  std::vector<std::vector<double>> g(lift.times());
  parallel_for(static_cast<std::size_t>(lift.times()), [&](std::size_t ti) {
    g[ti].resize(lift.nodes());
    for (int v = 0; v < lift.nodes(); ++v)
      g[ti][v] = G.eval(lift.tgrid[ti], lift.meshes[ti].images[v]);
  });
  return g;
}

}  // namespace

std::vector<double> probe_length_function(const AssociatedFunction& h,
                                          const PathLift& lift,
                                          const ProbeDirection& G,
                                          const std::vector<double>& sgrid) {
  if (!G.zero_mean_certified)
    throw InvalidConfig("probe is not certified as a loop direction");
  if (static_cast<int>(h.values.size()) != lift.times())
    throw DimensionMismatch("associated function does not match the lift");
  auto g = probe_on_lift(lift, G);
  std::vector<double> u(sgrid.size());
  std::vector<double> osc(lift.times());
  for (std::size_t si = 0; si < sgrid.size(); ++si) {
    const double s = sgrid[si];
    for (int ti = 0; ti < lift.times(); ++ti) {
      double mx = -std::numeric_limits<double>::infinity();
      double mn = std::numeric_limits<double>::infinity();
      const auto& hv = h.values[ti];
      const auto& gv = g[ti];
      for (int v = 0; v < lift.nodes(); ++v) {
        double x = hv[v] - s * gv[v];
        mx = std::max(mx, x);
        mn = std::min(mn, x);
      }
      osc[ti] = mx - mn;
    }
    u[si] = trapz(lift.tgrid, osc);
  }
  return u;
}

ConvexMajorantResult convex_majorant_check(const AssociatedFunction& h,
                                           const PathLift& lift,
                                           const ProbeDirection& G,
                                           const ProbeDirection& K,
                                           const std::vector<double>& sgrid) {
  if (!G.zero_mean_certified || !K.zero_mean_certified)
    throw InvalidConfig("probes must be certified loop directions");
  if (sgrid.empty()) throw InvalidConfig("empty s grid");
  for (double s : sgrid)
    if (std::abs(s) < 1e-12)
      throw InvalidConfig("the s grid must exclude 0");

  auto g = probe_on_lift(lift, G);
  auto k = probe_on_lift(lift, K);

  AssociatedFunction k_on_l;
  k_on_l.values = k;
  ConvexMajorantResult res;
  res.bound = hofer_norm(k_on_l, lift.tgrid);

  std::vector<double> osc_l(lift.times()), osc_u(lift.times());
  for (double s : sgrid) {
    for (int ti = 0; ti < lift.times(); ++ti) {
      double mxl = -std::numeric_limits<double>::infinity();
      double mnl = std::numeric_limits<double>::infinity();
      double mxu = -std::numeric_limits<double>::infinity();
      double mnu = std::numeric_limits<double>::infinity();
      for (int v = 0; v < lift.nodes(); ++v) {
        double base = h.values[ti][v] - s * g[ti][v];
        double full = base - s * s * k[ti][v];
        mxl = std::max(mxl, full);
        mnl = std::min(mnl, full);
        mxu = std::max(mxu, base);
        mnu = std::min(mnu, base);
      }
      osc_l[ti] = mxl - mnl;
      osc_u[ti] = mxu - mnu;
    }
    double l = trapz(lift.tgrid, osc_l);
    double u = trapz(lift.tgrid, osc_u);
    res.sup_ratio = std::max(res.sup_ratio, std::abs(l - u) / (s * s));
  }
  return res;
}

Tolerances derive_tolerances(const PathLift& lift, const AssociatedFunction& h) {
  double h_norm = hofer_norm(h, lift.tgrid);
  double spacing = 0.0;
  for (const auto& m : lift.meshes) spacing = std::max(spacing, m.max_spacing);
  Tolerances t;
  t.tol_val = 1e-3 * h_norm;
  t.tol_geo = 2.0 * spacing;
  t.tol_probe = 1e-3 * h_norm;
  t.tol_track = 1e-6 * h_norm;
  return t;
}

std::pair<std::vector<int>, std::vector<int>> extrema_sets(
    const std::vector<double>& slice, double tol_val) {
  if (slice.empty()) throw InvalidConfig("empty slice");
  auto [mn, mx] = std::minmax_element(slice.begin(), slice.end());
  std::vector<int> maxset, minset;
  for (std::size_t v = 0; v < slice.size(); ++v) {
    if (slice[v] >= *mx - tol_val) maxset.push_back(static_cast<int>(v));
    if (slice[v] <= *mn + tol_val) minset.push_back(static_cast<int>(v));
  }
  return {std::move(maxset), std::move(minset)};
}

ExtremaTrack extrema_track(const PathLift& lift, const AssociatedFunction& h,
                           double tol_val) {
  ExtremaTrack track;
  track.tol_val = tol_val;
  track.maxset.resize(lift.times());
  track.minset.resize(lift.times());
  track.maxset_points.resize(lift.times());
  track.minset_points.resize(lift.times());
  for (int ti = 0; ti < lift.times(); ++ti) {
    auto [mxs, mns] = extrema_sets(h.values[ti], tol_val);
    for (int v : mxs) track.maxset_points[ti].push_back(lift.meshes[ti].images[v]);
    for (int v : mns) track.minset_points[ti].push_back(lift.meshes[ti].images[v]);
    track.maxset[ti] = std::move(mxs);
    track.minset[ti] = std::move(mns);
  }
  return track;
}

namespace {

// Contiguous per-time copies of the node coordinates; the argmin node under
// the squared chart metric (or the arg-max inner product on the projective
// backend) is the exact nearest node, so only one full-precision distance
// evaluation is needed per query.
class NearestNodeIndex {
 public:
  explicit NearestNodeIndex(const PathLift& lift) : lift_(lift) {
    dim_ = lift.kind.point_dim();
    flat_.resize(lift.times());
    for (int ti = 0; ti < lift.times(); ++ti) {
      flat_[ti].resize(static_cast<std::size_t>(lift.nodes()) * dim_);
      for (int v = 0; v < lift.nodes(); ++v)
        for (int i = 0; i < dim_; ++i)
          flat_[ti][v * dim_ + i] = lift.meshes[ti].images[v].coords[i];
    }
  }

  double distance_to_mesh(int ti, const Point& p) const {
    const double* data = flat_[ti].data();
    const int N = lift_.nodes();
    int best = 0;
    if (lift_.kind.backend == Backend::Projective) {
      double best_ip2 = -1.0;
      for (int v = 0; v < N; ++v) {
        const double* q = data + v * dim_;
        double re = 0.0, im = 0.0;
        for (int j = 0; j < dim_; j += 2) {
          // conj(q_j) * p_j
          re += q[j] * p.coords[j] + q[j + 1] * p.coords[j + 1];
          im += q[j] * p.coords[j + 1] - q[j + 1] * p.coords[j];
        }
        double ip2 = re * re + im * im;
        if (ip2 > best_ip2) {
          best_ip2 = ip2;
          best = v;
        }
      }
    } else {
      const bool torus = lift_.kind.backend == Backend::Torus;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int v = 0; v < N; ++v) {
        const double* q = data + v * dim_;
        double d2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
          double d = p.coords[i] - q[i];
          if (torus) d = wrap_half(d);
          d2 += d * d;
        }
        if (d2 < best_d2) {
          best_d2 = d2;
          best = v;
        }
      }
    }
    return distance(lift_.kind, p, lift_.meshes[ti].images[best]);
  }

 private:
  const PathLift& lift_;
  int dim_ = 0;
  std::vector<std::vector<double>> flat_;
};

std::vector<CandidateInfo> persistent_side(const PathLift& lift,
                                           const NearestNodeIndex& index,
                                           const HamiltonianSpec& H,
                                           const AssociatedFunction& h,
                                           const std::vector<int>& seeds,
                                           bool maximum, double tol_val,
                                           double tol_geo) {
  std::vector<double> extremum(lift.times());
  for (int ti = 0; ti < lift.times(); ++ti) {
    const auto& s = h.values[ti];
    extremum[ti] = maximum ? *std::max_element(s.begin(), s.end())
                           : *std::min_element(s.begin(), s.end());
  }
  std::vector<CandidateInfo> kept(seeds.size());
  std::vector<char> ok(seeds.size(), 0);
  parallel_for(seeds.size(), [&](std::size_t si) {
    const int node = seeds[si];
    CandidateInfo info;
    info.node = node;
    info.p = lift.meshes.front().images[node];
    info.per_time_dist.resize(lift.times());
    for (int ti = 0; ti < lift.times(); ++ti) {
      double d = index.distance_to_mesh(ti, info.p);
      info.per_time_dist[ti] = d;
      if (d > tol_geo) return;
      double val = H.value(lift.tgrid[ti], info.p);
      double gap = maximum ? extremum[ti] - val : val - extremum[ti];
      if (gap > tol_val) return;
      info.drift_geo = std::max(info.drift_geo, d);
      info.drift_val = std::max(info.drift_val, gap);
    }
    kept[si] = std::move(info);
    ok[si] = 1;
  });
  std::vector<CandidateInfo> out;
  for (std::size_t si = 0; si < seeds.size(); ++si)
    if (ok[si]) out.push_back(std::move(kept[si]));
  std::sort(out.begin(), out.end(), [](const CandidateInfo& a,
                                       const CandidateInfo& b) {
    if (a.drift_geo != b.drift_geo) return a.drift_geo < b.drift_geo;
    return a.node < b.node;
  });
  return out;
}

}  // namespace

PersistentExtrema persistent_extrema(const PathLift& lift,
                                     const HamiltonianSpec& H, double tol_val,
                                     double tol_geo) {
  if (!H.value) throw InvalidConfig("Hamiltonian has no evaluator");
  AssociatedFunction h = associated_function_from_H(lift, H);
  auto [maxseed, minseed] = extrema_sets(h.values.front(), tol_val);
  NearestNodeIndex index(lift);
  PersistentExtrema pe;
  pe.plus = persistent_side(lift, index, H, h, maxseed, true, tol_val, tol_geo);
  pe.minus =
      persistent_side(lift, index, H, h, minseed, false, tol_val, tol_geo);
  return pe;
}

DescentResult descent_search(const PathLift& lift, const HamiltonianSpec& H,
                             const AssociatedFunction& h, int budget,
                             std::uint64_t seed, std::vector<double> sgrid) {
  if (budget < 1) throw InvalidConfig("probe budget must be >= 1");
  if (sgrid.empty()) sgrid = default_sgrid();

  std::vector<ProbeDirection> library;
  library.push_back(canonical_probe(H));
  if (lift.kind.backend != Backend::Projective) {
    try {
      double sep = path_separation(lift);
      double eps0 = std::min({0.9, 0.9 * sep, 0.64 * sep * sep});
      double spacing = 0.0;
      for (const auto& m : lift.meshes) spacing = std::max(spacing, m.max_spacing);
      // Two tube scales: wide tubes average the extension over long dwell
      // times, narrow tubes sharpen the localization around the moving
      // extrema. The narrow scale stays above the mesh resolution.
      double eps1 = std::min(eps0, std::max(eps0 / 128.0, 9.0 * spacing * spacing));
      library.push_back(extension_canonical_probe(lift, h, eps0, sep));
      if (eps1 < 0.5 * eps0)
        library.push_back(extension_canonical_probe(lift, h, eps1, sep));
    } catch (const std::exception&) {
      // No valid tube (e.g. self-touching mesh); skip this direction.
    }
  }
  try {
    library.push_back(tracking_probe(lift, h));
  } catch (const std::exception&) {
  }

  const double diam = mesh_diameter_estimate(lift);
  double osc0 = oscillation(h.values.front());
  if (osc0 <= 0.0) osc0 = 1.0;
  for (double tc : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    int ti = static_cast<int>(std::lround(tc * (lift.times() - 1)));
    const auto& slice = h.values[ti];
    int amax = static_cast<int>(std::max_element(slice.begin(), slice.end()) -
                                slice.begin());
    int amin = static_cast<int>(std::min_element(slice.begin(), slice.end()) -
                                slice.begin());
    for (int node : {amax, amin}) {
      for (const char* prof : {"cos", "sqw"}) {
        for (double rfac : {0.12, 0.3}) {
          ProbeSpec spec;
          spec.profile = prof;
          spec.harmonic = 1;
          spec.phase = tc;  // profile peak follows the chosen center time
          spec.center = lift.meshes[ti].images[node].coords;
          spec.radius = rfac * diam;
          spec.amplitude = osc0;
          library.push_back(separable_bump_probe(lift.kind, spec));
        }
      }
    }
  }
  if (static_cast<int>(library.size()) < budget) {
    auto rnd = random_probe_library(lift, h, budget - static_cast<int>(library.size()),
                                    seed);
    for (auto& p : rnd) library.push_back(std::move(p));
  }
  if (static_cast<int>(library.size()) > budget) library.resize(budget);

  const double u0 = hofer_norm(h, lift.tgrid);
  DescentResult res;
  res.u0 = u0;
  res.all.resize(library.size());
  parallel_for(library.size(), [&](std::size_t i) {
    auto u = probe_length_function(h, lift, library[i], sgrid);
    std::size_t best = 0;
    for (std::size_t si = 1; si < u.size(); ++si)
      if (u[si] < u[best]) best = si;
    ProbeResult r;
    r.id = library[i].id;
    r.spec = library[i].spec;
    if (u[best] < u0) {
      r.s_star = sgrid[best];
      r.decrease = u0 - u[best];
    }
    res.all[i] = std::move(r);
  });

  std::size_t besti = 0;
  for (std::size_t i = 1; i < res.all.size(); ++i)
    if (res.all[i].decrease > res.all[besti].decrease) besti = i;
  res.best = res.all[besti];
  return res;
}

CriticalityReport quasi_autonomy_verdict(const PathLift& lift,
                                         const HamiltonianSpec& H,
                                         const VerdictConfig& cfg) {
  ConsistencyCheck gate = generator_consistency(lift, H);
  if (!gate.consistent())
    throw ConsistencyFailure("verdict refused: lift and Hamiltonian disagree");

  AssociatedFunction h = associated_function_from_H(lift, H);
  CriticalityReport rep;
  rep.h_norm = hofer_norm(h, lift.tgrid);
  Tolerances tols = cfg.tols;
  if (tols.tol_val == 0.0 && tols.tol_geo == 0.0 && tols.tol_probe == 0.0)
    tols = derive_tolerances(lift, h);
  rep.tols = tols;

  rep.min_osc = std::numeric_limits<double>::infinity();
  for (const auto& slice : h.values)
    rep.min_osc = std::min(rep.min_osc, oscillation(slice));

  rep.track = extrema_track(lift, h, tols.tol_track);

  const double regularity_floor = std::max(1e-12, 1e-6 * rep.h_norm);
  if (rep.min_osc <= regularity_floor) {
    rep.verdict = "inconclusive";
    rep.reason = "non-regular path: the oscillation vanishes at some time";
    return rep;
  }

  PersistentExtrema pe = persistent_extrema(lift, H, tols.tol_val, tols.tol_geo);
  rep.p_plus = pe.plus;
  rep.p_minus = pe.minus;

  DescentResult descent =
      descent_search(lift, H, h, cfg.probe_budget, cfg.seed, cfg.sgrid);
  rep.probes = descent.all;

  if (descent.best.decrease > tols.tol_probe) {
    rep.verdict = "non-critical";
    rep.reason = "a probe shortens the path";
    rep.has_certificate = true;
    rep.certificate = descent.best;
    rep.certificate_u0 = descent.u0;
    return rep;
  }
  if (!rep.p_plus.empty() && !rep.p_minus.empty()) {
    rep.verdict = "critical";
    rep.reason = "persistent extremal points on both sides; no probe descends";
    return rep;
  }
  PersistentExtrema wide =
      persistent_extrema(lift, H, 2.0 * tols.tol_val, 2.0 * tols.tol_geo);
  if (!wide.plus.empty() && !wide.minus.empty()) {
    rep.verdict = "inconclusive";
    rep.reason = "candidates straddle the working tolerances";
    return rep;
  }
  rep.verdict = "non-critical";
  rep.reason = rep.p_plus.empty() && rep.p_minus.empty()
                   ? "no persistent extremal points"
                   : (rep.p_plus.empty() ? "no persistent maximum point"
                                         : "no persistent minimum point");
  return rep;
}

std::string criticality_csv(const CriticalityReport& report,
                            const LengthBreakdown& length) {
  std::string out = "t,max,min,dist_plus,dist_minus\n";
  char buf[200];
  for (std::size_t ti = 0; ti < length.t.size(); ++ti) {
    double dp = std::numeric_limits<double>::quiet_NaN();
    double dm = std::numeric_limits<double>::quiet_NaN();
    if (!report.p_plus.empty() &&
        ti < report.p_plus.front().per_time_dist.size())
      dp = report.p_plus.front().per_time_dist[ti];
    if (!report.p_minus.empty() &&
        ti < report.p_minus.front().per_time_dist.size())
      dm = report.p_minus.front().per_time_dist[ti];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  length.t[ti], length.max_h[ti], length.min_h[ti], dp, dm);
    out += buf;
  }
  return out;
}

}  // namespace hoferlab
