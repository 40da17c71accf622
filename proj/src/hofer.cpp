#include "hoferlab/hofer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hoferlab/errors.hpp"

namespace hoferlab {

double oscillation(std::span<const double> slice) {
  if (slice.empty()) throw InvalidConfig("oscillation of an empty slice");
  auto [mn, mx] = std::minmax_element(slice.begin(), slice.end());
  return *mx - *mn;
}

double hofer_norm(const AssociatedFunction& h, const std::vector<double>& tgrid) {
  if (h.values.size() != tgrid.size())
    throw DimensionMismatch("associated function and time grid disagree");
  if (tgrid.empty()) throw InvalidConfig("empty time grid");
  std::vector<double> osc(tgrid.size());
  for (std::size_t i = 0; i < tgrid.size(); ++i) osc[i] = oscillation(h.values[i]);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < tgrid.size(); ++i)
    total += 0.5 * (osc[i] + osc[i + 1]) * (tgrid[i + 1] - tgrid[i]);
  return total;
}

ConsistencyCheck generator_consistency(const PathLift& lift,
                                   const HamiltonianSpec& H) {
  AssociatedFunction h = associated_function_from_H(lift, H);
  double dev = 0.0;
  double grad_scale = 0.0;   // edge-gradient magnitude of the claimed h
  double alpha_scale = 0.0;  // magnitude of the observed one-form
  double spacing = 0.0;
  double dt_max = 0.0;
  for (std::size_t i = 0; i + 1 < lift.tgrid.size(); ++i)
    dt_max = std::max(dt_max, lift.tgrid[i + 1] - lift.tgrid[i]);

  for (int ti = 0; ti < lift.times(); ++ti) {
    const auto& mesh = lift.meshes[ti];
    spacing = std::max(spacing, mesh.max_spacing);
    OneFormSamples alpha = velocity_one_form(lift, ti);
    const double scale = std::max(mesh.max_spacing, 1e-300);
    for (int v = 0; v < lift.nodes(); ++v) {
      for (int d = 0; d < alpha.dirs; ++d) {
        const auto& st = lift.grid->stencils[v][d];
        double dh;
        if (st.has_prev && st.has_next)
          dh = 0.5 * (h.values[ti][st.next] - h.values[ti][st.prev]);
        else if (st.has_next)
          dh = h.values[ti][st.next] - h.values[ti][v];
        else if (st.has_prev)
          dh = h.values[ti][v] - h.values[ti][st.prev];
        else
          continue;
        dev = std::max(dev, std::abs(alpha.alpha[v][d] - dh) / scale);
        grad_scale = std::max(grad_scale, std::abs(dh) / scale);
        alpha_scale = std::max(alpha_scale, std::abs(alpha.alpha[v][d]) / scale);
      }
    }
  }
  ConsistencyCheck out;
  // Deviation relative to the larger of the two gradient scales, so a
  // Hamiltonian claimed for somebody else's path cannot hide behind its own
  // magnitude. A frozen path under a locally constant H is consistent at
  // deviation zero.
  out.deviation = dev / std::max({grad_scale, alpha_scale, 1e-12});
  out.threshold = 1.5 * (dt_max + spacing);
  return out;
}

namespace {

// Parabola through (-1, hm), (0, h0), (1, hp): distance from the sampled
// extremum to the fitted vertex value.
double vertex_excess(double hm, double h0, double hp, bool maximum) {
  double b = 0.5 * (hp - hm);
  double c = 0.5 * (hp + hm) - h0;
  if (maximum ? (c >= -1e-300) : (c <= 1e-300)) return 0.0;
  double excess = -b * b / (4.0 * c);
  return maximum ? std::max(excess, 0.0) : std::max(-excess, 0.0);
}

double slice_resolution_error(const PathLift& lift,
                              const std::vector<double>& slice) {
  auto bar = [&](int v, bool maximum) {
    double worst = 0.0;
    for (int d = 0; d < lift.grid->dirs; ++d) {
      const auto& st = lift.grid->stencils[v][d];
      if (!st.has_prev || !st.has_next) continue;
      worst = std::max(
          worst, vertex_excess(slice[st.prev], slice[v], slice[st.next], maximum));
    }
    return worst;
  };
  int argmax = static_cast<int>(
      std::max_element(slice.begin(), slice.end()) - slice.begin());
  int argmin = static_cast<int>(
      std::min_element(slice.begin(), slice.end()) - slice.begin());
  return bar(argmax, true) + bar(argmin, false);
}

}  // namespace

LengthBreakdown hofer_length(const PathLift& lift, const HamiltonianSpec& H) {
  ConsistencyCheck gate = generator_consistency(lift, H);
  if (!gate.consistent())
    throw ConsistencyFailure(
        "lift and Hamiltonian disagree: one-form deviation " +
        std::to_string(gate.deviation) + " exceeds " +
        std::to_string(gate.threshold));

  AssociatedFunction h = associated_function_from_H(lift, H);
  LengthBreakdown b;
  b.t = lift.tgrid;
  b.max_h.resize(lift.times());
  b.min_h.resize(lift.times());
  b.osc.resize(lift.times());
  std::vector<double> err(lift.times());
  for (int ti = 0; ti < lift.times(); ++ti) {
    const auto& slice = h.values[ti];
    auto [mn, mx] = std::minmax_element(slice.begin(), slice.end());
    b.max_h[ti] = *mx;
    b.min_h[ti] = *mn;
    b.osc[ti] = *mx - *mn;
    err[ti] = slice_resolution_error(lift, slice);
  }
  for (std::size_t i = 0; i + 1 < b.t.size(); ++i) {
    double dt = b.t[i + 1] - b.t[i];
    b.total += 0.5 * (b.osc[i] + b.osc[i + 1]) * dt;
    b.resolution_error += 0.5 * (err[i] + err[i + 1]) * dt;
  }
  return b;
}

std::string to_csv(const LengthBreakdown& b) {
  std::string out = "t,max,min,osc\n";
  char buf[160];
  for (std::size_t i = 0; i < b.t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", b.t[i],
                  b.max_h[i], b.min_h[i], b.osc[i]);
    out += buf;
  }
  return out;
}

}  // namespace hoferlab
