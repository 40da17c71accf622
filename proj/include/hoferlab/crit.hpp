#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hoferlab/flow.hpp"
#include "hoferlab/geom.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

// ---------------------------------------------------------------------------
// Probe directions: tangent vectors of loop families. Every probe G carries a
// pointwise-zero time integral on its native quadrature grid, the membership
// condition for the tangent space at the identity of the Hamiltonian loop
// space.
// ---------------------------------------------------------------------------

// Reconstructible probe description, enough to rebuild the evaluator from a
// report given the scenario's lift/Hamiltonian/associated function.
struct ProbeSpec {
  std::string type;  // canonical | separable | extension-canonical | tracking
  // separable
  std::string profile;  // cos | sqw
  int harmonic = 1;
  double phase = 0.0;
  double sharpness = 0.25;
  std::vector<double> center;
  double radius = 0.0;
  double amplitude = 1.0;
  // extension-canonical
  double epsilon = 0.0;
  // tracking
  int track_samples = 0;
  double track_radius = 0.0;
  double track_window = 0.0;
  int quad_samples = 201;
};

struct ProbeDirection {
  enum class Family { Canonical, Separable, Custom };
  Family family = Family::Custom;
  std::string id;
  ProbeSpec spec;
  bool zero_mean_certified = false;
  std::vector<double> quad_grid;
  std::function<double(double, const Point&)> eval;

  double operator()(double t, const Point& p) const { return eval(t, p); }
  // Trapezoid time integral on the probe's native grid; certified probes
  // evaluate to ~0 at every ambient point.
  double time_integral(const Point& p) const;
};

// G(t,p) = c(t) g(p); rejects profiles whose quadrature mean exceeds 1e-10.
ProbeDirection make_probe_separable(
    const std::function<double(double)>& c,
    const std::function<double(const Point&)>& g, std::string id = "separable",
    int quad_samples = 201);

// G(t,y) = H(t,y) - integral of H(., y); identically zero for autonomous H.
ProbeDirection canonical_probe(const HamiltonianSpec& H, int quad_samples = 201);

// Canonical probe of the extrema-preserving tubular extension of h along the
// lift (flat backends only). This is the workhorse descent direction when
// the extremal points of h move. The time mean uses a thinned copy of the
// path grid as its native quadrature.
ProbeDirection extension_canonical_probe(const PathLift& lift,
                                         const AssociatedFunction& h,
                                         double epsilon = -1.0,
                                         double separation_hint = -1.0);

// Sum of localized windows following the per-time argmax/argmin images:
// positive bumps chasing the maximum, negative ones the minimum, each time
// window recentered to zero mean.
ProbeDirection tracking_probe(const PathLift& lift, const AssociatedFunction& h,
                              int samples = 9, double radius = -1.0,
                              double window = -1.0, double amplitude = -1.0);

// Parametrized separable bump probe (profile "cos" or "sqw").
ProbeDirection separable_bump_probe(const ManifoldKind& kind, ProbeSpec spec);

// Rebuilds any reported probe from its spec.
ProbeDirection probe_from_spec(const ProbeSpec& spec, const PathLift& lift,
                               const HamiltonianSpec& H,
                               const AssociatedFunction& h);

// Seeded separable probes with bump centers on extremal trajectories and
// random nodes.
std::vector<ProbeDirection> random_probe_library(const PathLift& lift,
                                                 const AssociatedFunction& h,
                                                 int count, std::uint64_t seed);

// u(s) = |h - s G o iota|: Hofer norm of the first-order variation model.
// Convex in s with u(0) = |h|.
std::vector<double> probe_length_function(const AssociatedFunction& h,
                                          const PathLift& lift,
                                          const ProbeDirection& G,
                                          const std::vector<double>& sgrid);

// For the curve F(s) = sG + s^2 K compares l(s) = |h - F(s) o iota| with the
// convex model u(s); sup_s |l - u| / s^2 is bounded by |K o iota|.
struct ConvexMajorantResult {
  double sup_ratio = 0.0;
  double bound = 0.0;  // Hofer norm of K o iota
};
ConvexMajorantResult convex_majorant_check(const AssociatedFunction& h,
                                           const PathLift& lift,
                                           const ProbeDirection& G,
                                           const ProbeDirection& K,
                                           const std::vector<double>& sgrid);

// ---------------------------------------------------------------------------
// Extrema tracking and the quasi-autonomy verdict
// ---------------------------------------------------------------------------

struct Tolerances {
  double tol_val = 0.0;    // persistence value margin (1e-3 x mean oscillation)
  double tol_geo = 0.0;    // ambient distance margin (2 x max mesh spacing)
  double tol_probe = 0.0;  // length decrease threshold (1e-3 x |h|)
  double tol_track = 0.0;  // extrema attainment margin for reported node sets
};
Tolerances derive_tolerances(const PathLift& lift, const AssociatedFunction& h);

// Nodes whose value is within tol_val of the slice max (resp. min).
std::pair<std::vector<int>, std::vector<int>> extrema_sets(
    const std::vector<double>& slice, double tol_val);

struct ExtremaTrack {
  double tol_val = 0.0;
  std::vector<std::vector<int>> maxset, minset;          // per time
  std::vector<std::vector<Point>> maxset_points, minset_points;
};
ExtremaTrack extrema_track(const PathLift& lift, const AssociatedFunction& h,
                           double tol_val);

struct CandidateInfo {
  Point p;
  int node = -1;          // t=0 node the candidate came from
  double drift_geo = 0.0; // max over time of distance to the nearest node
  double drift_val = 0.0; // max over time of the extremal value gap
  std::vector<double> per_time_dist;
};

struct PersistentExtrema {
  std::vector<CandidateInfo> plus, minus;  // sorted by drift_geo, best first
};

// Ambient points from the t=0 extrema sets that stay geometrically on the
// path (distance to L_t <= tol_geo) and extremal in value (within tol_val)
// for every time sample.
PersistentExtrema persistent_extrema(const PathLift& lift,
                                     const HamiltonianSpec& H, double tol_val,
                                     double tol_geo);

struct ProbeResult {
  std::string id;
  double s_star = 0.0;
  double decrease = 0.0;
  ProbeSpec spec;
};

struct DescentResult {
  ProbeResult best;
  double u0 = 0.0;
  std::vector<ProbeResult> all;
};

// Evaluates u(s) for the probe library (canonical probe, the tubular
// extension's canonical probe on flat backends, tracking windows, separable
// bumps at extremal trajectories, seeded random probes) and returns the
// largest achieved decrease u(0) - u(s*).
DescentResult descent_search(const PathLift& lift, const HamiltonianSpec& H,
                             const AssociatedFunction& h, int budget,
                             std::uint64_t seed,
                             std::vector<double> sgrid = {});

struct CriticalityReport {
  std::string verdict;  // critical | non-critical | inconclusive
  std::string reason;
  Tolerances tols;
  double h_norm = 0.0;
  double min_osc = 0.0;
  ExtremaTrack track;  // at tol_track
  std::vector<CandidateInfo> p_plus, p_minus;
  std::vector<ProbeResult> probes;
  bool has_certificate = false;
  ProbeResult certificate;
  double certificate_u0 = 0.0;
};

struct VerdictConfig {
  int probe_budget = 200;
  std::uint64_t seed = 1;
  std::vector<double> sgrid = {};   // defaults to 21 points in [-1,1]
  Tolerances tols = {};             // derived from the data when zero
};

// critical: persistent extremal points on both sides and no budgeted probe
// shortens the path beyond tol_probe. non-critical: a descent certificate, or
// candidate absence. inconclusive: non-regular paths and candidates that
// straddle the tolerances.
CriticalityReport quasi_autonomy_verdict(const PathLift& lift,
                                         const HamiltonianSpec& H,
                                         const VerdictConfig& cfg = {});

// Plot data: t, max h_t, min h_t, distance of the best persistent candidates
// to the time-t mesh.
std::string criticality_csv(const CriticalityReport& report,
                            const LengthBreakdown& length);

std::vector<double> default_sgrid();

}  // namespace hoferlab
