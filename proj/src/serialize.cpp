#include "hoferlab/serialize.hpp"

#include "hoferlab/errors.hpp"

namespace hoferlab {

using nlohmann::json;

namespace {

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Euclidean: return "euclidean";
    case Backend::Torus: return "torus";
    case Backend::Projective: return "projective";
  }
  return "unknown";
}

Backend backend_from_name(const std::string& s) {
  if (s == "euclidean") return Backend::Euclidean;
  if (s == "torus") return Backend::Torus;
  if (s == "projective") return Backend::Projective;
  throw InvalidConfig("unknown backend: " + s);
}

json grid_to_json(const ModelGrid& g) {
  json j;
  if (g.model == ModelGrid::Model::Circle) {
    j["type"] = "circle";
    j["m"] = g.m;
  } else {
    j["type"] = "sphere2";
    j["m_theta"] = g.m_theta;
    j["m_phi"] = g.m_phi;
    j["antipodal"] = g.antipodal;
  }
  j["offset"] = g.offset;
  return j;
}

GridPtr grid_from_json(const json& j) {
  std::string type = j.at("type").get<std::string>();
  double offset = j.value("offset", 0.0);
  if (type == "circle") return circle_grid(j.at("m").get<int>(), offset);
  if (type == "sphere2")
    return sphere2_grid(j.at("m_theta").get<int>(), j.at("m_phi").get<int>(),
                        j.value("antipodal", false), offset);
  throw InvalidConfig("unknown grid model: " + type);
}

json kind_to_json(const ManifoldKind& k) {
  return {{"backend", backend_name(k.backend)}, {"n", k.n}};
}

ManifoldKind kind_from_json(const json& j) {
  return {backend_from_name(j.at("backend").get<std::string>()),
          j.at("n").get<int>()};
}

}  // namespace

json lift_to_json(const PathLift& lift) {
  json j;
  j["kind"] = kind_to_json(lift.kind);
  j["model"] = grid_to_json(*lift.grid);
  j["tgrid"] = lift.tgrid;
  json nodes = json::array();
  for (int v = 0; v < lift.nodes(); ++v) {
    if (lift.grid->dirs == 1)
      nodes.push_back({lift.grid->params[v][0]});
    else
      nodes.push_back({lift.grid->params[v][0], lift.grid->params[v][1]});
  }
  j["nodes"] = std::move(nodes);
  json images = json::array();
  for (const auto& mesh : lift.meshes) {
    json slice = json::array();
    for (const auto& p : mesh.images) slice.push_back(p.coords);
    images.push_back(std::move(slice));
  }
  j["images"] = std::move(images);
  return j;
}

PathLift lift_from_json(const json& j, double tol_lag_rel) {
  ManifoldKind kind = kind_from_json(j.at("kind"));
  GridPtr grid = grid_from_json(j.at("model"));
  std::vector<double> tgrid = j.at("tgrid").get<std::vector<double>>();
  std::vector<std::vector<Point>> images;
  for (const auto& slice : j.at("images")) {
    std::vector<Point> pts;
    pts.reserve(slice.size());
    for (const auto& c : slice)
      pts.push_back(Point{c.get<std::vector<double>>()});
    images.push_back(std::move(pts));
  }
  return make_lift(kind, grid, std::move(tgrid), std::move(images), tol_lag_rel);
}

json mesh_to_json(const LagrangianMesh& mesh) {
  PathLift lift;
  lift.kind = mesh.kind;
  lift.grid = mesh.grid;
  lift.tgrid = {0.0};
  lift.meshes = {mesh};
  return lift_to_json(lift);
}

LagrangianMesh mesh_from_json(const json& j, double tol_lag_rel) {
  PathLift lift = lift_from_json(j, tol_lag_rel);
  if (lift.meshes.size() != 1)
    throw InvalidConfig("expected a single-time mesh document");
  return lift.meshes.front();
}

json breakdown_to_json(const LengthBreakdown& b) {
  return {{"total", b.total},
          {"quadrature", b.quadrature},
          {"resolution_error", b.resolution_error},
          {"t", b.t},
          {"max", b.max_h},
          {"min", b.min_h},
          {"osc", b.osc}};
}

json probe_spec_to_json(const ProbeSpec& spec) {
  json j;
  j["type"] = spec.type;
  j["quad_samples"] = spec.quad_samples;
  if (spec.type == "separable") {
    j["profile"] = spec.profile;
    j["harmonic"] = spec.harmonic;
    j["phase"] = spec.phase;
    j["sharpness"] = spec.sharpness;
    j["center"] = spec.center;
    j["radius"] = spec.radius;
    j["amplitude"] = spec.amplitude;
  } else if (spec.type == "extension-canonical") {
    j["epsilon"] = spec.epsilon;
  } else if (spec.type == "tracking") {
    j["track_samples"] = spec.track_samples;
    j["track_radius"] = spec.track_radius;
    j["track_window"] = spec.track_window;
    j["amplitude"] = spec.amplitude;
  }
  return j;
}

ProbeSpec probe_spec_from_json(const json& j) {
  ProbeSpec spec;
  spec.type = j.at("type").get<std::string>();
  spec.quad_samples = j.value("quad_samples", 201);
  spec.profile = j.value("profile", "");
  spec.harmonic = j.value("harmonic", 1);
  spec.phase = j.value("phase", 0.0);
  spec.sharpness = j.value("sharpness", 0.25);
  spec.center = j.value("center", std::vector<double>{});
  spec.radius = j.value("radius", 0.0);
  spec.amplitude = j.value("amplitude", 1.0);
  spec.epsilon = j.value("epsilon", 0.0);
  spec.track_samples = j.value("track_samples", 0);
  spec.track_radius = j.value("track_radius", 0.0);
  spec.track_window = j.value("track_window", 0.0);
  return spec;
}

json criticality_to_json(const CriticalityReport& rep) {
  json j;
  j["verdict"] = rep.verdict;
  j["reason"] = rep.reason;
  j["h_norm"] = rep.h_norm;
  j["min_osc"] = rep.min_osc;
  auto points = [](const std::vector<CandidateInfo>& cs) {
    json arr = json::array();
    for (const auto& c : cs) arr.push_back(c.p.coords);
    return arr;
  };
  j["p_plus"] = points(rep.p_plus);
  j["p_minus"] = points(rep.p_minus);
  auto drifts = [](const std::vector<CandidateInfo>& cs) {
    json geo = json::array(), val = json::array();
    for (const auto& c : cs) {
      geo.push_back(c.drift_geo);
      val.push_back(c.drift_val);
    }
    return json{{"geo", geo}, {"val", val}};
  };
  j["drift"] = {{"plus", drifts(rep.p_plus)}, {"minus", drifts(rep.p_minus)}};
  json probes = json::array();
  for (const auto& p : rep.probes)
    probes.push_back(
        {{"id", p.id}, {"s_star", p.s_star}, {"decrease", p.decrease}});
  j["probes"] = std::move(probes);
  j["tolerances"] = {{"tol_val", rep.tols.tol_val},
                     {"tol_geo", rep.tols.tol_geo},
                     {"tol_probe", rep.tols.tol_probe},
                     {"tol_track", rep.tols.tol_track}};
  if (rep.has_certificate) {
    j["certificate"] = {{"id", rep.certificate.id},
                        {"s_star", rep.certificate.s_star},
                        {"decrease", rep.certificate.decrease},
                        {"u0", rep.certificate_u0},
                        {"probe", probe_spec_to_json(rep.certificate.spec)}};
  }
  // t = 0 extrema node sets plus per-time set sizes keep the track compact.
  json track;
  track["tol_val"] = rep.track.tol_val;
  if (!rep.track.maxset.empty()) {
    track["maxset_t0"] = rep.track.maxset.front();
    track["minset_t0"] = rep.track.minset.front();
    json szmax = json::array(), szmin = json::array();
    for (const auto& s : rep.track.maxset) szmax.push_back(s.size());
    for (const auto& s : rep.track.minset) szmin.push_back(s.size());
    track["maxset_sizes"] = std::move(szmax);
    track["minset_sizes"] = std::move(szmin);
  }
  j["track"] = std::move(track);
  return j;
}

}  // namespace hoferlab
