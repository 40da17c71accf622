#pragma once

#include <json.hpp>

#include "hoferlab/crit.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/mesh.hpp"

namespace hoferlab {

// Lift wire format: {kind, model, tgrid, nodes, images}. Coordinates are
// plain JSON numbers emitted in shortest round-trip decimal form, so
// serialize/parse is exact. A single mesh is a one-time lift with tgrid [0].
nlohmann::json lift_to_json(const PathLift& lift);
PathLift lift_from_json(const nlohmann::json& j, double tol_lag_rel = 1e-4);

nlohmann::json mesh_to_json(const LagrangianMesh& mesh);
LagrangianMesh mesh_from_json(const nlohmann::json& j,
                              double tol_lag_rel = 1e-4);

nlohmann::json breakdown_to_json(const LengthBreakdown& b);

nlohmann::json probe_spec_to_json(const ProbeSpec& spec);
ProbeSpec probe_spec_from_json(const nlohmann::json& j);

nlohmann::json criticality_to_json(const CriticalityReport& rep);

}  // namespace hoferlab
