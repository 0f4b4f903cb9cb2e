#pragma once

#include <nlohmann/json.hpp>

#include "frontlab/coefficients.hpp"

namespace frontlab::coefficients {

// JSON layout
//
//   spec: {"kind": "constant", "value": v}
//         {"kind": "cosine", "mean": m, "amplitude": a, "phase": p,
//          "harmonics": [{"amplitude": a, "multiple": k, "phase": p}, ...]}
//         {"kind": "piecewise_constant", "breakpoints": [...], "values": [...]}
//         {"kind": "table", "samples": [...]}
//         every spec may also carry "period"; a bare number means a constant.
//   set:  {"period": L, "sigma": spec, "r_u": spec, ..., "mu_v": spec}
//
// Unknown keys are rejected with ValidationError.

nlohmann::json to_json(const CoefficientSpec& spec);
CoefficientSpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CoefficientSet& set);
CoefficientSet set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HomogenizedSet& h);

}  // namespace frontlab::coefficients
