#pragma once

#include <string>

#include "wk4/filtration.hpp"
#include "wk4/iep.hpp"
#include "wk4/tiling.hpp"

#include <json.hpp>

namespace wk4 {

// Model format: {"worlds": n, "rel": [[i,j],...], "val": {"p":[0,2],...},
// "root": i?}. Parsing validates ranges; variables are sorted into the
// signature.
nlohmann::json model_to_json(const Model& m, std::optional<int> root = {});
Model model_from_json(const nlohmann::json& j);
std::optional<int> root_from_json(const nlohmann::json& j);

nlohmann::json relation_to_json(const Relation& r);
Relation relation_from_json(const nlohmann::json& j);

nlohmann::json witness_to_json(const WitnessPair& w);
WitnessPair witness_from_json(const nlohmann::json& j);

nlohmann::json tiling_to_json(const TilingInstance& inst);
TilingInstance tiling_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const TilingInstance& inst, const TorusSolution& s);

nlohmann::json sat_verdict_to_json(const SatVerdict& v);
nlohmann::json validity_to_json(const ValidityVerdict& v);
nlohmann::json iep_verdict_to_json(const IepVerdict& v);

}  // namespace wk4
