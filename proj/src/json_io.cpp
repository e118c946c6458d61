#include "wk4/json_io.hpp"

namespace wk4 {

using nlohmann::json;

json model_to_json(const Model& m, std::optional<int> root) {
  json j;
  j["worlds"] = m.worlds();
  json rel = json::array();
  for (int x = 0; x < m.worlds(); ++x)
    m.frame().successors(x).for_each(
        [&](int y) { rel.push_back(json::array({x, y})); });
  j["rel"] = std::move(rel);
  json val = json::object();
  for (size_t v = 0; v < m.signature().size(); ++v)
    val[m.signature()[v]] = m.valuation((int)v).to_indices();
  j["val"] = std::move(val);
  if (root) j["root"] = *root;
  return j;
}

Model model_from_json(const json& j) {
  require(j.contains("worlds") && j["worlds"].is_number_integer(),
          "model json: missing integer 'worlds'");
  int n = j["worlds"].get<int>();
  require(n >= 0, "model json: negative world count");
  std::vector<std::string> vars;
  if (j.contains("val"))
    for (auto& [k, v] : j["val"].items()) vars.push_back(k);
  Model m(Frame(n), make_signature(vars));
  if (j.contains("rel"))
    for (auto& e : j["rel"]) {
      require(e.is_array() && e.size() == 2, "model json: malformed edge");
      int x = e[0].get<int>(), y = e[1].get<int>();
      require(x >= 0 && x < n && y >= 0 && y < n, "model json: edge out of range");
      m.frame().add_edge(x, y);
    }
  if (j.contains("val"))
    for (auto& [k, v] : j["val"].items())
      for (auto& w : v) {
        int x = w.get<int>();
        require(x >= 0 && x < n, "model json: valuation world out of range");
        m.set(k, x);
      }
  return m;
}

std::optional<int> root_from_json(const json& j) {
  if (!j.contains("root")) return std::nullopt;
  return j["root"].get<int>();
}

json relation_to_json(const Relation& r) {
  json out = json::array();
  for (auto& [a, b] : r) out.push_back(json::array({a, b}));
  return out;
}

Relation relation_from_json(const json& j) {
  Relation r;
  for (auto& e : j) {
    require(e.is_array() && e.size() == 2, "relation json: malformed pair");
    r.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return r;
}

json witness_to_json(const WitnessPair& w) {
  json j;
  j["phi_model"] = model_to_json(w.phi_side.model, w.phi_side.root);
  j["psi_model"] = model_to_json(w.psi_side.model, w.psi_side.root);
  j["rho"] = w.rho;
  if (w.beta) j["beta"] = relation_to_json(*w.beta);
  return j;
}

WitnessPair witness_from_json(const json& j) {
  WitnessPair w;
  require(j.contains("phi_model") && j.contains("psi_model"),
          "witness json: missing models");
  w.phi_side.model = model_from_json(j["phi_model"]);
  w.phi_side.root = root_from_json(j["phi_model"]).value_or(0);
  w.psi_side.model = model_from_json(j["psi_model"]);
  w.psi_side.root = root_from_json(j["psi_model"]).value_or(0);
  if (j.contains("rho")) w.rho = make_signature(j["rho"].get<std::vector<std::string>>());
  if (j.contains("beta")) w.beta = relation_from_json(j["beta"]);
  return w;
}

json tiling_to_json(const TilingInstance& inst) {
  json j;
  j["tiles"] = inst.tiles;
  json h = json::array(), v = json::array();
  for (auto& [a, b] : inst.h)
    h.push_back(json::array({inst.tiles[a], inst.tiles[b]}));
  for (auto& [a, b] : inst.v)
    v.push_back(json::array({inst.tiles[a], inst.tiles[b]}));
  j["h"] = std::move(h);
  j["v"] = std::move(v);
  json init = json::array();
  for (int t : inst.init) init.push_back(inst.tiles[t]);
  j["init"] = std::move(init);
  j["n"] = inst.n;
  return j;
}

TilingInstance tiling_from_json(const json& j) {
  TilingInstance inst;
  require(j.contains("tiles") && j.contains("n"), "tiling json: missing fields");
  inst.tiles = j["tiles"].get<std::vector<std::string>>();
  inst.n = j["n"].get<int>();
  auto tile_index = [&](const std::string& name) {
    for (size_t i = 0; i < inst.tiles.size(); ++i)
      if (inst.tiles[i] == name) return (int)i;
    throw InvariantError("tiling json: unknown tile " + name);
  };
  if (j.contains("h"))
    for (auto& e : j["h"])
      inst.h.push_back({tile_index(e[0].get<std::string>()),
                        tile_index(e[1].get<std::string>())});
  if (j.contains("v"))
    for (auto& e : j["v"])
      inst.v.push_back({tile_index(e[0].get<std::string>()),
                        tile_index(e[1].get<std::string>())});
  if (j.contains("init"))
    for (auto& e : j["init"]) inst.init.push_back(tile_index(e.get<std::string>()));
  inst.validate();
  return inst;
}

json solution_to_json(const TilingInstance& inst, const TorusSolution& s) {
  json rows = json::array();
  for (int j2 = 0; j2 < s.side(); ++j2) {
    json row = json::array();
    for (int i = 0; i < s.side(); ++i) row.push_back(inst.tiles[s.at(i, j2)]);
    rows.push_back(std::move(row));
  }
  return json{{"n", s.n}, {"rows", rows}};
}

json sat_verdict_to_json(const SatVerdict& v) {
  json j;
  switch (v.status) {
    case SatVerdict::Status::Satisfiable: j["status"] = "satisfiable"; break;
    case SatVerdict::Status::UnsatUpTo: j["status"] = "unsat_up_to"; break;
    case SatVerdict::Status::UnsatCertified: j["status"] = "unsat_certified"; break;
  }
  j["bound"] = v.bound;
  j["stats"] = {{"models", v.stats.models}, {"seconds", v.stats.seconds}};
  if (v.witness) j["witness"] = model_to_json(v.witness->model, v.witness->root);
  return j;
}

json validity_to_json(const ValidityVerdict& v) {
  json j;
  j["valid"] = v.valid;
  j["certified"] = v.certified;
  j["stats"] = {{"models", v.stats.models}, {"seconds", v.stats.seconds}};
  if (v.counter) j["countermodel"] = model_to_json(v.counter->model, v.counter->root);
  return j;
}

json iep_verdict_to_json(const IepVerdict& v) {
  json j;
  switch (v.status) {
    case IepVerdict::Status::NotValid: j["status"] = "not_valid"; break;
    case IepVerdict::Status::NoInterpolant: j["status"] = "no_interpolant"; break;
    case IepVerdict::Status::HasInterpolantCertified:
      j["status"] = "has_interpolant_certified";
      break;
    case IepVerdict::Status::HasInterpolantUpToBound:
      j["status"] = "has_interpolant_up_to_bound";
      j["bound"] = v.bound;
      break;
  }
  j["stats"] = {{"models", v.stats.models}, {"seconds", v.stats.seconds}};
  if (v.counter) j["countermodel"] = model_to_json(v.counter->model, v.counter->root);
  if (v.witness) j["witness"] = witness_to_json(*v.witness);
  return j;
}

}  // namespace wk4
