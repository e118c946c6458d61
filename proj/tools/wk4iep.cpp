#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wk4/fuzz.hpp"
#include "wk4/json_io.hpp"

using namespace wk4;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Formula read_formula(const std::string& path) { return parse(read_input(path)); }

json read_json(const std::string& path) {
  return json::parse(read_input(path));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void emit(const json& j, const std::string& out_path) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

Logic parse_logic(const std::string& s) {
  if (s == "wk4") return Logic::WK4;
  if (s == "dl") return Logic::DL;
  throw CLI::ValidationError("--logic", "expected wk4 or dl");
}

int default_workers() {
  if (const char* env = std::getenv("WK4IEP_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision toolkit for interpolant existence in wK4 and difference logic"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("--out", out_path, "write the JSON result to a file instead of stdout")
      ->capture_default_str();

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse a formula and echo its canonical form");
  std::string parse_file;
  bool parse_full = false;
  cmd_parse->add_option("--formula", parse_file, "formula file, or - for stdin")->required();
  cmd_parse->add_flag("--parenthesized", parse_full, "fully parenthesized output");

  // sat
  auto* cmd_sat = app.add_subcommand("sat", "bounded satisfiability search");
  std::string sat_logic = "wk4", sat_file, sat_model_out, sat_dot_out;
  int sat_bound = 4;
  cmd_sat->add_option("--logic", sat_logic, "wk4 or dl")->capture_default_str();
  cmd_sat->add_option("--bound", sat_bound, "world bound (wk4; dl uses B_DL)")
      ->capture_default_str();
  cmd_sat->add_option("--formula", sat_file, "formula file, or - for stdin")->required();
  cmd_sat->add_option("--emit-model", sat_model_out, "write the witness model JSON here");
  cmd_sat->add_option("--emit-dot", sat_dot_out, "write the witness model DOT here");

  // valid
  auto* cmd_valid = app.add_subcommand("valid", "bounded validity of phi -> psi");
  std::string valid_logic = "wk4", valid_phi, valid_psi;
  int valid_bound = 4;
  cmd_valid->add_option("--logic", valid_logic, "wk4 or dl")->capture_default_str();
  cmd_valid->add_option("--bound", valid_bound, "countermodel bound (wk4)")
      ->capture_default_str();
  cmd_valid->add_option("--phi", valid_phi, "antecedent file")->required();
  cmd_valid->add_option("--psi", valid_psi, "consequent file")->required();

  // bisim
  auto* cmd_bisim = app.add_subcommand("bisim", "verify or compute rho-bisimulations");
  std::string bisim_left, bisim_right, bisim_rho, bisim_rel;
  cmd_bisim->add_option("--left", bisim_left, "left model JSON")->required();
  cmd_bisim->add_option("--right", bisim_right, "right model JSON")->required();
  cmd_bisim->add_option("--rho", bisim_rho, "comma-separated shared variables");
  cmd_bisim->add_option("--relation", bisim_rel,
                        "relation JSON to verify (otherwise the maximal one is computed)");

  // iep
  auto* cmd_iep = app.add_subcommand("iep", "interpolant existence decision");
  std::string iep_logic = "wk4", iep_phi, iep_psi, iep_witness_out, iep_dot_out;
  std::string iep_find, iep_verify_only;
  int iep_bound = 3;
  cmd_iep->add_option("--logic", iep_logic, "wk4 or dl")->capture_default_str();
  cmd_iep->add_option("--bound", iep_bound, "per-model world bound (wk4)")
      ->capture_default_str();
  cmd_iep->add_option("--phi", iep_phi, "antecedent file")->required();
  cmd_iep->add_option("--psi", iep_psi, "consequent file")->required();
  cmd_iep->add_option("--emit-witness", iep_witness_out, "write the witness JSON here");
  cmd_iep->add_option("--emit-dot", iep_dot_out, "write the witness DOT here");
  cmd_iep->add_option("--find-interpolant", iep_find,
                      "depth,size budget for the constructive cross-check");
  cmd_iep->add_option("--verify-only", iep_verify_only,
                      "verify a witness JSON instead of searching");

  // filtrate
  auto* cmd_filt = app.add_subcommand("filtrate", "rebuild a model through the mosaic quotient");
  std::string filt_phi, filt_psi, filt_model, filt_designate = "0,0", filt_dot_out;
  bool filt_report = false;
  cmd_filt->add_option("--phi", filt_phi, "phi file")->required();
  cmd_filt->add_option("--psi", filt_psi, "psi file")->required();
  cmd_filt->add_option("--model", filt_model, "input model JSON")->required();
  cmd_filt->add_option("--designate", filt_designate, "designated worlds i,j")
      ->capture_default_str();
  cmd_filt->add_flag("--report", filt_report, "include size accounting");
  cmd_filt->add_option("--emit-dot", filt_dot_out, "write the rebuilt model DOT here");

  // tiling
  auto* cmd_tiling = app.add_subcommand("tiling", "torus tiling reduction");
  std::string tiling_mode, tiling_file, tiling_prefix;
  int tiling_bound = 2;
  cmd_tiling->add_option("mode", tiling_mode, "gen | solve | witness | roundtrip")
      ->required();
  cmd_tiling->add_option("--instance", tiling_file, "instance JSON")->required();
  cmd_tiling->add_option("--out-prefix", tiling_prefix,
                         "write <prefix>_phi.mf / <prefix>_psi.mf / <prefix>_witness.json");
  cmd_tiling->add_option("--bound", tiling_bound,
                         "search bound for the unsolvable branch of roundtrip")
      ->capture_default_str();

  // fuzz
  auto* cmd_fuzz = app.add_subcommand("fuzz", "randomized property suites");
  FuzzOptions fuzz_opt;
  fuzz_opt.workers = default_workers();
  cmd_fuzz->add_option("--module", fuzz_opt.module,
                       "formula | kripke | bisim | satsearch | filtration")
      ->capture_default_str();
  cmd_fuzz->add_option("--seeds", fuzz_opt.iterations, "number of scenarios")
      ->capture_default_str();
  cmd_fuzz->add_option("--seed", fuzz_opt.seed, "base RNG seed")->capture_default_str();
  cmd_fuzz->add_option("--max-worlds", fuzz_opt.max_worlds, "model size limit")
      ->capture_default_str();
  cmd_fuzz->add_option("--max-vars", fuzz_opt.max_vars, "variable pool size")
      ->capture_default_str();
  cmd_fuzz->add_option("--max-depth", fuzz_opt.max_depth, "formula depth limit")
      ->capture_default_str();
  cmd_fuzz->add_option("--workers", fuzz_opt.workers, "parallel seed chunks")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_parse) {
      Formula f = read_formula(parse_file);
      json j;
      j["formula"] = parse_full ? f.to_string_parenthesized() : f.to_string();
      j["signature"] = signature_of(f);
      j["size"] = f.size();
      j["modal_depth"] = f.modal_depth();
      emit(j, out_path);
      return 0;
    }
    if (*cmd_sat) {
      Formula f = read_formula(sat_file);
      SatVerdict v = parse_logic(sat_logic) == Logic::DL ? sat_dl(f)
                                                         : sat_wk4(f, sat_bound);
      emit(sat_verdict_to_json(v), out_path);
      if (v.witness && !sat_model_out.empty())
        write_file(sat_model_out,
                   model_to_json(v.witness->model, v.witness->root).dump(2) + "\n");
      if (v.witness && !sat_dot_out.empty())
        write_file(sat_dot_out, to_dot(v.witness->model));
      std::cerr << "sat: " << sat_verdict_to_json(v)["status"].get<std::string>()
                << " after " << v.stats.models << " models\n";
      return 0;
    }
    if (*cmd_valid) {
      ValidityVerdict v = is_valid(read_formula(valid_phi), read_formula(valid_psi),
                                   parse_logic(valid_logic), valid_bound);
      emit(validity_to_json(v), out_path);
      return 0;
    }
    if (*cmd_bisim) {
      Model m1 = model_from_json(read_json(bisim_left));
      Model m2 = model_from_json(read_json(bisim_right));
      Signature rho;
      if (!bisim_rho.empty()) {
        std::stringstream ss(bisim_rho);
        std::string item;
        while (std::getline(ss, item, ',')) rho.push_back(item);
        rho = make_signature(rho);
      }
      json j;
      if (!bisim_rel.empty()) {
        Relation r = relation_from_json(read_json(bisim_rel));
        BisimRelation rel = BisimRelation::from_pairs(m1.worlds(), m2.worlds(), r);
        j["verified"] = verify_bisimulation(m1, m2, rho, rel);
      } else {
        BisimRelation rel = maximal_bisimulation(m1, m2, rho);
        j["maximal"] = relation_to_json(rel.pairs());
        auto r1 = root_from_json(read_json(bisim_left));
        auto r2 = root_from_json(read_json(bisim_right));
        if (r1 && r2) j["roots_bisimilar"] = rel.contains(*r1, *r2);
      }
      emit(j, out_path);
      return 0;
    }
    if (*cmd_iep) {
      Formula phi = read_formula(iep_phi);
      Formula psi = read_formula(iep_psi);
      Logic logic = parse_logic(iep_logic);
      if (!iep_verify_only.empty()) {
        WitnessPair w = witness_from_json(read_json(iep_verify_only));
        WitnessCheck c = check_witness(w, phi, psi, logic);
        json j{{"verified", c.ok}};
        if (!c.ok) j["reason"] = c.reason;
        emit(j, out_path);
        return c.ok ? 0 : 1;
      }
      IepVerdict v = logic == Logic::DL ? decide_iep_dl(phi, psi)
                                        : decide_iep_wk4(phi, psi, iep_bound);
      json j = iep_verdict_to_json(v);
      if (!iep_find.empty() && v.status != IepVerdict::Status::NotValid) {
        int depth = 2, size = 5;
        if (sscanf(iep_find.c_str(), "%d,%d", &depth, &size) != 2)
          throw std::runtime_error("--find-interpolant expects depth,size");
        auto iota = enumerate_interpolants(phi, psi, logic, depth, size,
                                           std::max(iep_bound, 4));
        if (iota) j["interpolant"] = iota->to_string();
      }
      emit(j, out_path);
      if (v.witness) {
        if (!iep_witness_out.empty())
          write_file(iep_witness_out, witness_to_json(*v.witness).dump(2) + "\n");
        if (!iep_dot_out.empty()) {
          write_file(iep_dot_out, to_dot(v.witness->phi_side.model) +
                                      to_dot(v.witness->psi_side.model));
        }
      }
      std::cerr << "iep: " << j["status"].get<std::string>() << " after "
                << v.stats.models << " models\n";
      switch (v.status) {
        case IepVerdict::Status::HasInterpolantCertified:
        case IepVerdict::Status::HasInterpolantUpToBound: return 0;
        case IepVerdict::Status::NoInterpolant: return 1;
        case IepVerdict::Status::NotValid: return 2;
      }
      return kExitInternal;
    }
    if (*cmd_filt) {
      Formula phi = read_formula(filt_phi);
      Formula psi = read_formula(filt_psi);
      Model m = model_from_json(read_json(filt_model));
      int di = 0, dj = 0;
      if (sscanf(filt_designate.c_str(), "%d,%d", &di, &dj) != 2)
        throw std::runtime_error("--designate expects i,j");
      FiltrationResult res = filtrate(m, phi, psi, di, dj);
      json j;
      j["model"] = model_to_json(res.model);
      j["world_map"] = res.world_map;
      j["beta"] = relation_to_json(res.beta);
      j["designated"] = json::array({res.designated_phi, res.designated_psi});
      if (filt_report) {
        j["report"] = {{"classes", res.report.classes},
                       {"cluster_types", res.report.cluster_types},
                       {"mosaics", res.report.mosaics},
                       {"quadruples", res.report.quadruples},
                       {"within_bounds", res.report.within_bounds}};
      }
      emit(j, out_path);
      if (!filt_dot_out.empty()) write_file(filt_dot_out, to_dot(res.model, res.beta));
      return 0;
    }
    if (*cmd_tiling) {
      TilingInstance inst = tiling_from_json(read_json(tiling_file));
      json j;
      if (tiling_mode == "gen") {
        auto [phi, psi] = generate_formulas(inst);
        j["phi"] = phi.to_string();
        j["psi"] = psi.to_string();
        j["shared_signature"] = shared_signature(phi, psi);
        if (!tiling_prefix.empty()) {
          write_file(tiling_prefix + "_phi.mf", phi.to_string() + "\n");
          write_file(tiling_prefix + "_psi.mf", psi.to_string() + "\n");
        }
      } else if (tiling_mode == "solve") {
        auto sol = solve_tiling(inst);
        j["solvable"] = sol.has_value();
        if (sol) j["solution"] = solution_to_json(inst, *sol);
      } else if (tiling_mode == "witness") {
        auto sol = solve_tiling(inst);
        if (!sol) throw std::runtime_error("instance is unsolvable; no witness");
        WitnessPair w = build_witness_from_solution(inst, *sol);
        auto [phi, psi] = generate_formulas(inst);
        j["witness"] = witness_to_json(w);
        j["verified"] = verify_witness(w, phi, psi, Logic::WK4);
        if (!tiling_prefix.empty())
          write_file(tiling_prefix + "_witness.json",
                     witness_to_json(w).dump(2) + "\n");
      } else if (tiling_mode == "roundtrip") {
        j["roundtrip"] = roundtrip_check(inst, tiling_bound);
        j["bound"] = tiling_bound;
      } else {
        throw CLI::ValidationError("mode", "expected gen|solve|witness|roundtrip");
      }
      emit(j, out_path);
      return 0;
    }
    if (*cmd_fuzz) {
      FuzzReport rep = run_fuzz(fuzz_opt);
      json j;
      j["module"] = fuzz_opt.module;
      j["iterations"] = rep.iterations;
      j["violations"] = rep.violations;
      j["messages"] = rep.messages;
      j["seconds"] = rep.seconds;
      emit(j, out_path);
      std::cerr << "fuzz " << fuzz_opt.module << ": " << rep.violations
                << " violations in " << rep.iterations << " runs\n";
      return rep.violations == 0 ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const InvariantError& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
