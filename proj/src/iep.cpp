#include "wk4/iep.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace wk4 {

WitnessCheck check_witness(const WitnessPair& w, const Formula& phi,
                           const Formula& psi, Logic logic) {
  WitnessCheck c;
  auto fail = [&](const std::string& r) {
    c.ok = false;
    c.reason = r;
    return c;
  };
  const Model& mp = w.phi_side.model;
  const Model& mq = w.psi_side.model;
  if (w.phi_side.root < 0 || w.phi_side.root >= mp.worlds() ||
      w.psi_side.root < 0 || w.psi_side.root >= mq.worlds())
    return fail("root out of range");
  if (!is_weakly_transitive(mp.frame())) return fail("phi-side frame not weakly transitive");
  if (!is_weakly_transitive(mq.frame())) return fail("psi-side frame not weakly transitive");
  if (logic == Logic::DL) {
    if (!is_symmetric(mp.frame())) return fail("phi-side frame not symmetric");
    if (!is_symmetric(mq.frame())) return fail("psi-side frame not symmetric");
  }
  if (!is_rooted_at(mp.frame(), w.phi_side.root)) return fail("phi-side not rooted");
  if (!is_rooted_at(mq.frame(), w.psi_side.root)) return fail("psi-side not rooted");
  if (!signature_subset(signature_of(phi), mp.signature()))
    return fail("phi-side signature does not cover sig(phi)");
  if (!signature_subset(signature_of(psi), mq.signature()))
    return fail("psi-side signature does not cover sig(psi)");
  if (!signature_subset(w.rho, mp.signature()) ||
      !signature_subset(w.rho, mq.signature()))
    return fail("rho outside model signatures");
  if (w.rho != shared_signature(phi, psi)) return fail("rho is not sig(phi) n sig(psi)");
  if (!model_check(mp, w.phi_side.root, phi)) return fail("phi fails at phi-side root");
  if (!model_check(mq, w.psi_side.root, Formula::nnot(psi)))
    return fail("~psi fails at psi-side root");
  if (w.beta) {
    BisimRelation rel =
        BisimRelation::from_pairs(mp.worlds(), mq.worlds(), *w.beta);
    if (!rel.contains(w.phi_side.root, w.psi_side.root))
      return fail("explicit relation does not relate the roots");
    if (!verify_bisimulation(mp, mq, w.rho, rel))
      return fail("explicit relation is not a rho-bisimulation");
  } else if (!bisimilar(w.phi_side, w.psi_side, w.rho)) {
    return fail("roots are not rho-bisimilar");
  }
  c.ok = true;
  return c;
}

bool verify_witness(const WitnessPair& w, const Formula& phi, const Formula& psi,
                    Logic logic) {
  return check_witness(w, phi, psi, logic).ok;
}

int b_iep(const Formula& phi, const Formula& psi) {
  SubClosure cl(phi, psi);
  int sp = cl.phi_member_count(), sq = cl.psi_member_count();
  return (2 * sp + 1) + (2 * sq + 1) + 2 * (2 * sp + 2 * sq + 2);
}

namespace {

struct SideCandidates {
  // canonical rho-quotient key -> first candidate with that key
  std::map<std::string, Model> first_by_key;
  std::vector<std::pair<std::string, Model>> in_order;  // scan side only
  uint64_t visited = 0;
};

// Enumerate rooted models over the formula's own signature whose root
// satisfies `goal`. Variables of sigma outside this signature influence
// neither goal truth nor rho-bisimilarity (rho is contained in both
// sides' signatures), so searching the reduced space is complete.
SideCandidates collect_side(const Formula& goal, const Signature& rho, int max_worlds,
                            bool dl, bool keep_order) {
  SideCandidates out;
  EnumOptions opt;
  opt.sig = signature_of(goal);
  opt.min_worlds = 1;
  opt.max_worlds = max_worlds;
  opt.cap = 2;
  opt.single_cluster = dl;
  std::tie(opt.root_must_true, opt.root_must_false) =
      root_literal_masks(goal, opt.sig);
  std::tie(opt.nonroot_must_true, opt.nonroot_must_false) =
      successor_literal_masks(goal, opt.sig);
  CompiledFormula cf(goal, opt.sig);
  EnumStats es = enumerate_rooted_models(opt, [&](const EnumModel& em) {
    if (!cf.holds_at_root(em)) return true;
    Model m = em.to_model();
    std::string key = canonical_pointed_key(m, 0, rho);
    if (keep_order)
      out.in_order.push_back({key, m});
    else
      out.first_by_key.emplace(std::move(key), std::move(m));
    return true;
  });
  out.visited = es.visited;
  return out;
}

IepVerdict decide_iep(const Formula& phi, const Formula& psi, Logic logic,
                      int bound) {
  auto t0 = std::chrono::steady_clock::now();
  IepVerdict v;
  ValidityVerdict val = is_valid(phi, psi, logic, bound);
  v.stats.models += val.stats.models;
  if (!val.valid) {
    v.status = IepVerdict::Status::NotValid;
    v.counter = val.counter;
    v.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
  }
  Signature rho = shared_signature(phi, psi);
  bool dl = logic == Logic::DL;
  int side_bound = bound;
  if (dl) {
    // the reduced enumeration holds one point per valuation at most
    int vals_phi = 1 << signature_of(phi).size();
    int vals_psi = 1 << signature_of(psi).size();
    side_bound = std::min(b_iep(phi, psi), std::max(vals_phi, vals_psi));
  }
  Formula notpsi = Formula::nnot(psi);
  SideCandidates psi_side = collect_side(notpsi, rho, side_bound, dl, false);
  v.stats.models += psi_side.visited;
  SideCandidates phi_side = collect_side(phi, rho, side_bound, dl, true);
  v.stats.models += phi_side.visited;

  for (auto& [key, mp] : phi_side.in_order) {
    auto it = psi_side.first_by_key.find(key);
    if (it == psi_side.first_by_key.end()) continue;
    Signature sigma = signature_union(signature_of(phi), signature_of(psi));
    WitnessPair w;
    w.phi_side = {mp.with_signature(sigma), 0};
    w.psi_side = {it->second.with_signature(sigma), 0};
    w.rho = rho;
    w.beta = maximal_bisimulation(w.phi_side.model, w.psi_side.model, rho).pairs();
    require(verify_witness(w, phi, psi, logic),
            "internal: matched witness pair failed verification");
    v.status = IepVerdict::Status::NoInterpolant;
    v.witness = std::move(w);
    v.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
  }
  v.status = dl ? IepVerdict::Status::HasInterpolantCertified
                : IepVerdict::Status::HasInterpolantUpToBound;
  v.bound = dl ? side_bound : bound;
  v.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

}  // namespace

IepVerdict decide_iep_dl(const Formula& phi, const Formula& psi) {
  return decide_iep(phi, psi, Logic::DL, 0);
}

IepVerdict decide_iep_wk4(const Formula& phi, const Formula& psi, int bound) {
  require(bound >= 1, "decide_iep_wk4: bound must be at least 1");
  return decide_iep(phi, psi, Logic::WK4, bound);
}

namespace {

// Restriction of a pointed model to a sorted world subset.
PointedModel restrict_model(const Model& m, const std::vector<int>& keep, int root,
                            std::vector<int>& old_to_new) {
  old_to_new.assign(m.worlds(), -1);
  for (size_t i = 0; i < keep.size(); ++i) old_to_new[keep[i]] = (int)i;
  Frame fr((int)keep.size());
  for (size_t i = 0; i < keep.size(); ++i)
    m.frame().successors(keep[i]).for_each([&](int y) {
      if (old_to_new[y] >= 0) fr.add_edge((int)i, old_to_new[y]);
    });
  Model out(fr, m.signature());
  for (size_t v = 0; v < m.signature().size(); ++v)
    for (size_t i = 0; i < keep.size(); ++i)
      if (m.holds((int)v, keep[i])) out.valuation((int)v).set((int)i);
  return {std::move(out), old_to_new[root]};
}

void pick_upto_two(const BitVec& candidates, std::set<int>& into) {
  int taken = 0;
  for (int i = 0; i < candidates.size() && taken < 2; ++i)
    if (candidates.get(i)) {
      into.insert(i);
      ++taken;
    }
}

}  // namespace

WitnessPair shrink_dl_witness(const WitnessPair& w, const Formula& phi,
                              const Formula& psi) {
  require(verify_witness(w, phi, psi, Logic::DL),
          "shrink_dl_witness: input fails verification");
  const Model& mp = w.phi_side.model;
  const Model& mq = w.psi_side.model;
  SubClosure cl(phi, psi);

  // Stage 1: two satisfying points per satisfiable member of sub(phi)
  // in the phi-side model (both polarities), same for psi; keep roots.
  std::set<int> keep_p{w.phi_side.root}, keep_q{w.psi_side.root};
  EvalCache cache_p, cache_q;
  for (int i = 0; i < cl.rep_count(); ++i) {
    if (cl.rep_in_phi(i)) {
      const BitVec& pos = eval_worlds(mp, cl.rep(i), cache_p);
      pick_upto_two(pos, keep_p);
      pick_upto_two(pos.complement(), keep_p);
    }
    if (cl.rep_in_psi(i)) {
      const BitVec& pos = eval_worlds(mq, cl.rep(i), cache_q);
      pick_upto_two(pos, keep_q);
      pick_upto_two(pos.complement(), keep_q);
    }
  }

  // Stage 2: rho-types of the selected points, as bisimilarity classes
  // of the disjoint union; two realizers per type per model.
  Model u = disjoint_union(mp, mq);
  std::vector<int> cls = rho_classes(u, w.rho);
  int off = mp.worlds();
  std::set<int> shared_types;
  for (int x : keep_p) shared_types.insert(cls[x]);
  for (int x : keep_q) shared_types.insert(cls[off + x]);
  for (int t : shared_types) {
    int got_p = 0, got_q = 0;
    for (int x = 0; x < mp.worlds() && got_p < 2; ++x)
      if (cls[x] == t) {
        keep_p.insert(x);
        ++got_p;
      }
    for (int x = 0; x < mq.worlds() && got_q < 2; ++x)
      if (cls[off + x] == t) {
        keep_q.insert(x);
        ++got_q;
      }
    require(got_p > 0 && got_q > 0,
            "shrink_dl_witness: shared rho-type unrealized on one side");
  }

  std::vector<int> kp(keep_p.begin(), keep_p.end()), kq(keep_q.begin(), keep_q.end());
  std::vector<int> map_p, map_q;
  WitnessPair out;
  out.phi_side = restrict_model(mp, kp, w.phi_side.root, map_p);
  out.psi_side = restrict_model(mq, kq, w.psi_side.root, map_q);
  out.rho = w.rho;
  if (w.beta) {
    Relation r;
    for (auto& [a, b] : *w.beta)
      if (map_p[a] >= 0 && map_q[b] >= 0) r.push_back({map_p[a], map_q[b]});
    out.beta = std::move(r);
  } else {
    out.beta =
        maximal_bisimulation(out.phi_side.model, out.psi_side.model, w.rho).pairs();
  }
  int bound = b_iep(phi, psi);
  require((int)kp.size() <= bound && (int)kq.size() <= bound,
          "shrink_dl_witness: output exceeds B_IEP");
  require(verify_witness(out, phi, psi, Logic::DL),
          "shrink_dl_witness: output fails verification");
  return out;
}

namespace {

// Canonical rho-formula enumeration: all ASTs of exactly `size` nodes
// over {false,true} u rho with modal depth <= max_depth, sorted by
// canonical print.
const std::vector<Formula>& formulas_of_size(const Signature& rho, int size,
                                             int max_depth,
                                             std::map<int, std::vector<Formula>>& cache) {
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  std::vector<Formula> out;
  if (size == 1) {
    out.push_back(Formula::ff());
    out.push_back(Formula::tt());
    for (const auto& v : rho) out.push_back(Formula::var(v));
  } else {
    for (const Formula& g : formulas_of_size(rho, size - 1, max_depth, cache)) {
      out.push_back(Formula::nnot(g));
      if (g.modal_depth() + 1 <= max_depth) out.push_back(Formula::diamond(g));
    }
    for (int ls = 1; ls <= size - 2; ++ls) {
      const auto& lhs = formulas_of_size(rho, ls, max_depth, cache);
      const auto& rhs = formulas_of_size(rho, size - 1 - ls, max_depth, cache);
      for (const Formula& a : lhs)
        for (const Formula& b : rhs) out.push_back(Formula::aand(a, b));
    }
  }
  std::sort(out.begin(), out.end(), [](const Formula& a, const Formula& b) {
    return a.to_string() < b.to_string();
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Formula& a, const Formula& b) { return a == b; }),
            out.end());
  return cache.emplace(size, std::move(out)).first->second;
}

}  // namespace

std::optional<Formula> enumerate_interpolants(const Formula& phi, const Formula& psi,
                                              Logic logic, int max_depth,
                                              int max_size, int validity_bound) {
  Signature rho = shared_signature(phi, psi);
  std::map<int, std::vector<Formula>> cache;
  for (int size = 1; size <= max_size; ++size) {
    for (const Formula& iota : formulas_of_size(rho, size, max_depth, cache)) {
      if (is_valid(phi, iota, logic, validity_bound).valid &&
          is_valid(iota, psi, logic, validity_bound).valid)
        return iota;
    }
  }
  return std::nullopt;
}

}  // namespace wk4
