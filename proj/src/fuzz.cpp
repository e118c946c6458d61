#include "wk4/fuzz.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace wk4 {

Formula random_formula(std::mt19937_64& rng, int depth, const Signature& vars) {
  auto atom = [&]() -> Formula {
    int r = (int)(rng() % (vars.size() + 2));
    if (r == 0) return Formula::tt();
    if (r == 1) return Formula::ff();
    return Formula::var(vars[r - 2]);
  };
  if (depth <= 0) return atom();
  switch (rng() % 8) {
    case 0: return atom();
    case 1: return Formula::nnot(random_formula(rng, depth - 1, vars));
    case 2:
      return Formula::aand(random_formula(rng, depth - 1, vars),
                           random_formula(rng, depth - 1, vars));
    case 3:
    case 4: return Formula::diamond(random_formula(rng, depth - 1, vars));
    case 5:
      return Formula::oor(random_formula(rng, depth - 1, vars),
                          random_formula(rng, depth - 1, vars));
    case 6:
      return Formula::implies(random_formula(rng, depth - 1, vars),
                              random_formula(rng, depth - 1, vars));
    default: return Formula::box(random_formula(rng, depth - 1, vars));
  }
}

Model random_wtrans_model(std::mt19937_64& rng, int max_worlds,
                          const Signature& vars) {
  int n = 1 + (int)(rng() % max_worlds);
  // random cluster sizes
  std::vector<int> sizes;
  int left = n;
  while (left > 0) {
    int s = 1 + (int)(rng() % left);
    if (rng() % 2) s = 1;  // bias toward small clusters
    sizes.push_back(s);
    left -= s;
  }
  int k = (int)sizes.size();
  // random strict order: edges only from lower to higher cluster index,
  // transitively closed, so the result is a strict partial order
  std::vector<std::vector<bool>> lt(k, std::vector<bool>(k, false));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (rng() % 3 == 0) lt[i][j] = true;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c)
        if (lt[a][b] && lt[b][c]) lt[a][c] = true;
  std::vector<int> cluster_of(n), offset(k + 1, 0);
  for (int i = 0; i < k; ++i) offset[i + 1] = offset[i] + sizes[i];
  for (int i = 0; i < k; ++i)
    for (int x = offset[i]; x < offset[i + 1]; ++x) cluster_of[x] = i;
  Frame fr(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      if (cluster_of[x] == cluster_of[y] || lt[cluster_of[x]][cluster_of[y]])
        fr.add_edge(x, y);
    }
  for (int x = 0; x < n; ++x)
    if (rng() % 2) fr.add_edge(x, x);
  Model m(fr, vars);
  for (size_t v = 0; v < vars.size(); ++v)
    for (int x = 0; x < n; ++x)
      if (rng() % 2) m.valuation((int)v).set(x);
  return m;
}

Model random_symmetric_model(std::mt19937_64& rng, int max_worlds,
                             const Signature& vars) {
  // a single cluster with random reflexive points
  int n = 1 + (int)(rng() % max_worlds);
  Frame fr(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) fr.add_edge(x, y);
  for (int x = 0; x < n; ++x)
    if (rng() % 2) fr.add_edge(x, x);
  Model m(fr, vars);
  for (size_t v = 0; v < vars.size(); ++v)
    for (int x = 0; x < n; ++x)
      if (rng() % 2) m.valuation((int)v).set(x);
  return m;
}

namespace {

Signature var_pool(int max_vars) {
  static const std::vector<std::string> names{"p", "q", "r", "s"};
  Signature out;
  for (int i = 0; i < max_vars && i < (int)names.size(); ++i)
    out.push_back(names[i]);
  return make_signature(out);
}

std::string check_formula_roundtrip(std::mt19937_64& rng, int max_depth) {
  Formula f = random_formula(rng, 1 + (int)(rng() % std::max(1, max_depth + 5)),
                             var_pool(3));
  Formula g = parse(f.to_string());
  if (!(g == f)) return "print/parse roundtrip mismatch: " + f.to_string();
  Formula h = parse(f.to_string_parenthesized());
  if (!(h == f))
    return "parenthesized roundtrip mismatch: " + f.to_string_parenthesized();
  return "";
}

std::string check_kripke_properties(std::mt19937_64& rng, int max_worlds,
                                    int max_vars) {
  Signature vars = var_pool(max_vars);
  Model m = random_wtrans_model(rng, max_worlds, vars);
  if (!is_weakly_transitive(m.frame())) return "generator produced non-wtrans frame";
  // wK4 axiom soundness: <><>p -> (p | <>p) everywhere
  Formula p = Formula::var(vars[0]);
  Formula ax = Formula::implies(Formula::diamond(Formula::diamond(p)),
                                Formula::oor(p, Formula::diamond(p)));
  for (int x = 0; x < m.worlds(); ++x)
    if (!model_check(m, x, ax)) return "wK4 axiom fails on weakly transitive model";
  // Brouwersche axiom on symmetric models
  Model sym = random_symmetric_model(rng, max_worlds, vars);
  Formula br = Formula::implies(p, Formula::box(Formula::diamond(p)));
  for (int x = 0; x < sym.worlds(); ++x)
    if (!model_check(sym, x, br)) return "Brouwersche axiom fails on symmetric model";
  // cluster partition: C(x) definition and R^s versus cluster ids
  ClusterDecomposition cd = clusters(m.frame());
  for (int x = 0; x < m.worlds(); ++x)
    for (int y = 0; y < m.worlds(); ++y) {
      bool same = cd.cluster_of[x] == cd.cluster_of[y];
      bool defn = x == y || (m.frame().edge(x, y) && m.frame().edge(y, x));
      if (same != defn) return "cluster partition disagrees with definition";
      if (x != y && m.frame().edge(x, y) && !same &&
          !cd.rs.get(cd.cluster_of[x], cd.cluster_of[y]))
        return "R^s misses a cross-cluster edge";
    }
  // weak transitive closure: idempotent fixpoint above the input
  Frame raw(m.worlds());
  for (int x = 0; x < m.worlds(); ++x)
    for (int y = 0; y < m.worlds(); ++y)
      if (rng() % 4 == 0) raw.add_edge(x, y);
  Frame closed = weak_transitive_closure(raw);
  if (!is_weakly_transitive(closed)) return "closure not weakly transitive";
  if (!(weak_transitive_closure(closed) == closed)) return "closure not idempotent";
  for (int x = 0; x < m.worlds(); ++x)
    for (int y = 0; y < m.worlds(); ++y)
      if (raw.edge(x, y) && !closed.edge(x, y)) return "closure dropped an edge";
  // differentiated models: atomic types pairwise distinct inside clusters
  DescriptiveReport dr = check_descriptive_finite(m);
  if (dr.differentiated) {
    for (int c = 0; c < cd.count(); ++c)
      for (int x : cd.members[c])
        for (int y : cd.members[c])
          if (x < y &&
              atomic_type(m, x, m.signature()) == atomic_type(m, y, m.signature()))
            return "differentiated model with clashing cluster atoms";
  }
  return "";
}

std::string check_bisim_properties(std::mt19937_64& rng, int max_worlds,
                                   int max_vars) {
  Signature vars = var_pool(max_vars);
  Signature rho;
  for (const auto& v : vars)
    if (rng() % 2) rho.push_back(v);
  Model m1 = random_wtrans_model(rng, max_worlds, vars);
  Model m2 = random_wtrans_model(rng, max_worlds, vars);
  BisimRelation maximal = maximal_bisimulation(m1, m2, rho);
  if (!verify_bisimulation(m1, m2, rho, maximal))
    return "maximal bisimulation fails verification";
  // any verified random relation sits inside the maximal one
  for (int trial = 0; trial < 4; ++trial) {
    BisimRelation r(m1.worlds(), m2.worlds());
    for (int x = 0; x < m1.worlds(); ++x)
      for (int y = 0; y < m2.worlds(); ++y)
        if (rng() % 3 == 0) r.add(x, y);
    if (!verify_bisimulation(m1, m2, rho, r)) continue;
    for (int x = 0; x < m1.worlds(); ++x)
      for (int y = 0; y < m2.worlds(); ++y)
        if (r.contains(x, y) && !maximal.contains(x, y))
          return "verified relation escapes the maximal bisimulation";
  }
  // monotonicity: shrinking rho grows the maximal bisimulation
  if (!rho.empty()) {
    Signature smaller(rho.begin(), rho.end() - 1);
    BisimRelation wider = maximal_bisimulation(m1, m2, smaller);
    for (int x = 0; x < m1.worlds(); ++x)
      for (int y = 0; y < m2.worlds(); ++y)
        if (maximal.contains(x, y) && !wider.contains(x, y))
          return "maximal bisimulation not monotone in rho";
  }
  // canonical quotient keys decide root bisimilarity
  int r1 = (int)(rng() % m1.worlds()), r2 = (int)(rng() % m2.worlds());
  bool keys_equal = canonical_pointed_key(m1, r1, rho) ==
                    canonical_pointed_key(m2, r2, rho);
  if (keys_equal != maximal.contains(r1, r2))
    return "canonical quotient key disagrees with maximal bisimulation";
  return "";
}

std::string check_satsearch_properties(std::mt19937_64& rng, int max_worlds,
                                       int max_vars) {
  // The reduction backing the enumeration space: inside one cluster,
  // same-valuation points are interchangeable, and one point per
  // valuation suffices (reflexive when the valuation was self-visible:
  // two copies or some reflexive realizer).
  Signature vars = var_pool(std::min(max_vars, 2));
  Model m = random_wtrans_model(rng, std::min(max_worlds, 6), vars);
  const int n = m.worlds();
  ClusterDecomposition cd = clusters(m.frame());
  // within one model: same-cluster same-valuation points are bisimilar
  BisimRelation self = maximal_bisimulation(m, m, vars);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (cd.cluster_of[x] == cd.cluster_of[y] &&
          atomic_type(m, x, vars) == atomic_type(m, y, vars) &&
          !self.contains(x, y))
        return "same-cluster same-valuation points not bisimilar";
  // the reduced model: a representative per (cluster, valuation)
  std::vector<int> rep(n, -1);
  std::vector<int> keep;
  std::vector<bool> keep_refl;
  for (int c = 0; c < cd.count(); ++c) {
    std::map<std::vector<int>, int> by_val;  // valuation -> keep index
    for (int x : cd.members[c]) {
      std::vector<int> val = atomic_type(m, x, vars).to_indices();
      auto [it, fresh] = by_val.emplace(val, (int)keep.size());
      if (fresh) {
        keep.push_back(x);
        keep_refl.push_back(m.frame().edge(x, x));
      } else {
        keep_refl[it->second] = true;  // second copy: self-visible
      }
      rep[x] = it->second;
      if (m.frame().edge(x, x)) keep_refl[it->second] = true;
    }
  }
  Frame fr((int)keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    for (size_t j = 0; j < keep.size(); ++j) {
      if (i == j) continue;
      int ci = cd.cluster_of[keep[i]], cj = cd.cluster_of[keep[j]];
      if (ci == cj || cd.rs.get(ci, cj)) fr.add_edge((int)i, (int)j);
    }
    if (keep_refl[i]) fr.add_edge((int)i, (int)i);
  }
  Model reduced(fr, vars);
  for (size_t v = 0; v < vars.size(); ++v)
    for (size_t i = 0; i < keep.size(); ++i)
      if (m.holds((int)v, keep[i])) reduced.valuation((int)v).set((int)i);
  if (!is_weakly_transitive(reduced.frame()))
    return "reduced model not weakly transitive";
  BisimRelation beta = maximal_bisimulation(m, reduced, vars);
  for (int x = 0; x < n; ++x)
    if (!beta.contains(x, rep[x])) return "world not bisimilar to its representative";
  return "";
}

}  // namespace

std::string check_filtration_properties(std::mt19937_64& rng, int max_worlds,
                                        int max_vars, int max_depth) {
  Signature vars = var_pool(max_vars);
  // overlapping pools give interesting shared signatures
  Signature pool_phi, pool_psi;
  for (const auto& v : vars) {
    if (rng() % 2) pool_phi.push_back(v);
    if (rng() % 2) pool_psi.push_back(v);
  }
  if (pool_phi.empty()) pool_phi.push_back(vars[0]);
  if (pool_psi.empty()) pool_psi.push_back(vars[vars.size() - 1]);
  Formula phi = random_formula(rng, max_depth, pool_phi);
  Formula psi = random_formula(rng, max_depth, pool_psi);
  Model m = random_wtrans_model(rng, max_worlds, vars);
  int d_phi = (int)(rng() % m.worlds());
  int d_psi = (int)(rng() % m.worlds());

  FiltrationContext ctx(m, phi, psi);
  FiltrationResult res = ctx.filtrate(d_phi, d_psi);
  const SubClosure& cl = ctx.closure();
  const ClusterDecomposition& cd = ctx.decomposition();
  const int nq = (int)res.quads.size();
  std::ostringstream why;

  // property (2): every admissible quadruple is realized by some world
  std::set<int> realized(res.world_map.begin(), res.world_map.end());
  if ((int)realized.size() != nq) return "P2: unrealized quadruple in W+";
  // quadruple invariants: a = t n rho, tau in M, t in tau(a)
  for (const auto& quad : res.quads) {
    for (size_t i = 0; i < ctx.rho().size(); ++i) {
      auto idx = cl.index_of(Formula::var(ctx.rho()[i]));
      if (idx && quad.atom.get((int)i) != quad.type.get(*idx))
        return "quad invariant: atom differs from type restriction";
    }
    const Mosaic& mo = ctx.mosaic(quad.mosaic);
    if (!std::binary_search(mo.taus.begin(), mo.taus.end(), quad.tau))
      return "quad invariant: tau outside mosaic";
    const ClusterType& tau = ctx.tau(quad.tau);
    auto it = std::lower_bound(tau.domain.begin(), tau.domain.end(), quad.atom);
    if (it == tau.domain.end() || !(*it == quad.atom))
      return "quad invariant: atom outside domain";
    const auto& vals = tau.values[it - tau.domain.begin()];
    if (!std::binary_search(vals.begin(), vals.end(), quad.type))
      return "quad invariant: type outside tau(a)";
  }

  // property (3): transitivity of the arrow in all three settings
  {
    std::vector<BitVec> ts;
    for (int x = 0; x < m.worlds(); ++x) ts.push_back(ctx.type_of(x));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (auto& a : ts)
      for (auto& b : ts)
        for (auto& c : ts)
          if (ctx.type_arrow(a, b) && ctx.type_arrow(b, c) && !ctx.type_arrow(a, c))
            return "P3: type arrow not transitive";
    for (int a = 0; a < ctx.tau_count(); ++a)
      for (int b = 0; b < ctx.tau_count(); ++b)
        for (int c = 0; c < ctx.tau_count(); ++c)
          if (ctx.cluster_type_arrow(a, b) && ctx.cluster_type_arrow(b, c) &&
              !ctx.cluster_type_arrow(a, c))
            return "P3: cluster-type arrow not transitive";
    for (int a = 0; a < ctx.mosaic_count(); ++a)
      for (int b = 0; b < ctx.mosaic_count(); ++b)
        for (int c = 0; c < ctx.mosaic_count(); ++c)
          if (ctx.mosaic_arrow(a, b) && ctx.mosaic_arrow(b, c) &&
              !ctx.mosaic_arrow(a, c))
            return "P3: mosaic arrow not transitive";
  }

  for (int x = 0; x < m.worlds(); ++x) {
    BitVec sx = ctx.type_of(x);
    bool loops_ok = true;
    m.frame().successors(x).for_each([&](int y) {
      // property (4), provable instance: equal types along an edge loop
      if (ctx.type_of(y) == sx && !ctx.type_arrow(sx, sx)) loops_ok = false;
      // the half used by the minimal filtration: chi in t(y) forces
      // <>chi in t(x)
      for (int di : cl.diamond_reps()) {
        SubClosure::Lit chi = cl.diamond_child(di);
        if (ctx.type_of(y).get(chi.idx) == chi.pos && !sx.get(di)) loops_ok = false;
      }
      // property (5)
      int cx = cd.cluster_of[x], cy = cd.cluster_of[y];
      if (cx != cy &&
          !ctx.cluster_type_arrow(ctx.tau_of_cluster(cx), ctx.tau_of_cluster(cy)))
        loops_ok = false;
      // property (9)
      if (ctx.equivalence().class_of_cluster[cx] !=
              ctx.equivalence().class_of_cluster[cy] &&
          !ctx.mosaic_arrow(ctx.mosaic_of_cluster(cx), ctx.mosaic_of_cluster(cy)))
        loops_ok = false;
    });
    if (!loops_ok) return "P4/P5/P9 violated along an edge";
  }

  // property (6)
  for (int c = 0; c < cd.count(); ++c) {
    bool found = false;
    int cls = ctx.equivalence().class_of_cluster[c];
    for (int d : ctx.equivalence().class_members[cls]) {
      if (!ctx.rho_maximal(d)) continue;
      if (c == d || ctx.cluster_type_arrow(ctx.tau_of_cluster(c), ctx.tau_of_cluster(d))) {
        found = true;
        break;
      }
    }
    if (!found) return "P6: no rho-maximal arrow target in the class";
    int d = ctx.find_rho_maximal_successor(c);  // totality (Zorn degenerate)
    if (!ctx.rho_maximal(d)) return "find_rho_maximal_successor returned non-maximal";
  }

  // properties (7), (8)
  for (int c = 0; c < cd.count(); ++c) {
    int mi = ctx.mosaic_of_cluster(c);
    const ClusterType& tau = ctx.tau(ctx.tau_of_cluster(c));
    for (const BitVec& a : ctx.irr_set(mi)) {
      auto it = std::lower_bound(tau.domain.begin(), tau.domain.end(), a);
      if (it == tau.domain.end() || !(*it == a)) continue;
      size_t count = tau.values[it - tau.domain.begin()].size();
      if (count > 1) return "P7: irr atom realized by two types in one cluster";
      if (!ctx.rho_maximal(c) && count != 0)
        return "P8: non-maximal cluster realizes an irr atom";
    }
  }

  // Lemma 4
  if (!is_weakly_transitive(res.model.frame()))
    return "L4: rebuilt frame not weakly transitive";
  // Lemma 5
  for (int x = 0; x < m.worlds(); ++x) {
    bool ok = true;
    m.frame().successors(x).for_each([&](int y) {
      if (!res.model.frame().edge(res.world_map[x], res.world_map[y])) ok = false;
    });
    if (!ok) return "L5: input edge lost";
  }
  // Lemma 6
  for (int i = 0; i < nq; ++i) {
    bool ok = true;
    res.model.frame().successors(i).for_each([&](int j) {
      for (int di : cl.diamond_reps()) {
        SubClosure::Lit chi = cl.diamond_child(di);
        if (res.quads[j].type.get(chi.idx) == chi.pos && !res.quads[i].type.get(di))
          ok = false;
      }
    });
    if (!ok) return "L6: edge outside the largest filtration";
  }
  // Lemma 7 (filtration lemma) via model checking on the rebuilt model
  TypeTable tt = phi_psi_types(res.model, cl);
  for (int i = 0; i < nq; ++i)
    if (!(tt.world_type[i] == res.quads[i].type))
      return "L7: rebuilt truth disagrees with the type component";
  // corollary at the designated points
  if (model_check(res.model, res.designated_phi, phi) != model_check(m, d_phi, phi))
    return "corollary: phi truth not preserved at the designated point";
  if (model_check(res.model, res.designated_psi, psi) != model_check(m, d_psi, psi))
    return "corollary: psi truth not preserved at the designated point";
  // Lemma 9
  BisimRelation beta =
      BisimRelation::from_pairs(nq, nq, res.beta);
  if (!verify_bisimulation(res.model, res.model, ctx.rho(), beta))
    return "L9: dagger relation is not a rho-bisimulation";
  if (bisimilar({m, d_phi}, {m, d_psi}, ctx.rho()) &&
      !beta.contains(res.designated_phi, res.designated_psi))
    return "L9: bisimilar designated points not related";
  return "";
}

namespace {

FuzzReport run_range(const FuzzOptions& opt, uint64_t from, uint64_t to) {
  FuzzReport rep;
  for (uint64_t i = from; i < to; ++i) {
    std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL + i);
    std::string msg;
    if (opt.module == "formula")
      msg = check_formula_roundtrip(rng, opt.max_depth);
    else if (opt.module == "kripke")
      msg = check_kripke_properties(rng, opt.max_worlds, opt.max_vars);
    else if (opt.module == "bisim")
      msg = check_bisim_properties(rng, opt.max_worlds, opt.max_vars);
    else if (opt.module == "satsearch")
      msg = check_satsearch_properties(rng, opt.max_worlds, opt.max_vars);
    else if (opt.module == "filtration")
      msg = check_filtration_properties(rng, opt.max_worlds, opt.max_vars,
                                        opt.max_depth);
    else
      throw InvariantError("unknown fuzz module: " + opt.module);
    ++rep.iterations;
    if (!msg.empty()) {
      ++rep.violations;
      if (rep.messages.size() < 20)
        rep.messages.push_back("seed " + std::to_string(i) + ": " + msg);
    }
  }
  return rep;
}

}  // namespace

FuzzReport run_fuzz(const FuzzOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  FuzzReport rep;
  int workers = std::max(1, opt.workers);
  if (workers == 1) {
    rep = run_range(opt, 0, (uint64_t)opt.iterations);
  } else {
    std::vector<std::future<FuzzReport>> futs;
    uint64_t chunk = (opt.iterations + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      uint64_t from = w * chunk;
      uint64_t to = std::min<uint64_t>(opt.iterations, from + chunk);
      if (from >= to) break;
      futs.push_back(std::async(std::launch::async,
                                [&opt, from, to] { return run_range(opt, from, to); }));
    }
    for (auto& f : futs) {
      FuzzReport part = f.get();
      rep.iterations += part.iterations;
      rep.violations += part.violations;
      for (auto& m : part.messages)
        if (rep.messages.size() < 20) rep.messages.push_back(m);
    }
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace wk4
