#include "wk4/filtration.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace wk4 {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

FiltrationContext::FiltrationContext(Model m, Formula phi, Formula psi)
    : m_(std::move(m)), cl_(phi, psi) {
  sigma_ = signature_union(signature_of(phi), signature_of(psi));
  rho_ = shared_signature(phi, psi);
  require(signature_subset(sigma_, m_.signature()),
          "filtration: model signature does not cover sig(phi) u sig(psi)");
  require(is_weakly_transitive(m_.frame()),
          "filtration: model frame is not weakly transitive");
  const int n = m_.worlds();

  types_ = phi_psi_types(m_, cl_);
  atoms_.reserve(n);
  for (int x = 0; x < n; ++x) atoms_.push_back(atomic_type(m_, x, rho_));
  rho_class_ = rho_classes(m_, rho_);
  int num_classes = n == 0 ? 0 : 1 + *std::max_element(rho_class_.begin(), rho_class_.end());
  class_atom_.assign(num_classes, BitVec((int)rho_.size()));
  for (int x = 0; x < n; ++x) class_atom_[rho_class_[x]] = atoms_[x];
  class_diamond_.assign(num_classes, false);
  for (int x = 0; x < n; ++x) {
    bool self = false;
    m_.frame().successors(x).for_each([&](int y) {
      if (rho_class_[y] == rho_class_[x]) self = true;
    });
    if (self) class_diamond_[rho_class_[x]] = true;
  }

  cd_ = clusters(m_.frame());
  const int k = cd_.count();

  // The chain equivalence between clusters: merge on shared rho-class.
  UnionFind uf(k);
  {
    std::map<int, int> owner;  // rho-class -> first cluster seen
    for (int c = 0; c < k; ++c)
      for (int x : cd_.members[c]) {
        auto [it, fresh] = owner.emplace(rho_class_[x], c);
        if (!fresh) uf.merge(it->second, c);
      }
  }
  eq_.class_of_cluster.assign(k, -1);
  {
    std::map<int, int> renumber;
    for (int c = 0; c < k; ++c) {
      int r = uf.find(c);
      auto [it, fresh] = renumber.emplace(r, (int)eq_.class_members.size());
      if (fresh) eq_.class_members.push_back({});
      eq_.class_of_cluster[c] = it->second;
      eq_.class_members[it->second].push_back(c);
    }
  }
  eq_.class_types.assign(eq_.count(), {});
  eq_.class_atoms.assign(eq_.count(), {});
  for (int cls = 0; cls < eq_.count(); ++cls) {
    std::vector<int> ts;
    for (int c : eq_.class_members[cls])
      for (int x : cd_.members[c]) ts.push_back(rho_class_[x]);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    eq_.class_types[cls] = ts;
    std::vector<BitVec> atoms;
    for (int t : ts) atoms.push_back(class_atom_[t]);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    eq_.class_atoms[cls] = std::move(atoms);
  }

  // Cluster-types over the class domain, deduplicated structurally.
  tau_of_cluster_.assign(k, -1);
  std::map<ClusterType, int> tau_ids;
  for (int c = 0; c < k; ++c) {
    int cls = eq_.class_of_cluster[c];
    ClusterType tau;
    tau.domain = eq_.class_atoms[cls];
    tau.values.assign(tau.domain.size(), {});
    for (int x : cd_.members[c]) {
      auto it = std::lower_bound(tau.domain.begin(), tau.domain.end(), atoms_[x]);
      require(it != tau.domain.end() && *it == atoms_[x],
              "filtration: atom outside class domain");
      tau.values[it - tau.domain.begin()].push_back(types_.world_type[x]);
    }
    for (auto& v : tau.values) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    auto [it, fresh] = tau_ids.emplace(tau, (int)taus_.size());
    if (fresh) taus_.push_back(tau);
    tau_of_cluster_[c] = it->second;
  }
  tau_type_sets_.assign(taus_.size(), {});
  for (size_t t = 0; t < taus_.size(); ++t) {
    std::vector<BitVec> all;
    for (auto& v : taus_[t].values) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    tau_type_sets_[t] = std::move(all);
  }

  // Mosaics per class, deduplicated structurally.
  mosaic_of_class_.assign(eq_.count(), -1);
  std::map<Mosaic, int> mosaic_ids;
  for (int cls = 0; cls < eq_.count(); ++cls) {
    Mosaic mo;
    mo.domain = eq_.class_atoms[cls];
    for (int c : eq_.class_members[cls]) mo.taus.push_back(tau_of_cluster_[c]);
    std::sort(mo.taus.begin(), mo.taus.end());
    mo.taus.erase(std::unique(mo.taus.begin(), mo.taus.end()), mo.taus.end());
    auto [it, fresh] = mosaic_ids.emplace(mo, (int)mosaics_.size());
    if (fresh) mosaics_.push_back(mo);
    mosaic_of_class_[cls] = it->second;
  }

  // I(M): atoms a of the domain such that <>t never sits inside t for
  // any rho-type t with t n rho = a realized in a class carrying M.
  irr_sets_.assign(mosaics_.size(), {});
  for (size_t mi = 0; mi < mosaics_.size(); ++mi) {
    for (const BitVec& a : mosaics_[mi].domain) {
      bool irr = true;
      for (int cls = 0; cls < eq_.count() && irr; ++cls) {
        if (mosaic_of_class_[cls] != (int)mi) continue;
        for (int t : eq_.class_types[cls])
          if (class_atom_[t] == a && class_diamond_[t]) {
            irr = false;
            break;
          }
      }
      if (irr) irr_sets_[mi].push_back(a);
    }
  }

  // Arrow tables.
  tau_arrow_.assign(taus_.size(), std::vector<bool>(taus_.size(), false));
  for (size_t a = 0; a < taus_.size(); ++a)
    for (size_t b = 0; b < taus_.size(); ++b) {
      bool ok = true;
      for (const BitVec& t1 : tau_type_sets_[a]) {
        for (const BitVec& t2 : tau_type_sets_[b])
          if (!type_arrow(t1, t2)) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      tau_arrow_[a][b] = ok;
    }
  mosaic_arrow_.assign(mosaics_.size(), std::vector<bool>(mosaics_.size(), false));
  for (size_t a = 0; a < mosaics_.size(); ++a)
    for (size_t b = 0; b < mosaics_.size(); ++b) {
      bool ok = true;
      for (int t1 : mosaics_[a].taus) {
        bool found = false;
        for (int t2 : mosaics_[b].taus)
          if (tau_arrow_[t1][t2]) {
            found = true;
            break;
          }
        if (!found) {
          ok = false;
          break;
        }
      }
      mosaic_arrow_[a][b] = ok;
    }
}

bool FiltrationContext::rho_maximal(int cluster) const {
  for (int y = 0; y < m_.worlds(); ++y) {
    if (cd_.cluster_of[y] == cluster) continue;
    if (!cd_.cluster_sees(m_.frame(), cluster, y)) continue;
    for (int x : cd_.members[cluster])
      if (rho_class_[x] == rho_class_[y]) return false;
  }
  return true;
}

int FiltrationContext::find_rho_maximal_successor(int cluster) const {
  std::vector<int> want;
  for (int x : cd_.members[cluster]) want.push_back(rho_class_[x]);
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  for (int d = 0; d < cd_.count(); ++d) {
    if (!cd_.rr(cluster, d)) continue;
    if (!rho_maximal(d)) continue;
    std::vector<int> have;
    for (int x : cd_.members[d]) have.push_back(rho_class_[x]);
    std::sort(have.begin(), have.end());
    if (std::includes(have.begin(), have.end(), want.begin(), want.end()))
      return d;
  }
  throw InvariantError("find_rho_maximal_successor: no candidate (finite model)");
}

bool FiltrationContext::diamond_subset(int rho_class) const {
  return class_diamond_[rho_class];
}

bool FiltrationContext::type_arrow(const BitVec& t1, const BitVec& t2) const {
  // t1 ->> t2: for every <>chi in sub(phi,psi), if chi or <>chi is in
  // t2 then <>chi is in t1.
  for (int di : cl_.diamond_reps()) {
    SubClosure::Lit chi = cl_.diamond_child(di);
    bool antecedent = t2.get(di) || t2.get(chi.idx) == chi.pos;
    if (antecedent && !t1.get(di)) return false;
  }
  return true;
}

bool FiltrationContext::cluster_type_arrow(int tau1, int tau2) const {
  return tau_arrow_[tau1][tau2];
}

bool FiltrationContext::mosaic_arrow(int m1, int m2) const {
  return mosaic_arrow_[m1][m2];
}

FiltrationResult FiltrationContext::filtrate(int designated_phi,
                                             int designated_psi) const {
  require(designated_phi >= 0 && designated_phi < m_.worlds() &&
              designated_psi >= 0 && designated_psi < m_.worlds(),
          "filtrate: designated world out of range");
  FiltrationResult res;

  // W+: every quadruple (t, a, tau, M) with tau in M, a in dom M and
  // t in tau(a), over the mosaics of the model.
  std::map<std::tuple<int, int, BitVec, BitVec>, int> index;  // (M,tau,a,t)
  for (size_t mi = 0; mi < mosaics_.size(); ++mi)
    for (int ti : mosaics_[mi].taus) {
      const ClusterType& tau = taus_[ti];
      for (size_t ai = 0; ai < tau.domain.size(); ++ai)
        for (const BitVec& t : tau.values[ai]) {
          FiltrationResult::Quad q;
          q.type = t;
          q.atom = tau.domain[ai];
          q.tau = ti;
          q.mosaic = (int)mi;
          index.emplace(std::make_tuple((int)mi, ti, tau.domain[ai], t),
                        (int)res.quads.size());
          res.quads.push_back(std::move(q));
        }
    }
  const int nq = (int)res.quads.size();

  res.world_map.assign(m_.worlds(), -1);
  for (int x = 0; x < m_.worlds(); ++x) {
    int c = cd_.cluster_of[x];
    auto key = std::make_tuple(mosaic_of_cluster(c), tau_of_cluster_[c], atoms_[x],
                               types_.world_type[x]);
    auto it = index.find(key);
    require(it != index.end(), "filtrate: world image missing from W+");
    res.world_map[x] = it->second;
  }
  res.designated_phi = res.world_map[designated_phi];
  res.designated_psi = res.world_map[designated_psi];

  // R+ by the three-case definition.
  auto tau_empty_on_irr = [&](int tau_id, int mosaic_id) {
    const ClusterType& tau = taus_[tau_id];
    for (const BitVec& b : irr_sets_[mosaic_id]) {
      auto it = std::lower_bound(tau.domain.begin(), tau.domain.end(), b);
      if (it != tau.domain.end() && *it == b &&
          !tau.values[it - tau.domain.begin()].empty())
        return false;
    }
    return true;
  };
  auto atom_in_irr = [&](const BitVec& a, int mosaic_id) {
    const auto& irr = irr_sets_[mosaic_id];
    return std::find(irr.begin(), irr.end(), a) != irr.end();
  };

  Frame fr(nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      const auto& w1 = res.quads[i];
      const auto& w2 = res.quads[j];
      bool edge = false;
      if (w1.mosaic != w2.mosaic) {
        edge = mosaic_arrow_[w1.mosaic][w2.mosaic] && tau_arrow_[w1.tau][w2.tau];
      } else if (mosaic_arrow_[w1.mosaic][w1.mosaic]) {
        if (i != j)
          edge = w1.tau == w2.tau || tau_arrow_[w1.tau][w2.tau];
        else
          edge = type_arrow(w1.type, w1.type);
      } else {
        if (i != j)
          edge = w1.tau == w2.tau ||
                 (tau_arrow_[w1.tau][w2.tau] && tau_empty_on_irr(w1.tau, w1.mosaic));
        else
          edge = type_arrow(w1.type, w1.type) && !atom_in_irr(w1.atom, w1.mosaic);
      }
      if (edge) fr.add_edge(i, j);
    }

  // Valuation inherited through the type component.
  Model out(fr, sigma_);
  for (size_t v = 0; v < sigma_.size(); ++v) {
    auto idx = cl_.index_of(Formula::var(sigma_[v]));
    require(idx.has_value(), "filtrate: sigma variable missing from closure");
    for (int i = 0; i < nq; ++i)
      if (res.quads[i].type.get(*idx)) out.valuation((int)v).set(i);
  }
  res.model = std::move(out);

  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j)
      if (res.quads[i].atom == res.quads[j].atom &&
          res.quads[i].mosaic == res.quads[j].mosaic)
        res.beta.push_back({i, j});

  // Size accounting against the theoretical bounds.
  res.report.classes = eq_.count();
  res.report.cluster_types = (int)taus_.size();
  res.report.mosaics = (int)mosaics_.size();
  res.report.quadruples = nq;
  uint64_t sub = (uint64_t)cl_.member_count();
  uint64_t rho = (uint64_t)rho_.size();
  res.report.cluster_type_bound = pow2_saturated(rho + pow2_saturated(sub + rho));
  res.report.mosaic_bound = pow2_saturated(pow2_saturated(pow2_saturated(sub)));
  res.report.within_bounds =
      (uint64_t)res.report.cluster_types <= res.report.cluster_type_bound &&
      (uint64_t)res.report.mosaics <= res.report.mosaic_bound &&
      (uint64_t)res.report.quadruples <= res.report.mosaic_bound;
  require(res.report.within_bounds, "filtrate: theoretical size bounds violated");
  return res;
}

ClusterEquivalence cluster_equivalence(const Model& m, const Signature& rho) {
  // Stand-alone variant: the closure does not matter for the classes;
  // any pair of formulas with shared signature rho gives the same result.
  Formula rho_conj = Formula::tt();
  for (const auto& v : rho) rho_conj = Formula::aand(rho_conj, Formula::var(v));
  FiltrationContext ctx(m, rho_conj, rho_conj);
  return ctx.equivalence();
}

FiltrationResult filtrate(const Model& m, const Formula& phi, const Formula& psi,
                          int designated_phi, int designated_psi) {
  FiltrationContext ctx(m, phi, psi);
  return ctx.filtrate(designated_phi, designated_psi);
}

}  // namespace wk4
