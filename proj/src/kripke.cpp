#include "wk4/kripke.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace wk4 {

int Model::var_index(const std::string& v) const {
  auto it = std::lower_bound(sig_.begin(), sig_.end(), v);
  if (it == sig_.end() || *it != v) return -1;
  return (int)(it - sig_.begin());
}

void Model::set(const std::string& v, int world, bool value) {
  int i = var_index(v);
  require(i >= 0, "unknown variable: " + v);
  val_[i].set(world, value);
}

Model Model::with_signature(const Signature& extra) const {
  Signature merged = signature_union(sig_, extra);
  if (merged == sig_) return *this;
  Model out(frame_, merged);
  for (size_t i = 0; i < sig_.size(); ++i) {
    int j = out.var_index(sig_[i]);
    out.val_[j] = val_[i];
  }
  return out;
}

bool is_weakly_transitive(const Frame& f) {
  const int n = f.size();
  for (int x = 0; x < n; ++x) {
    bool ok = true;
    f.successors(x).for_each([&](int y) {
      if (!ok) return;
      // need succ(y) \ {x} subset of succ(x)
      f.successors(y).for_each([&](int z) {
        if (z != x && !f.edge(x, z)) ok = false;
      });
    });
    if (!ok) return false;
  }
  return true;
}

Frame weak_transitive_closure(const Frame& f) {
  Frame r = f;
  const int n = r.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (!r.edge(x, y)) continue;
        r.successors(y).for_each([&](int z) {
          if (z != x && !r.edge(x, z)) {
            r.add_edge(x, z);
            changed = true;
          }
        });
      }
    }
  }
  return r;
}

bool is_symmetric(const Frame& f) {
  const int n = f.size();
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (f.edge(x, y) != f.edge(y, x)) return false;
  return true;
}

bool is_dl_frame(const Frame& f) {
  return is_symmetric(f) && is_weakly_transitive(f);
}

ClusterDecomposition clusters(const Frame& f) {
  require(is_weakly_transitive(f), "clusters: frame is not weakly transitive");
  const int n = f.size();
  ClusterDecomposition cd;
  cd.cluster_of.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (cd.cluster_of[x] >= 0) continue;
    int id = (int)cd.members.size();
    cd.members.push_back({x});
    cd.cluster_of[x] = id;
    for (int y = x + 1; y < n; ++y) {
      if (cd.cluster_of[y] < 0 && f.edge(x, y) && f.edge(y, x)) {
        cd.cluster_of[y] = id;
        cd.members[id].push_back(y);
      }
    }
  }
  const int k = cd.count();
  cd.degenerate.assign(k, false);
  for (int c = 0; c < k; ++c)
    cd.degenerate[c] =
        cd.members[c].size() == 1 && !f.edge(cd.members[c][0], cd.members[c][0]);
  cd.rs = BitMatrix(k, k);
  for (int x = 0; x < n; ++x)
    f.successors(x).for_each([&](int y) {
      if (cd.cluster_of[x] != cd.cluster_of[y])
        cd.rs.set(cd.cluster_of[x], cd.cluster_of[y]);
    });
  // R^s must be a strict partial order on clusters.
  for (int c = 0; c < k; ++c) {
    require(!cd.rs.get(c, c), "clusters: R^s not irreflexive");
    for (int d = 0; d < k; ++d) {
      if (!cd.rs.get(c, d)) continue;
      require(!cd.rs.get(d, c) || c == d, "clusters: R^s not antisymmetric");
      for (int e = 0; e < k; ++e)
        if (cd.rs.get(d, e) && e != c)
          require(cd.rs.get(c, e), "clusters: R^s not transitive");
    }
  }
  return cd;
}

bool ClusterDecomposition::cluster_sees(const Frame& f, int c, int world) const {
  for (int x : members[c])
    if (f.edge(x, world)) return true;
  return false;
}

bool is_rooted_at(const Frame& f, int r) {
  ClusterDecomposition cd = clusters(f);
  int rc = cd.cluster_of[r];
  for (int c = 0; c < cd.count(); ++c)
    if (!cd.rr(rc, c)) return false;
  return true;
}

const BitVec& eval_worlds(const Model& m, const Formula& f, EvalCache& cache) {
  auto it = cache.find(f.raw());
  if (it != cache.end()) return it->second;
  const int n = m.worlds();
  BitVec out(n);
  switch (f.kind()) {
    case Conn::False: break;
    case Conn::True: out = BitVec(n, true); break;
    case Conn::Var: {
      int i = m.var_index(f.var());
      require(i >= 0, "model_check: unknown variable " + f.var());
      out = m.valuation(i);
      break;
    }
    case Conn::Not: out = eval_worlds(m, f.child(), cache).complement(); break;
    case Conn::And: {
      out = eval_worlds(m, f.left(), cache);
      out &= eval_worlds(m, f.right(), cache);
      break;
    }
    case Conn::Diamond: {
      const BitVec& sub = eval_worlds(m, f.child(), cache);
      for (int x = 0; x < n; ++x)
        if (m.frame().successors(x).intersects(sub)) out.set(x);
      break;
    }
  }
  return cache.emplace(f.raw(), std::move(out)).first->second;
}

bool model_check(const Model& m, int world, const Formula& f) {
  require(world >= 0 && world < m.worlds(), "model_check: world out of range");
  EvalCache cache;
  return eval_worlds(m, f, cache).get(world);
}

TypeTable phi_psi_types(const Model& m, const SubClosure& cl) {
  TypeTable t;
  EvalCache cache;
  t.rep_truth.reserve(cl.rep_count());
  for (int i = 0; i < cl.rep_count(); ++i)
    t.rep_truth.push_back(eval_worlds(m, cl.rep(i), cache));
  t.world_type.assign(m.worlds(), BitVec(cl.rep_count()));
  for (int i = 0; i < cl.rep_count(); ++i)
    t.rep_truth[i].for_each([&](int x) { t.world_type[x].set(i); });
  return t;
}

BitVec phi_psi_type(const Model& m, int world, const SubClosure& cl) {
  EvalCache cache;
  BitVec type(cl.rep_count());
  for (int i = 0; i < cl.rep_count(); ++i)
    if (eval_worlds(m, cl.rep(i), cache).get(world)) type.set(i);
  return type;
}

BitVec atomic_type(const Model& m, int world, const Signature& rho) {
  BitVec at((int)rho.size());
  for (size_t i = 0; i < rho.size(); ++i) {
    int j = m.var_index(rho[i]);
    require(j >= 0, "atomic_type: variable outside model signature: " + rho[i]);
    if (m.holds(j, world)) at.set((int)i);
  }
  return at;
}

// Declared in bisim.hpp; used here for the finite (dif)/(ref) surrogates.
std::vector<int> rho_classes(const Model& m, const Signature& rho);

DescriptiveReport check_descriptive_finite(const Model& m) {
  DescriptiveReport rep;
  const int n = m.worlds();
  std::vector<int> cls = rho_classes(m, m.signature());
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (cls[x] == cls[y]) {
        rep.differentiated = false;
        rep.dif_violations.push_back({x, y});
      }
  // (ref) tightness: if some successor of x is full-signature bisimilar
  // to y, then xRy must already hold.
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (m.frame().edge(x, y)) continue;
      bool obliged = false;
      m.frame().successors(x).for_each([&](int z) {
        if (cls[z] == cls[y]) obliged = true;
      });
      if (obliged) {
        rep.tight = false;
        rep.ref_violations.push_back({x, y});
      }
    }
  }
  return rep;
}

std::pair<PointedModel, std::vector<int>> generated_submodel(const Model& m, int root) {
  const int n = m.worlds();
  std::vector<int> map(n, -1);
  std::vector<int> keep;
  keep.push_back(root);
  map[root] = 0;
  m.frame().successors(root).for_each([&](int y) {
    if (map[y] < 0) {
      map[y] = (int)keep.size();
      keep.push_back(y);
    }
  });
  // Weak transitivity closes successor sets: succ(y) subset keep u {root}.
  Frame fr((int)keep.size());
  for (size_t i = 0; i < keep.size(); ++i)
    m.frame().successors(keep[i]).for_each([&](int y) {
      require(map[y] >= 0, "generated_submodel: input not weakly transitive");
      fr.add_edge((int)i, map[y]);
    });
  Model out(fr, m.signature());
  for (size_t v = 0; v < m.signature().size(); ++v)
    for (size_t i = 0; i < keep.size(); ++i)
      if (m.holds((int)v, keep[i])) out.valuation((int)v).set((int)i);
  return {{std::move(out), 0}, std::move(map)};
}

Model disjoint_union(const Model& m1, const Model& m2) {
  Signature sig = signature_union(m1.signature(), m2.signature());
  int n1 = m1.worlds(), n2 = m2.worlds();
  Frame fr(n1 + n2);
  for (int x = 0; x < n1; ++x)
    m1.frame().successors(x).for_each([&](int y) { fr.add_edge(x, y); });
  for (int x = 0; x < n2; ++x)
    m2.frame().successors(x).for_each([&](int y) { fr.add_edge(n1 + x, n1 + y); });
  Model out(fr, sig);
  for (size_t v = 0; v < sig.size(); ++v) {
    int i1 = m1.var_index(sig[v]), i2 = m2.var_index(sig[v]);
    if (i1 >= 0)
      m1.valuation(i1).for_each([&](int x) { out.valuation((int)v).set(x); });
    if (i2 >= 0)
      m2.valuation(i2).for_each([&](int x) { out.valuation((int)v).set(n1 + x); });
  }
  return out;
}

std::string to_dot(const Model& m, const std::vector<std::pair<int, int>>& dashed,
                   const std::vector<std::string>& world_labels) {
  std::ostringstream os;
  os << "digraph model {\n  rankdir=BT;\n  node [shape=circle];\n";
  ClusterDecomposition cd;
  bool have_clusters = is_weakly_transitive(m.frame());
  if (have_clusters) cd = clusters(m.frame());
  auto emit_world = [&](int x) {
    std::string label;
    if (x < (int)world_labels.size() && !world_labels[x].empty())
      label = world_labels[x];
    else
      label = std::to_string(x);
    std::string vals;
    for (size_t v = 0; v < m.signature().size(); ++v)
      if (m.holds((int)v, x)) vals += (vals.empty() ? "" : ",") + m.signature()[v];
    if (!vals.empty()) label += "\\n" + vals;
    bool reflexive = m.frame().edge(x, x);
    // irreflexive points are drawn filled, reflexive ones open
    os << "    w" << x << " [label=\"" << label << "\""
       << (reflexive ? "" : ", style=filled, fillcolor=black, fontcolor=white")
       << "];\n";
  };
  if (have_clusters) {
    for (int c = 0; c < cd.count(); ++c) {
      os << "  subgraph cluster_" << c << " {\n    style=rounded;\n";
      for (int x : cd.members[c]) emit_world(x);
      os << "  }\n";
    }
  } else {
    for (int x = 0; x < m.worlds(); ++x) emit_world(x);
  }
  for (int x = 0; x < m.worlds(); ++x)
    m.frame().successors(x).for_each([&](int y) {
      if (have_clusters && cd.cluster_of[x] == cd.cluster_of[y] && x != y &&
          m.frame().edge(y, x) && x > y)
        return;  // one double-ended arrow per in-cluster pair
      os << "  w" << x << " -> w" << y;
      if (have_clusters && cd.cluster_of[x] == cd.cluster_of[y] && x != y)
        os << " [dir=both]";
      os << ";\n";
    });
  for (auto& [a, b] : dashed)
    os << "  w" << a << " -> w" << b << " [style=dashed, constraint=false, dir=none];\n";
  os << "}\n";
  return os.str();
}

}  // namespace wk4
