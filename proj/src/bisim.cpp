#include "wk4/bisim.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace wk4 {

int BisimRelation::pair_count() const {
  int c = 0;
  for (int x = 0; x < n1_; ++x)
    for (int y = 0; y < n2_; ++y)
      if (mat_.get(x, y)) ++c;
  return c;
}

Relation BisimRelation::pairs() const {
  Relation out;
  for (int x = 0; x < n1_; ++x)
    for (int y = 0; y < n2_; ++y)
      if (mat_.get(x, y)) out.push_back({x, y});
  return out;
}

BisimRelation BisimRelation::from_pairs(int n1, int n2, const Relation& pairs) {
  BisimRelation r(n1, n2);
  for (auto& [x, y] : pairs) {
    require(x >= 0 && x < n1 && y >= 0 && y < n2, "relation pair out of range");
    r.add(x, y);
  }
  return r;
}

namespace {

std::vector<BitVec> atom_bits(const Model& m, const Signature& rho) {
  std::vector<BitVec> at(m.worlds(), BitVec((int)rho.size()));
  for (size_t i = 0; i < rho.size(); ++i) {
    int j = m.var_index(rho[i]);
    require(j >= 0, "rho variable outside model signature: " + rho[i]);
    m.valuation(j).for_each([&](int x) { at[x].set((int)i); });
  }
  return at;
}

bool move_ok(const Model& ma, const Model& mb, const BisimRelation& beta,
             bool left_to_right, int xa, int xb) {
  bool ok = true;
  ma.frame().successors(xa).for_each([&](int ya) {
    if (!ok) return;
    bool matched = false;
    mb.frame().successors(xb).for_each([&](int yb) {
      if (matched) return;
      if (left_to_right ? beta.contains(ya, yb) : beta.contains(yb, ya))
        matched = true;
    });
    if (!matched) ok = false;
  });
  return ok;
}

}  // namespace

bool verify_bisimulation(const Model& m1, const Model& m2, const Signature& rho,
                         const BisimRelation& beta) {
  require(beta.left_worlds() == m1.worlds() && beta.right_worlds() == m2.worlds(),
          "relation size mismatch");
  auto at1 = atom_bits(m1, rho), at2 = atom_bits(m2, rho);
  for (int x1 = 0; x1 < m1.worlds(); ++x1)
    for (int x2 = 0; x2 < m2.worlds(); ++x2) {
      if (!beta.contains(x1, x2)) continue;
      if (at1[x1] != at2[x2]) return false;
      if (!move_ok(m1, m2, beta, true, x1, x2)) return false;
      if (!move_ok(m2, m1, beta, false, x2, x1)) return false;
    }
  return true;
}

BisimRelation maximal_bisimulation(const Model& m1, const Model& m2,
                                   const Signature& rho) {
  auto at1 = atom_bits(m1, rho), at2 = atom_bits(m2, rho);
  BisimRelation beta(m1.worlds(), m2.worlds());
  for (int x1 = 0; x1 < m1.worlds(); ++x1)
    for (int x2 = 0; x2 < m2.worlds(); ++x2)
      if (at1[x1] == at2[x2]) beta.add(x1, x2);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x1 = 0; x1 < m1.worlds(); ++x1)
      for (int x2 = 0; x2 < m2.worlds(); ++x2) {
        if (!beta.contains(x1, x2)) continue;
        if (!move_ok(m1, m2, beta, true, x1, x2) ||
            !move_ok(m2, m1, beta, false, x2, x1)) {
          beta.remove(x1, x2);
          changed = true;
        }
      }
  }
  return beta;
}

bool bisimilar(const PointedModel& pm1, const PointedModel& pm2,
               const Signature& rho) {
  return maximal_bisimulation(pm1.model, pm2.model, rho)
      .contains(pm1.root, pm2.root);
}

std::vector<int> rho_classes(const Model& m, const Signature& rho) {
  BisimRelation beta = maximal_bisimulation(m, m, rho);
  const int n = m.worlds();
  std::vector<int> cls(n, -1);
  int next = 0;
  for (int x = 0; x < n; ++x) {
    if (cls[x] >= 0) continue;
    cls[x] = next;
    for (int y = x + 1; y < n; ++y)
      if (cls[y] < 0 && beta.contains(x, y)) cls[y] = next;
    ++next;
  }
  return cls;
}

std::string canonical_pointed_key(const Model& m, int root, const Signature& rho) {
  // Quotient by rho-bisimilarity, restricted to the part reachable from
  // the root class. On the minimal quotient, iterated successor-multiset
  // refinement separates every state, so sorting states by their final
  // refinement encoding is a canonical order.
  std::vector<int> cls = rho_classes(m, rho);
  int k = 1 + *std::max_element(cls.begin(), cls.end());
  std::vector<BitVec> atoms(k);
  {
    auto at = atom_bits(m, rho);
    for (int x = 0; x < m.worlds(); ++x) atoms[cls[x]] = at[x];
  }
  std::vector<std::vector<bool>> edge(k, std::vector<bool>(k, false));
  for (int x = 0; x < m.worlds(); ++x)
    m.frame().successors(x).for_each([&](int y) { edge[cls[x]][cls[y]] = true; });
  // reachable part from the root class
  std::vector<int> order;
  std::vector<bool> seen(k, false);
  std::vector<int> stack{cls[root]};
  seen[cls[root]] = true;
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    order.push_back(c);
    for (int d = 0; d < k; ++d)
      if (edge[c][d] && !seen[d]) {
        seen[d] = true;
        stack.push_back(d);
      }
  }
  std::sort(order.begin(), order.end());
  std::map<int, int> local;
  for (size_t i = 0; i < order.size(); ++i) local[order[i]] = (int)i;
  int q = (int)order.size();
  // Rank-based set refinement. Per-round ranks are derived from sorted
  // distinct encodings, so they are isomorphism-invariant; the full
  // rank history orders the classes canonically.
  std::vector<std::vector<int>> history(q);
  std::vector<int> rank(q);
  {
    std::vector<std::string> enc0(q);
    for (int i = 0; i < q; ++i) enc0[i] = atoms[order[i]].to_string();
    std::vector<std::string> distinct = enc0;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int i = 0; i < q; ++i) {
      rank[i] = (int)(std::lower_bound(distinct.begin(), distinct.end(), enc0[i]) -
                      distinct.begin());
      history[i].push_back(rank[i]);
    }
  }
  for (int round = 0; round < q; ++round) {
    std::vector<std::vector<int>> enc(q);
    for (int i = 0; i < q; ++i) {
      std::vector<int> succ;
      for (int j = 0; j < q; ++j)
        if (edge[order[i]][order[j]]) succ.push_back(rank[j]);
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      enc[i].push_back(rank[i]);
      enc[i].insert(enc[i].end(), succ.begin(), succ.end());
    }
    std::vector<std::vector<int>> distinct = enc;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int i = 0; i < q; ++i) {
      rank[i] = (int)(std::lower_bound(distinct.begin(), distinct.end(), enc[i]) -
                      distinct.begin());
      history[i].push_back(rank[i]);
    }
  }
  std::vector<int> perm(q);
  for (int i = 0; i < q; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return history[a] < history[b]; });
  // With all encodings distinct this is a full canonical order; encode
  // root position, atoms and adjacency under it.
  std::ostringstream key;
  std::vector<int> pos(q);
  for (int i = 0; i < q; ++i) pos[perm[i]] = i;
  key << q << "|r" << pos[local.at(cls[root])] << "|";
  for (int i = 0; i < q; ++i) key << atoms[order[perm[i]]].to_string() << ",";
  key << "|";
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j)
      key << (edge[order[perm[i]]][order[perm[j]]] ? '1' : '0');
    key << ";";
  }
  return key.str();
}

}  // namespace wk4
