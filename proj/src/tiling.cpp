#include "wk4/tiling.hpp"

#include <algorithm>
#include <set>

namespace wk4 {

void TilingInstance::validate() const {
  require(n >= 1, "tiling: n must be at least 1");
  require(!tiles.empty(), "tiling: tile set must be nonempty");
  std::set<std::string> names(tiles.begin(), tiles.end());
  require(names.size() == tiles.size(), "tiling: duplicate tile names");
  require((int)init.size() == n, "tiling: initial condition must have length n");
  auto in_range = [&](int t) { return t >= 0 && t < (int)tiles.size(); };
  for (int t : init) require(in_range(t), "tiling: initial tile out of range");
  for (auto& [a, b] : h)
    require(in_range(a) && in_range(b), "tiling: H pair out of range");
  for (auto& [a, b] : v)
    require(in_range(a) && in_range(b), "tiling: V pair out of range");
}

bool TilingInstance::h_ok(int a, int b) const {
  return std::find(h.begin(), h.end(), std::make_pair(a, b)) != h.end();
}
bool TilingInstance::v_ok(int a, int b) const {
  return std::find(v.begin(), v.end(), std::make_pair(a, b)) != v.end();
}

bool TorusSolution::solves(const TilingInstance& inst) const {
  if (n != inst.n || (int)cells.size() != side() * side()) return false;
  for (int i = 0; i < inst.n; ++i)
    if (at(i, 0) != inst.init[i]) return false;
  int s = side();
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i) {
      if (!inst.h_ok(at(i, j), at((i + 1) % s, j))) return false;
      if (!inst.v_ok(at(i, j), at(i, (j + 1) % s))) return false;
    }
  return true;
}

std::optional<TorusSolution> solve_tiling(const TilingInstance& inst) {
  inst.validate();
  require(inst.n <= 2, "solve_tiling: n must be at most 2");
  const int s = 1 << inst.n;
  const int cells = s * s;
  TorusSolution sol;
  sol.n = inst.n;
  sol.cells.assign(cells, -1);
  auto at = [&](int i, int j) { return sol.cells[j * s + i]; };

  std::function<bool(int)> place = [&](int pos) -> bool {
    if (pos == cells) return true;
    int j = pos / s, i = pos % s;
    for (int t = 0; t < (int)inst.tiles.size(); ++t) {
      if (j == 0 && i < inst.n && t != inst.init[i]) continue;
      if (i > 0 && !inst.h_ok(at(i - 1, j), t)) continue;
      if (i == s - 1 && !inst.h_ok(t, at(0, j))) continue;
      if (j > 0 && !inst.v_ok(at(i, j - 1), t)) continue;
      if (j == s - 1 && !inst.v_ok(t, at(i, 0))) continue;
      sol.cells[pos] = t;
      if (place(pos + 1)) return true;
      sol.cells[pos] = -1;
    }
    return false;
  };
  if (!place(0)) return std::nullopt;
  return sol;
}

std::string tile_var(const std::string& tile) { return "tile_" + tile; }
std::string level_var(int i) { return "lvl" + std::to_string(i); }
std::string a_var(int i) { return "a" + std::to_string(i); }
std::string b_var(int i) { return "b" + std::to_string(i); }

namespace {

Formula encode_bits(int value, int lo, int hi,
                    const std::function<Formula(int)>& var_at) {
  std::vector<Formula> bits;
  for (int k = lo; k < hi; ++k) {
    Formula v = var_at(k);
    bits.push_back(((value >> (k - lo)) & 1) ? v : Formula::nnot(v));
  }
  return Formula::conj(bits);
}

}  // namespace

Formula encode_position_a(const TilingInstance& inst, int i, int j) {
  auto v = [](int k) { return Formula::var(a_var(k)); };
  return Formula::aand(encode_bits(i, 0, inst.n, v),
                       encode_bits(j, inst.n, 2 * inst.n, v));
}

Formula encode_position_b(const TilingInstance& inst, int i, int j) {
  auto v = [](int k) { return Formula::var(b_var(k)); };
  return Formula::aand(encode_bits(i, 0, inst.n, v),
                       encode_bits(j, inst.n, 2 * inst.n, v));
}

namespace {

// b = a (+) 1 on the bit range [lo, hi), other range equal: either some
// pivot m has b_m & ~a_m with all lower bits flipped 1->0, or overflow
// (all bits were 1).
Formula successor_formula(int lo, int hi, int other_lo, int other_hi) {
  auto a = [](int k) { return Formula::var(a_var(k)); };
  auto b = [](int k) { return Formula::var(b_var(k)); };
  std::vector<Formula> cases;
  for (int m = lo; m < hi; ++m) {
    std::vector<Formula> parts{Formula::aand(b(m), Formula::nnot(a(m)))};
    for (int k = lo; k < m; ++k)
      parts.push_back(Formula::aand(Formula::nnot(b(k)), a(k)));
    for (int k = m + 1; k < hi; ++k) parts.push_back(Formula::iff(b(k), a(k)));
    cases.push_back(Formula::conj(parts));
  }
  std::vector<Formula> overflow;
  for (int m = lo; m < hi; ++m)
    overflow.push_back(Formula::aand(Formula::nnot(b(m)), a(m)));
  Formula change = Formula::oor(Formula::disj(cases), Formula::conj(overflow));
  std::vector<Formula> same;
  for (int k = other_lo; k < other_hi; ++k) same.push_back(Formula::iff(b(k), a(k)));
  return Formula::aand(change, Formula::conj(same));
}

}  // namespace

std::pair<Formula, Formula> generate_formulas(const TilingInstance& inst) {
  inst.validate();
  const int n = inst.n;
  const int levels = 2 * n;  // level indices 0..2n
  Formula e = Formula::var("e");
  Formula p = Formula::var("p");
  Formula q = Formula::var("q");
  auto lvl = [](int i) { return Formula::var(level_var(i)); };
  auto av = [](int i) { return Formula::var(a_var(i)); };
  auto tl = [&](int t) { return Formula::var(tile_var(inst.tiles[t])); };

  // phi, with the remaining shared-signature symbols added as
  // tautologies (v | ~v).
  Formula phi = Formula::conj(
      {e, Formula::aand(Formula::diamond(Formula::diamond(p)),
                        Formula::nnot(Formula::diamond(p))),
       Formula::box(Formula::implies(e, Formula::diamond(p)))});
  for (int t = 0; t < (int)inst.tiles.size(); ++t)
    phi = Formula::aand(phi, Formula::oor(tl(t), Formula::nnot(tl(t))));
  for (int k = 0; k < levels; ++k) {
    Formula bk = Formula::var(b_var(k));
    phi = Formula::aand(phi, Formula::oor(bk, Formula::nnot(bk)));
  }

  std::vector<Formula> chi;
  // tree generation
  {
    std::vector<Formula> excl;
    for (int i = 0; i <= levels; ++i)
      for (int j = i + 1; j <= levels; ++j)
        excl.push_back(Formula::nnot(Formula::aand(lvl(i), lvl(j))));
    chi.push_back(Formula::aand(lvl(0), Formula::box_plus(Formula::conj(excl))));
  }
  for (int i = 0; i < levels; ++i)
    chi.push_back(Formula::box_plus(Formula::implies(
        lvl(i), Formula::aand(Formula::diamond(Formula::aand(lvl(i + 1), av(i))),
                              Formula::diamond(Formula::aand(
                                  lvl(i + 1), Formula::nnot(av(i))))))));
  for (int i = 0; i < levels; ++i)
    for (int j = i + 1; j <= levels; ++j)
      chi.push_back(Formula::aand(
          Formula::box(Formula::implies(Formula::aand(lvl(i + 1), av(i)),
                                        Formula::box(Formula::implies(lvl(j), av(i))))),
          Formula::box(Formula::implies(
              Formula::aand(lvl(i + 1), Formula::nnot(av(i))),
              Formula::box(Formula::implies(lvl(j), Formula::nnot(av(i))))))));
  for (int i = 0; i <= levels; ++i)
    chi.push_back(Formula::box_plus(Formula::implies(lvl(i), e)));

  // grid generation
  std::vector<Formula> grid_parts;
  for (int k = 0; k < levels; ++k)
    grid_parts.push_back(Formula::iff(av(k), Formula::var(b_var(k))));
  Formula grid = Formula::conj(grid_parts);
  Formula not_e = Formula::nnot(e);
  {
    std::vector<Formula> any_tile;
    for (int t = 0; t < (int)inst.tiles.size(); ++t) any_tile.push_back(tl(t));
    chi.push_back(Formula::box(Formula::implies(
        lvl(levels), Formula::diamond(Formula::conj(
                         {not_e, grid, Formula::disj(any_tile)})))));
  }
  for (int i = 0; i < levels; ++i)
    chi.push_back(Formula::aand(
        Formula::box(Formula::implies(Formula::aand(lvl(levels), av(i)),
                                      Formula::box(Formula::implies(not_e, av(i))))),
        Formula::box(Formula::implies(
            Formula::aand(lvl(levels), Formula::nnot(av(i))),
            Formula::box(Formula::implies(not_e, Formula::nnot(av(i))))))));
  {
    std::vector<Formula> no_two;
    for (int t = 0; t < (int)inst.tiles.size(); ++t)
      for (int u = 0; u < (int)inst.tiles.size(); ++u)
        if (t != u) no_two.push_back(Formula::nnot(Formula::aand(tl(t), tl(u))));
    chi.push_back(Formula::box(Formula::conj(no_two)));
  }
  {
    std::vector<Formula> uniq;
    for (int t = 0; t < (int)inst.tiles.size(); ++t)
      uniq.push_back(Formula::implies(
          Formula::diamond(Formula::conj({not_e, grid, tl(t)})),
          Formula::box(Formula::implies(Formula::aand(not_e, grid), tl(t)))));
    chi.push_back(Formula::box(Formula::implies(lvl(levels), Formula::conj(uniq))));
  }

  // matching conditions via the succ_x / succ_y position encodings
  Formula succx = successor_formula(0, n, n, levels);
  Formula succy = successor_formula(n, levels, 0, n);
  auto matching = [&](const Formula& succ, bool horizontal) {
    std::vector<Formula> per_tile;
    for (int t = 0; t < (int)inst.tiles.size(); ++t) {
      std::vector<Formula> allowed;
      for (auto& [x, y] : horizontal ? inst.h : inst.v)
        if (x == t) allowed.push_back(tl(y));
      per_tile.push_back(Formula::implies(
          Formula::diamond(Formula::conj({not_e, grid, tl(t)})),
          Formula::box(Formula::implies(Formula::aand(not_e, succ),
                                        Formula::disj(allowed)))));
    }
    return Formula::box(Formula::implies(lvl(levels), Formula::conj(per_tile)));
  };
  chi.push_back(matching(succx, true));
  chi.push_back(matching(succy, false));

  // initial condition
  for (int i = 0; i < n; ++i)
    chi.push_back(Formula::box(Formula::implies(
        Formula::aand(lvl(levels), encode_position_a(inst, i, 0)),
        Formula::box(Formula::implies(Formula::aand(not_e, grid),
                                      tl(inst.init[i]))))));

  Formula psi = Formula::implies(
      Formula::conj(chi),
      Formula::implies(Formula::box(Formula::box(q)), q));
  return {phi, psi};
}

WitnessPair build_witness_from_solution(const TilingInstance& inst,
                                        const TorusSolution& sol) {
  require(sol.solves(inst), "build_witness_from_solution: solution is invalid");
  const int n = inst.n;
  const int side = 1 << n;
  const int grid_cells = side * side;
  auto [phi, psi] = generate_formulas(inst);
  Signature sigma = signature_union(signature_of(phi), signature_of(psi));

  // phi side: two-point cluster {r_phi irreflexive, x reflexive} with
  // 2^(2n) irreflexive successors w_{k,l}.
  int np = 2 + grid_cells;
  Frame fp(np);
  fp.add_edge(0, 1);
  fp.add_edge(1, 0);
  fp.add_edge(1, 1);
  auto w_index = [&](int k, int l) { return 2 + l * side + k; };
  for (int l = 0; l < side; ++l)
    for (int k = 0; k < side; ++k) {
      fp.add_edge(0, w_index(k, l));
      fp.add_edge(1, w_index(k, l));
    }
  Model mp(fp, sigma);
  mp.set("p", 0);
  mp.set("e", 0);
  mp.set("e", 1);
  for (int l = 0; l < side; ++l)
    for (int k = 0; k < side; ++k) {
      int w = w_index(k, l);
      mp.set(tile_var(inst.tiles[sol.at(k, l)]), w);
      for (int bit = 0; bit < n; ++bit)
        if ((k >> bit) & 1) mp.set(b_var(bit), w);
      for (int bit = 0; bit < n; ++bit)
        if ((l >> bit) & 1) mp.set(b_var(n + bit), w);
    }

  // psi side: full binary tree of depth 2n (irreflexive root, all other
  // nodes reflexive), leaves e_{i,j}, each with 2^(2n) irreflexive
  // successors u^{k,l}_{i,j}.
  const int depth = 2 * n;
  int tree_nodes = (1 << (depth + 1)) - 1;
  int nq = tree_nodes + grid_cells * grid_cells;
  auto tree_index = [&](int d, int prefix) { return (1 << d) - 1 + prefix; };
  auto leaf_linear = [&](int i, int j) { return j * side + i; };
  auto u_index = [&](int i, int j, int k, int l) {
    return tree_nodes + leaf_linear(i, j) * grid_cells + l * side + k;
  };
  Frame fq(nq);
  for (int d = 0; d <= depth; ++d)
    for (int prefix = 0; prefix < (1 << d); ++prefix) {
      int z = tree_index(d, prefix);
      if (d > 0) fq.add_edge(z, z);  // non-root tree nodes are reflexive
      // all strict descendants
      for (int d2 = d + 1; d2 <= depth; ++d2)
        for (int ext = 0; ext < (1 << (d2 - d)); ++ext)
          fq.add_edge(z, tree_index(d2, prefix | (ext << d)));
      // u-points below descendant-or-equal leaves
      for (int ext = 0; ext < (1 << (depth - d)); ++ext) {
        int leaf_bits = prefix | (ext << d);
        int i = leaf_bits & (side - 1), j = leaf_bits >> n;
        for (int l = 0; l < side; ++l)
          for (int k = 0; k < side; ++k) fq.add_edge(z, u_index(i, j, k, l));
      }
    }
  Model mq(fq, sigma);
  for (int x = 1; x < nq; ++x) mq.set("q", x);  // q everywhere but the root
  for (int d = 0; d <= depth; ++d)
    for (int prefix = 0; prefix < (1 << d); ++prefix) {
      int z = tree_index(d, prefix);
      mq.set("e", z);
      mq.set(level_var(d), z);
      for (int bit = 0; bit < d; ++bit)
        if ((prefix >> bit) & 1) mq.set(a_var(bit), z);
    }
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      for (int l = 0; l < side; ++l)
        for (int k = 0; k < side; ++k) {
          int u = u_index(i, j, k, l);
          int a_bits = leaf_linear(i, j);
          for (int bit = 0; bit < depth; ++bit)
            if ((a_bits >> bit) & 1) mq.set(a_var(bit), u);
          int b_bits = l * side + k;
          for (int bit = 0; bit < depth; ++bit)
            if ((b_bits >> bit) & 1) mq.set(b_var(bit), u);
          mq.set(tile_var(inst.tiles[sol.at(k, l)]), u);
        }

  WitnessPair w;
  w.phi_side = {std::move(mp), 0};
  w.psi_side = {std::move(mq), 0};
  w.rho = shared_signature(phi, psi);
  Relation beta;
  for (int c = 0; c < 2; ++c)
    for (int z = 0; z < tree_nodes; ++z) beta.push_back({c, z});
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      for (int l = 0; l < side; ++l)
        for (int k = 0; k < side; ++k)
          beta.push_back({w_index(k, l), u_index(i, j, k, l)});
  w.beta = std::move(beta);
  return w;
}

bool roundtrip_check(const TilingInstance& inst, int search_bound) {
  auto [phi, psi] = generate_formulas(inst);
  std::optional<TorusSolution> sol = solve_tiling(inst);
  if (sol) {
    WitnessPair w = build_witness_from_solution(inst, *sol);
    return verify_witness(w, phi, psi, Logic::WK4);
  }
  IepVerdict v = decide_iep_wk4(phi, psi, search_bound);
  return v.status == IepVerdict::Status::HasInterpolantUpToBound;
}

}  // namespace wk4
