#include "wk4/satsearch.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <unordered_map>

namespace wk4 {

Model EnumModel::to_model() const {
  Frame fr(n);
  for (int x = 0; x < n; ++x) {
    uint64_t s = succ[x];
    while (s) {
      int y = __builtin_ctzll(s);
      fr.add_edge(x, y);
      s &= s - 1;
    }
  }
  Model m(fr, *sig);
  for (int v = 0; v < num_vars; ++v) {
    uint64_t w = var_mask[v];
    while (w) {
      int x = __builtin_ctzll(w);
      m.valuation(v).set(x);
      w &= w - 1;
    }
  }
  return m;
}

namespace {

struct Shape {
  int k = 1;
  std::vector<uint32_t> above;            // strictly-above node masks
  std::vector<std::vector<int>> auts;     // node permutations, aut(0)=0
};

// Labeled strict posets on m elements as strictly-above masks.
void labeled_posets(int m, std::vector<std::vector<uint32_t>>& out) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.push_back({i, j});
  std::vector<uint32_t> above(m, 0);
  std::function<void(size_t)> rec = [&](size_t idx) {
    if (idx == pairs.size()) {
      for (int i = 0; i < m; ++i) {
        uint32_t a = above[i];
        while (a) {
          int j = __builtin_ctz(a);
          a &= a - 1;
          if (above[j] & ~above[i]) return;  // not transitive
        }
      }
      out.push_back(above);
      return;
    }
    auto [i, j] = pairs[idx];
    rec(idx + 1);
    above[i] |= 1u << j;
    rec(idx + 1);
    above[i] &= ~(1u << j);
    above[j] |= 1u << i;
    rec(idx + 1);
    above[j] &= ~(1u << i);
  };
  rec(0);
}

std::vector<uint32_t> permute_poset(const std::vector<uint32_t>& above,
                                    const std::vector<int>& perm) {
  int m = (int)above.size();
  std::vector<uint32_t> out(m, 0);
  for (int i = 0; i < m; ++i) {
    uint32_t a = above[i];
    while (a) {
      int j = __builtin_ctz(a);
      a &= a - 1;
      out[perm[i]] |= 1u << perm[j];
    }
  }
  return out;
}

// Canonical poset shapes on k clusters with node 0 strictly below all
// others, plus their automorphism groups.
const std::vector<Shape>& shapes_for(int k) {
  static std::map<int, std::vector<Shape>> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  require(k >= 1 && k <= 7, "exhaustive search supports at most 7 clusters");
  int m = k - 1;
  std::vector<std::vector<uint32_t>> labeled;
  labeled_posets(m, labeled);
  std::vector<int> perm(m);
  std::map<std::vector<uint32_t>, std::vector<uint32_t>> canon;  // key -> rep
  for (auto& p : labeled) {
    for (int i = 0; i < m; ++i) perm[i] = i;
    std::vector<uint32_t> best = p;
    do {
      std::vector<uint32_t> q = permute_poset(p, perm);
      if (q < best) best = q;
    } while (std::next_permutation(perm.begin(), perm.end()));
    canon.emplace(best, best);
  }
  std::vector<Shape> shapes;
  for (auto& [key, rep] : canon) {
    Shape s;
    s.k = k;
    s.above.assign(k, 0);
    uint32_t all_upper = 0;
    for (int i = 1; i < k; ++i) all_upper |= 1u << i;
    s.above[0] = all_upper;
    for (int i = 0; i < m; ++i) {
      uint32_t a = rep[i];
      while (a) {
        int j = __builtin_ctz(a);
        a &= a - 1;
        s.above[i + 1] |= 1u << (j + 1);
      }
    }
    for (int i = 0; i < m; ++i) perm[i] = i;
    if (m == 0) {
      s.auts.push_back({0});
    } else {
      do {
        if (permute_poset(rep, perm) == rep) {
          std::vector<int> full(k);
          full[0] = 0;
          for (int i = 0; i < m; ++i) full[i + 1] = perm[i] + 1;
          s.auts.push_back(full);
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    shapes.push_back(std::move(s));
  }
  return cache.emplace(k, std::move(shapes)).first->second;
}

struct Enumerator {
  const EnumOptions& opt;
  const std::function<bool(const EnumModel&)>& visit;
  int num_vars;
  uint32_t num_colors;
  EnumStats stats;
  EnumModel em;

  std::vector<std::vector<uint32_t>> contents;  // per node, sorted colors

  Enumerator(const EnumOptions& o, const std::function<bool(const EnumModel&)>& v)
      : opt(o), visit(v) {
    num_vars = (int)opt.sig.size();
    require(num_vars <= 20, "enumeration supports at most 20 variables");
    num_colors = 1u << (num_vars + 1);
    em.sig = &opt.sig;
    em.num_vars = num_vars;
    em.var_mask.assign(num_vars, 0);
  }

  bool run() {
    uint32_t var_bits = (1u << num_vars) - 1;
    for (int n = opt.min_worlds; n <= opt.max_worlds; ++n) {
      require(n <= 62, "enumeration supports at most 62 worlds");
      int kmax = opt.single_cluster ? 1 : n;
      for (int k = 1; k <= kmax; ++k) {
        for (const Shape& shape : shapes_for(k)) {
          contents.assign(k, {});
          // Root-color-major order: world 0's color is fixed before the
          // rest of the root cluster, so the root literal filter prunes
          // whole subtrees. Node 0's content is [rc, rest...] with the
          // rest sorted; every (cluster multiset, root member) pair is
          // produced exactly once.
          for (uint32_t rc = 0; rc < num_colors; ++rc) {
            uint32_t vars = rc & var_bits;
            if ((vars & opt.root_must_true) != opt.root_must_true) continue;
            if (vars & opt.root_must_false) continue;
            if (rc >> num_vars) {  // a reflexive root sees itself
              if ((vars & opt.nonroot_must_true) != opt.nonroot_must_true) continue;
              if (vars & opt.nonroot_must_false) continue;
            }
            int max_size = n - (k - 1);
            int min_size = k == 1 ? n : 1;
            std::vector<uint32_t> ms;
            for (int s = min_size; s <= max_size; ++s) {
              ms.assign(s, 0);
              ms[0] = rc;
              if (!multisets(shape, 0, n, s, 1, 0, ms)) return false;
            }
          }
        }
      }
    }
    return true;
  }

  bool assign_node(const Shape& shape, int node, int remaining) {
    int k = shape.k;
    if (node == k) {
      require(remaining == 0, "enumeration: composition mismatch");
      if (!lex_min_under_auts(shape)) return true;
      return emit(shape);
    }
    int nodes_left = k - node - 1;
    int max_size = remaining - nodes_left;
    int min_size = node == k - 1 ? remaining : 1;
    std::vector<uint32_t> ms;
    for (int s = min_size; s <= max_size; ++s) {
      ms.assign(s, 0);
      if (!multisets(shape, node, remaining, s, 0, 0, ms)) return false;
    }
    return true;
  }

  bool multisets(const Shape& shape, int node, int remaining, int size, int pos,
                 uint32_t min_color, std::vector<uint32_t>& ms) {
    if (pos == size) {
      contents[node] = ms;
      return assign_node(shape, node + 1, remaining - size);
    }
    uint32_t var_bits = (1u << num_vars) - 1;
    for (uint32_t c = min_color; c < num_colors; ++c) {
      uint32_t vars = c & var_bits;
      if ((vars & opt.nonroot_must_true) != opt.nonroot_must_true) continue;
      if (vars & opt.nonroot_must_false) continue;
      if (opt.reduce_valuations) {
        bool clash = false;
        for (int i = 0; i < pos; ++i)
          if ((ms[i] & var_bits) == (c & var_bits)) {
            clash = true;
            break;
          }
        if (clash) continue;
      } else if (opt.cap > 0) {
        int count = 0;
        for (int i = 0; i < pos; ++i)
          if (ms[i] == c) ++count;
        if (count >= opt.cap) continue;
      }
      ms[pos] = c;
      if (!multisets(shape, node, remaining, size, pos + 1, c, ms)) return false;
    }
    return true;
  }

  bool lex_min_under_auts(const Shape& shape) {
    if (shape.auts.size() <= 1) return true;
    for (const auto& aut : shape.auts) {
      bool identity = true;
      for (int i = 0; i < shape.k; ++i)
        if (aut[i] != i) {
          identity = false;
          break;
        }
      if (identity) continue;
      // image tuple has contents[i] at slot aut[i]; compare vs original
      int cmp = 0;
      for (int slot = 0; slot < shape.k && cmp == 0; ++slot) {
        const std::vector<uint32_t>* img = nullptr;
        for (int i = 0; i < shape.k; ++i)
          if (aut[i] == slot) {
            img = &contents[i];
            break;
          }
        if (*img < contents[slot])
          cmp = -1;
        else if (contents[slot] < *img)
          cmp = 1;
      }
      if (cmp < 0) return false;  // a strictly smaller relabeling exists
    }
    return true;
  }

  bool emit(const Shape& shape) {
    int k = shape.k;
    // world layout, node offsets
    std::vector<int> offset(k + 1, 0);
    for (int i = 0; i < k; ++i) offset[i + 1] = offset[i] + (int)contents[i].size();
    int n = offset[k];
    std::vector<uint64_t> node_mask(k, 0);
    for (int i = 0; i < k; ++i)
      for (int x = offset[i]; x < offset[i + 1]; ++x) node_mask[i] |= 1ULL << x;
    std::vector<uint64_t> above_mask(k, 0);
    for (int i = 0; i < k; ++i) {
      uint32_t a = shape.above[i];
      while (a) {
        int j = __builtin_ctz(a);
        a &= a - 1;
        above_mask[i] |= node_mask[j];
      }
    }
    // world colors: node 0 already lists the root world first
    em.n = n;
    em.color.assign(n, 0);
    int w = 0;
    for (int node = 0; node < k; ++node)
      for (uint32_t c : contents[node]) em.color[w++] = c;
    em.succ.assign(n, 0);
    for (int node = 0; node < k; ++node)
      for (int x = offset[node]; x < offset[node + 1]; ++x) {
        uint64_t s = (node_mask[node] & ~(1ULL << x)) | above_mask[node];
        if ((em.color[x] >> num_vars) & 1u) s |= 1ULL << x;
        em.succ[x] = s;
      }
    std::fill(em.var_mask.begin(), em.var_mask.end(), 0);
    for (int x = 0; x < n; ++x)
      for (int v = 0; v < num_vars; ++v)
        if ((em.color[x] >> v) & 1u) em.var_mask[v] |= 1ULL << x;
    ++stats.visited;
    if (!visit(em)) {
      stats.stopped = true;
      return false;
    }
    return true;
  }
};

}  // namespace

EnumStats enumerate_rooted_models(const EnumOptions& opt,
                                  const std::function<bool(const EnumModel&)>& visit) {
  Enumerator e(opt, visit);
  e.run();
  return e.stats;
}

CompiledFormula::CompiledFormula(const Formula& f, const Signature& sig) {
  std::unordered_map<const Formula::Node*, int> seen;
  std::function<int(const Formula&)> rec = [&](const Formula& g) -> int {
    auto hit = seen.find(g.raw());
    if (hit != seen.end()) return hit->second;
    Op op;
    op.kind = g.kind();
    switch (g.kind()) {
      case Conn::False:
      case Conn::True: break;
      case Conn::Var: {
        auto it = std::lower_bound(sig.begin(), sig.end(), g.var());
        require(it != sig.end() && *it == g.var(),
                "compile: variable outside signature: " + g.var());
        op.var = (int)(it - sig.begin());
        break;
      }
      case Conn::Not:
      case Conn::Diamond: op.a = rec(g.child()); break;
      case Conn::And:
        op.a = rec(g.left());
        op.b = rec(g.right());
        break;
    }
    ops_.push_back(op);
    int idx = (int)ops_.size() - 1;
    seen.emplace(g.raw(), idx);
    return idx;
  };
  rec(f);
  buf_.resize(ops_.size());
}

uint64_t CompiledFormula::eval(const EnumModel& m) const {
  uint64_t all = m.n >= 64 ? ~0ULL : ((1ULL << m.n) - 1);
  for (size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    switch (op.kind) {
      case Conn::False: buf_[i] = 0; break;
      case Conn::True: buf_[i] = all; break;
      case Conn::Var: buf_[i] = m.var_mask[op.var]; break;
      case Conn::Not: buf_[i] = ~buf_[op.a] & all; break;
      case Conn::And: buf_[i] = buf_[op.a] & buf_[op.b]; break;
      case Conn::Diamond: {
        uint64_t sub = buf_[op.a], out = 0;
        for (int x = 0; x < m.n; ++x)
          if (m.succ[x] & sub) out |= 1ULL << x;
        buf_[i] = out;
        break;
      }
    }
  }
  return buf_.back();
}

bool CompiledFormula::eval_at(const EnumModel& m, int op, int x) const {
  int8_t& memo = mark_[(size_t)op * m.n + x];
  if (memo >= 0) return memo != 0;
  const Op& o = ops_[op];
  bool r = false;
  switch (o.kind) {
    case Conn::False: break;
    case Conn::True: r = true; break;
    case Conn::Var: r = (m.var_mask[o.var] >> x) & 1ULL; break;
    case Conn::Not: r = !eval_at(m, o.a, x); break;
    case Conn::And: r = eval_at(m, o.a, x) && eval_at(m, o.b, x); break;
    case Conn::Diamond: {
      uint64_t s = m.succ[x];
      while (s) {
        int y = __builtin_ctzll(s);
        s &= s - 1;
        if (eval_at(m, o.a, y)) {
          r = true;
          break;
        }
      }
      break;
    }
  }
  memo = r ? 1 : 0;
  return r;
}

bool CompiledFormula::holds_at_root(const EnumModel& m) const {
  mark_.assign(ops_.size() * (size_t)m.n, -1);
  return eval_at(m, (int)ops_.size() - 1, 0);
}

std::pair<uint32_t, uint32_t> root_literal_masks(const Formula& f,
                                                 const Signature& sig) {
  uint32_t must_true = 0, must_false = 0;
  std::function<void(const Formula&, bool)> walk = [&](const Formula& g, bool pos) {
    if (g.kind() == Conn::And && pos) {
      walk(g.left(), true);
      walk(g.right(), true);
      return;
    }
    if (g.kind() == Conn::Not) {
      walk(g.child(), !pos);
      return;
    }
    if (g.kind() == Conn::Var) {
      auto it = std::lower_bound(sig.begin(), sig.end(), g.var());
      if (it == sig.end() || *it != g.var()) return;
      uint32_t bit = 1u << (it - sig.begin());
      (pos ? must_true : must_false) |= bit;
    }
  };
  walk(f, true);
  return {must_true, must_false};
}

std::pair<uint32_t, uint32_t> successor_literal_masks(const Formula& f,
                                                      const Signature& sig) {
  uint32_t must_true = 0, must_false = 0;
  std::function<void(const Formula&, bool)> walk = [&](const Formula& g, bool pos) {
    if (g.kind() == Conn::And && pos) {
      walk(g.left(), true);
      walk(g.right(), true);
      return;
    }
    if (g.kind() == Conn::Not) {
      walk(g.child(), !pos);
      return;
    }
    // a conjunct ~<>chi with chi a literal forces ~chi at every world
    // the root sees
    if (g.kind() == Conn::Diamond && !pos) {
      Formula chi = g.child();
      bool lit_pos = true;
      while (chi.kind() == Conn::Not) {
        lit_pos = !lit_pos;
        chi = chi.child();
      }
      if (chi.kind() != Conn::Var) return;
      auto it = std::lower_bound(sig.begin(), sig.end(), chi.var());
      if (it == sig.end() || *it != chi.var()) return;
      uint32_t bit = 1u << (it - sig.begin());
      (lit_pos ? must_false : must_true) |= bit;
    }
  };
  walk(f, true);
  return {must_true, must_false};
}

namespace {

void abstraction_atoms(const Formula& f,
                       std::vector<Formula>& atoms) {
  switch (f.kind()) {
    case Conn::Var:
    case Conn::Diamond: {
      for (auto& a : atoms)
        if (a == f) return;
      atoms.push_back(f);
      return;
    }
    case Conn::Not: abstraction_atoms(f.child(), atoms); return;
    case Conn::And:
      abstraction_atoms(f.left(), atoms);
      abstraction_atoms(f.right(), atoms);
      return;
    default: return;
  }
}

bool eval_abstraction(const Formula& f, const std::vector<Formula>& atoms,
                      uint32_t assignment) {
  switch (f.kind()) {
    case Conn::False: return false;
    case Conn::True: return true;
    case Conn::Not: return !eval_abstraction(f.child(), atoms, assignment);
    case Conn::And:
      return eval_abstraction(f.left(), atoms, assignment) &&
             eval_abstraction(f.right(), atoms, assignment);
    case Conn::Var:
    case Conn::Diamond:
      for (size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i] == f) return (assignment >> i) & 1u;
      throw InvariantError("abstraction atom not found");
  }
  return false;
}

}  // namespace

bool propositionally_unsat(const Formula& f) {
  std::vector<Formula> atoms;
  abstraction_atoms(f, atoms);
  if (atoms.size() > 20) return false;
  for (uint64_t a = 0; a < (1ULL << atoms.size()); ++a)
    if (eval_abstraction(f, atoms, (uint32_t)a)) return false;
  return true;
}

int dl_size_bound(const Formula& f) {
  SubClosure cl(f, f);
  return 2 * (int)cl.diamond_reps().size() + 2;
}

namespace {

uint64_t certification_threshold(const Formula& f) {
  SubClosure cl(f, f);
  return pow2_saturated(pow2_saturated((uint64_t)cl.member_count()));
}

SatVerdict run_sat(const Formula& f, int bound, bool dl) {
  require(bound >= 1, "sat: bound must be at least 1");
  auto t0 = std::chrono::steady_clock::now();
  SatVerdict v;
  v.bound = bound;
  if (propositionally_unsat(f)) {
    v.status = SatVerdict::Status::UnsatCertified;
    return v;
  }
  EnumOptions opt;
  opt.sig = signature_of(f);
  opt.min_worlds = 1;
  opt.max_worlds = bound;
  opt.cap = 2;
  opt.single_cluster = dl;
  std::tie(opt.root_must_true, opt.root_must_false) = root_literal_masks(f, opt.sig);
  std::tie(opt.nonroot_must_true, opt.nonroot_must_false) =
      successor_literal_masks(f, opt.sig);
  CompiledFormula cf(f, opt.sig);
  std::optional<PointedModel> found;
  EnumStats es = enumerate_rooted_models(opt, [&](const EnumModel& em) {
    if (cf.holds_at_root(em)) {
      found = PointedModel{em.to_model(), 0};
      return false;
    }
    return true;
  });
  v.stats.models = es.visited;
  if (found) {
    v.status = SatVerdict::Status::Satisfiable;
    v.witness = std::move(found);
  } else if (dl || (uint64_t)bound >= certification_threshold(f)) {
    v.status = SatVerdict::Status::UnsatCertified;
  } else {
    v.status = SatVerdict::Status::UnsatUpTo;
  }
  v.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

}  // namespace

SatVerdict sat_wk4(const Formula& f, int bound) { return run_sat(f, bound, false); }

SatVerdict sat_dl(const Formula& f) {
  return run_sat(f, dl_size_bound(f), true);
}

ValidityVerdict is_valid(const Formula& phi, const Formula& psi, Logic logic,
                         int bound) {
  Formula f = Formula::aand(phi, Formula::nnot(psi));
  SatVerdict sv = logic == Logic::DL ? sat_dl(f) : sat_wk4(f, bound);
  ValidityVerdict v;
  v.stats = sv.stats;
  if (sv.status == SatVerdict::Status::Satisfiable) {
    v.valid = false;
    v.counter = sv.witness;
  } else {
    v.valid = true;
    v.certified = sv.status == SatVerdict::Status::UnsatCertified;
  }
  return v;
}

}  // namespace wk4
