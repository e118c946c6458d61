#pragma once

#include <functional>
#include <optional>

#include "wk4/bisim.hpp"
#include "wk4/kripke.hpp"

namespace wk4 {

enum class Logic { WK4, DL };

// A candidate model during enumeration: at most 64 worlds, successor
// sets and valuations as single words. Point colors pack the valuation
// bits (signature order) plus a reflexivity flag in the top bit.
struct EnumModel {
  const Signature* sig = nullptr;
  int n = 0;
  int num_vars = 0;
  std::vector<uint32_t> color;   // per world
  std::vector<uint64_t> succ;    // per world
  std::vector<uint64_t> var_mask;  // per variable

  bool reflexive(int x) const { return (color[x] >> num_vars) & 1u; }
  Model to_model() const;
};

struct EnumOptions {
  Signature sig;
  int min_worlds = 1;
  int max_worlds = 1;
  // Same-valuation points inside one cluster are bisimilar whatever
  // their reflexivity (an irreflexive point still sees its twin's
  // valuation), so one point per valuation suffices: absent,
  // irreflexive, or reflexive. This keeps the enumeration exhaustive
  // up to bisimulation and is the default for all engine searches.
  bool reduce_valuations = true;
  // Oracle mode: per-cluster multiplicity cap per color instead of the
  // valuation reduction; 0 disables capping entirely.
  int cap = 2;
  bool single_cluster = false;  // rooted DL frames are clusters
  // Colors allowed at the root world (variable bits only).
  uint32_t root_must_true = 0;
  uint32_t root_must_false = 0;
  // Colors allowed at every world the root sees, i.e. every non-root
  // world plus a reflexive root.
  uint32_t nonroot_must_true = 0;
  uint32_t nonroot_must_false = 0;
};

struct EnumStats {
  uint64_t visited = 0;
  bool stopped = false;
};

// Enumerates rooted weakly transitive pointed models (root = world 0)
// in a fixed canonical order: world count, cluster-poset shape,
// cluster contents (lex), root color. Exhaustive modulo isomorphism
// (and modulo bisimulation when cap > 0). The visitor returns false to
// stop the enumeration.
EnumStats enumerate_rooted_models(const EnumOptions& opt,
                                  const std::function<bool(const EnumModel&)>& visit);

// Formula compiled against a fixed signature for fast evaluation on
// EnumModels (whole-model bitmask evaluation).
class CompiledFormula {
public:
  CompiledFormula(const Formula& f, const Signature& sig);
  // Lazy evaluation at the root world with short-circuiting; the hot
  // path of every search.
  bool holds_at_root(const EnumModel& m) const;
  uint64_t eval(const EnumModel& m) const;  // world mask, all worlds

private:
  struct Op {
    Conn kind;
    int a = -1, b = -1;  // operand op indices
    int var = -1;        // signature index
  };
  bool eval_at(const EnumModel& m, int op, int x) const;
  std::vector<Op> ops_;
  mutable std::vector<uint64_t> buf_;
  mutable std::vector<int8_t> mark_;
};

// Literals forced at the root by the top-level conjunction of f,
// as color masks over sig; used to prefilter root colors.
std::pair<uint32_t, uint32_t> root_literal_masks(const Formula& f, const Signature& sig);

// Literals forced at every successor of the root: top-level conjuncts
// ~<>v and ~<>~v constrain all worlds a rooted model's root can see.
std::pair<uint32_t, uint32_t> successor_literal_masks(const Formula& f,
                                                      const Signature& sig);

// Sound unsatisfiability certificate: treat maximal <>-subformulas as
// fresh atoms; propositional unsatisfiability of the abstraction
// implies unsatisfiability over any frame class. Returns false when
// inconclusive (including when there are too many atoms to decide).
bool propositionally_unsat(const Formula& f);

struct SearchStats {
  uint64_t models = 0;
  double seconds = 0;
};

struct SatVerdict {
  enum class Status { Satisfiable, UnsatUpTo, UnsatCertified };
  Status status = Status::UnsatUpTo;
  std::optional<PointedModel> witness;
  int bound = 0;
  SearchStats stats;
};

// B_DL(f) = 2 * (number of <>-members of sub(f)) + 2.
int dl_size_bound(const Formula& f);

// Exhaustive search over rooted weakly transitive pointed models with
// at most `bound` worlds over sig(f). UnsatCertified only via the
// propositional certificate or the (unreachable) 2^(2^|sub f|) bound.
SatVerdict sat_wk4(const Formula& f, int bound);

// DL satisfiability: search over single clusters of size <= B_DL(f).
// Exhausting the bound certifies unsatisfiability.
SatVerdict sat_dl(const Formula& f);

struct ValidityVerdict {
  bool valid = false;
  bool certified = false;
  std::optional<PointedModel> counter;
  SearchStats stats;
};

ValidityVerdict is_valid(const Formula& phi, const Formula& psi, Logic logic,
                         int bound);

}  // namespace wk4
