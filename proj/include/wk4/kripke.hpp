#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wk4/formula.hpp"
#include "wk4/util.hpp"

namespace wk4 {

// Finite frame (W, R); worlds are 0..n-1, R kept as per-world successor
// bit rows for O(1) edge tests.
class Frame {
public:
  Frame() = default;
  explicit Frame(int n) : n_(n), rows_(n, BitVec(n)) {}

  int size() const { return n_; }
  bool edge(int x, int y) const { return rows_[x].get(y); }
  void add_edge(int x, int y) { rows_[x].set(y); }
  void remove_edge(int x, int y) { rows_[x].set(y, false); }
  const BitVec& successors(int x) const { return rows_[x]; }

  bool operator==(const Frame& o) const { return n_ == o.n_ && rows_ == o.rows_; }

private:
  int n_ = 0;
  std::vector<BitVec> rows_;
};

class Model {
public:
  Model() = default;
  Model(Frame frame, Signature sig)
      : frame_(std::move(frame)), sig_(std::move(sig)),
        val_(sig_.size(), BitVec(frame_.size())) {}

  const Frame& frame() const { return frame_; }
  Frame& frame() { return frame_; }
  int worlds() const { return frame_.size(); }
  const Signature& signature() const { return sig_; }

  int var_index(const std::string& v) const;  // -1 if absent
  bool holds(int var_idx, int world) const { return val_[var_idx].get(world); }
  void set(const std::string& v, int world, bool value = true);
  const BitVec& valuation(int var_idx) const { return val_[var_idx]; }
  BitVec& valuation(int var_idx) { return val_[var_idx]; }

  // Same frame/worlds, signature extended to cover `extra` (new
  // variables valued empty).
  Model with_signature(const Signature& extra) const;

  bool operator==(const Model& o) const {
    return frame_ == o.frame_ && sig_ == o.sig_ && val_ == o.val_;
  }

private:
  Frame frame_;
  Signature sig_;
  std::vector<BitVec> val_;
};

struct PointedModel {
  Model model;
  int root = 0;
};

bool is_weakly_transitive(const Frame& f);
Frame weak_transitive_closure(const Frame& f);
bool is_symmetric(const Frame& f);
bool is_dl_frame(const Frame& f);

// Cluster decomposition of a weakly transitive frame. Cluster ids are
// ordered by least member world.
struct ClusterDecomposition {
  std::vector<int> cluster_of;              // world -> cluster id
  std::vector<std::vector<int>> members;    // cluster id -> worlds
  std::vector<bool> degenerate;             // single irreflexive point
  BitMatrix rs;                             // strict order R^s on clusters

  int count() const { return (int)members.size(); }
  bool rr(int c, int d) const { return c == d || rs.get(c, d); }
  // CRx / CR^s x in the sense of cluster-to-world reachability.
  bool cluster_sees(const Frame& f, int c, int world) const;
};

ClusterDecomposition clusters(const Frame& f);  // rejects non-weakly-transitive

bool is_rooted_at(const Frame& f, int r);

// Evaluates f at every world; memo shared across calls via the cache.
using EvalCache = std::unordered_map<const Formula::Node*, BitVec>;
const BitVec& eval_worlds(const Model& m, const Formula& f, EvalCache& cache);
bool model_check(const Model& m, int world, const Formula& f);

// Truth of every closure representative at every world.
struct TypeTable {
  std::vector<BitVec> rep_truth;   // per representative: world set
  std::vector<BitVec> world_type;  // per world: bits over representatives
};
TypeTable phi_psi_types(const Model& m, const SubClosure& cl);
BitVec phi_psi_type(const Model& m, int world, const SubClosure& cl);

// Atomic rho-type of a world: bits over rho's variable order.
BitVec atomic_type(const Model& m, int world, const Signature& rho);

struct DescriptiveReport {
  bool differentiated = true;
  bool tight = true;
  std::vector<std::pair<int, int>> dif_violations;  // bisimilar distinct pairs
  std::vector<std::pair<int, int>> ref_violations;  // missing edges
};
DescriptiveReport check_descriptive_finite(const Model& m);

// Submodel generated by `root`: root plus its R-successors (weak
// transitivity makes that reachability-closed). Returns the pointed
// submodel and the world map old->new (-1 when dropped).
std::pair<PointedModel, std::vector<int>> generated_submodel(const Model& m, int root);

// Disjoint union; the second model's worlds are shifted by m1.worlds().
Model disjoint_union(const Model& m1, const Model& m2);

std::string to_dot(const Model& m, const std::vector<std::pair<int, int>>& dashed = {},
                   const std::vector<std::string>& world_labels = {});

}  // namespace wk4
