#pragma once

#include <optional>

#include "wk4/bisim.hpp"
#include "wk4/kripke.hpp"

namespace wk4 {

// Union-find result of the chain-equivalence between clusters: clusters
// are merged whenever some pair of their points shares a rho-type
// (rho-bisimilarity class), closed under chains.
struct ClusterEquivalence {
  std::vector<int> class_of_cluster;           // cluster id -> class id
  std::vector<std::vector<int>> class_members; // class id -> cluster ids
  std::vector<std::vector<int>> class_types;   // T_[C]: rho-class ids, sorted
  std::vector<std::vector<BitVec>> class_atoms;  // AT_[C]: atom sets, sorted

  int count() const { return (int)class_members.size(); }
};

// Cluster-type: map from the class atom domain to sets of phi,psi-types
// realized in the cluster under each atom. Canonical (sorted) form, so
// structural equality is set identity.
struct ClusterType {
  std::vector<BitVec> domain;                // sorted atoms
  std::vector<std::vector<BitVec>> values;   // per atom: sorted type sets

  bool operator==(const ClusterType& o) const {
    return domain == o.domain && values == o.values;
  }
  bool operator<(const ClusterType& o) const {
    if (domain != o.domain) return domain < o.domain;
    return values < o.values;
  }
};

struct Mosaic {
  std::vector<BitVec> domain;
  std::vector<int> taus;  // sorted cluster-type ids

  bool operator==(const Mosaic& o) const {
    return domain == o.domain && taus == o.taus;
  }
  bool operator<(const Mosaic& o) const {
    if (domain != o.domain) return domain < o.domain;
    return taus < o.taus;
  }
};

struct FiltrationReport {
  int classes = 0;
  int cluster_types = 0;
  int mosaics = 0;
  int quadruples = 0;
  uint64_t cluster_type_bound = 0;  // 2^(|rho| + 2^(|sub|+|rho|)), saturated
  uint64_t mosaic_bound = 0;        // 2^(2^(2^|sub|)), saturated
  bool within_bounds = false;
};

struct FiltrationResult {
  Model model;  // the rebuilt model over sigma
  struct Quad {
    BitVec type;   // phi,psi-type bits
    BitVec atom;   // rho-index
    int tau = 0;   // cluster-type id
    int mosaic = 0;
  };
  std::vector<Quad> quads;
  std::vector<int> world_map;  // input world -> quadruple index
  Relation beta;               // same rho-index and mosaic
  int designated_phi = 0, designated_psi = 0;
  FiltrationReport report;
};

// All machinery shared by the filtration operations for one
// (model, phi, psi) triple. Rho-types are rho-bisimilarity classes.
class FiltrationContext {
public:
  FiltrationContext(Model m, Formula phi, Formula psi);

  const Model& model() const { return m_; }
  const SubClosure& closure() const { return cl_; }
  const Signature& rho() const { return rho_; }
  const ClusterDecomposition& decomposition() const { return cd_; }
  const ClusterEquivalence& equivalence() const { return eq_; }

  const BitVec& type_of(int world) const { return types_.world_type[world]; }
  const BitVec& atom_of(int world) const { return atoms_[world]; }
  int rho_class_of(int world) const { return rho_class_[world]; }
  const BitVec& rho_class_atom(int cls) const { return class_atom_[cls]; }

  bool rho_maximal(int cluster) const;
  // Some rho-maximal D with C R^r D and t(C) contained in t(D); least
  // cluster id among the candidates.
  int find_rho_maximal_successor(int cluster) const;
  // Whether <>t is contained in t: a realizer has a successor in its
  // own rho-class.
  bool diamond_subset(int rho_class) const;

  bool type_arrow(const BitVec& t1, const BitVec& t2) const;
  bool cluster_type_arrow(int tau1, int tau2) const;
  bool mosaic_arrow(int m1, int m2) const;

  int tau_count() const { return (int)taus_.size(); }
  const ClusterType& tau(int id) const { return taus_[id]; }
  int tau_of_cluster(int cluster) const { return tau_of_cluster_[cluster]; }
  int mosaic_count() const { return (int)mosaics_.size(); }
  const Mosaic& mosaic(int id) const { return mosaics_[id]; }
  int mosaic_of_class(int cls) const { return mosaic_of_class_[cls]; }
  int mosaic_of_cluster(int c) const {
    return mosaic_of_class_[eq_.class_of_cluster[c]];
  }
  const std::vector<BitVec>& irr_set(int mosaic_id) const {
    return irr_sets_[mosaic_id];
  }

  FiltrationResult filtrate(int designated_phi, int designated_psi) const;

private:
  // full type set of the cluster's own points (union over the domain)
  const std::vector<BitVec>& tau_type_set(int tau_id) const {
    return tau_type_sets_[tau_id];
  }

  Model m_;
  SubClosure cl_;
  Signature sigma_, rho_;
  TypeTable types_;
  std::vector<BitVec> atoms_;
  std::vector<int> rho_class_;
  std::vector<BitVec> class_atom_;   // per rho-class
  std::vector<bool> class_diamond_;  // per rho-class: <>t subset t
  ClusterDecomposition cd_;
  ClusterEquivalence eq_;
  std::vector<ClusterType> taus_;
  std::vector<std::vector<BitVec>> tau_type_sets_;
  std::vector<int> tau_of_cluster_;
  std::vector<Mosaic> mosaics_;
  std::vector<int> mosaic_of_class_;
  std::vector<std::vector<BitVec>> irr_sets_;
  std::vector<std::vector<bool>> tau_arrow_, mosaic_arrow_;
};

// Convenience wrappers mirroring the individual operations.
ClusterEquivalence cluster_equivalence(const Model& m, const Signature& rho);
FiltrationResult filtrate(const Model& m, const Formula& phi, const Formula& psi,
                          int designated_phi, int designated_psi);

}  // namespace wk4
