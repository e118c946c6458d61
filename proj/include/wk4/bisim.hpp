#pragma once

#include <string>
#include <vector>

#include "wk4/kripke.hpp"

namespace wk4 {

using Relation = std::vector<std::pair<int, int>>;

// Relation between the worlds of two models, as a W1 x W2 bit matrix.
class BisimRelation {
public:
  BisimRelation() = default;
  BisimRelation(int n1, int n2) : n1_(n1), n2_(n2), mat_(n1, n2) {}

  int left_worlds() const { return n1_; }
  int right_worlds() const { return n2_; }
  bool contains(int x1, int x2) const { return mat_.get(x1, x2); }
  void add(int x1, int x2) { mat_.set(x1, x2); }
  void remove(int x1, int x2) { mat_.set(x1, x2, false); }
  int pair_count() const;
  Relation pairs() const;

  static BisimRelation from_pairs(int n1, int n2, const Relation& pairs);
  bool operator==(const BisimRelation& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && mat_ == o.mat_;
  }

private:
  int n1_ = 0, n2_ = 0;
  BitMatrix mat_;
};

// (atom) and both directions of (move) for every related pair.
bool verify_bisimulation(const Model& m1, const Model& m2, const Signature& rho,
                         const BisimRelation& beta);

// Greatest fixpoint: start from all (atom)-compatible pairs and prune
// (move) violations to exhaustion. The result is the union of all
// rho-bisimulations between m1 and m2.
BisimRelation maximal_bisimulation(const Model& m1, const Model& m2,
                                   const Signature& rho);

bool bisimilar(const PointedModel& pm1, const PointedModel& pm2,
               const Signature& rho);

// rho-bisimilarity equivalence classes within one model (class ids
// ordered by least member world).
std::vector<int> rho_classes(const Model& m, const Signature& rho);

// Canonical key of the rho-bisimulation-minimal quotient of a pointed
// model: two pointed models are rho-bisimilar iff their keys are equal.
std::string canonical_pointed_key(const Model& m, int root, const Signature& rho);

}  // namespace wk4
