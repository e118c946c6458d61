#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wk4/util.hpp"

namespace wk4 {

enum class Conn : uint8_t { False, True, Var, Not, And, Diamond };

// Immutable modal formula over the primitive connectives
// false, true, variables, ~, &, <>. The derived connectives
// (|, ->, <->, []) are expanded at construction / parse time.
class Formula {
public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    Conn kind;
    std::string var;   // Conn::Var only
    NodePtr lhs, rhs;  // lhs for Not/Diamond/And, rhs for And
    size_t hash;
    int size;        // node count
    int modal_depth;
  };

  Formula() : node_(ff().node_) {}

  Conn kind() const { return node_->kind; }
  const std::string& var() const { return node_->var; }
  Formula child() const { return Formula(node_->lhs); }
  Formula left() const { return Formula(node_->lhs); }
  Formula right() const { return Formula(node_->rhs); }
  int size() const { return node_->size; }
  int modal_depth() const { return node_->modal_depth; }
  size_t hash() const { return node_->hash; }
  const Node* raw() const { return node_.get(); }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }
  // Total order: by size, then canonical print. Used for canonical
  // formula enumeration and stable container keys.
  bool operator<(const Formula& o) const;

  std::string to_string() const;           // minimal parentheses
  std::string to_string_parenthesized() const;

  // Constructors.
  static Formula ff();
  static Formula tt();
  static Formula var(const std::string& name);
  static Formula nnot(Formula f);
  static Formula aand(Formula a, Formula b);
  static Formula diamond(Formula f);
  // Derived, expanded to primitives.
  static Formula oor(Formula a, Formula b);        // ~(~a & ~b)
  static Formula implies(Formula a, Formula b);    // ~(a & ~b)
  static Formula iff(Formula a, Formula b);        // (a->b) & (b->a)
  static Formula box(Formula f);                   // ~<>~f
  static Formula diamond_plus(Formula f);          // f | <>f
  static Formula box_plus(Formula f);              // f & []f

  static Formula conj(const std::vector<Formula>& fs);  // empty -> true
  static Formula disj(const std::vector<Formula>& fs);  // empty -> false

private:
  explicit Formula(NodePtr n) : node_(std::move(n)) {}
  static Formula make(Conn k, std::string v, NodePtr l, NodePtr r);

  NodePtr node_;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const { return f.hash(); }
};

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int col, std::string msg, std::vector<std::string> expected);
  int line, col;
  std::vector<std::string> expected;
};

// Grammar: true false <ident> ~f f&g f|g f->g f<->g <>f []f (f)
// Precedence ~,<>,[] > & > | > -> > <->, -> right-associative.
Formula parse(const std::string& text);

// Ordered, duplicate-free set of variable names.
using Signature = std::vector<std::string>;

Signature make_signature(std::vector<std::string> vars);
Signature signature_of(const Formula& f);
Signature signature_union(const Signature& a, const Signature& b);
Signature shared_signature(const Formula& phi, const Formula& psi);
bool signature_contains(const Signature& sig, const std::string& v);
bool signature_subset(const Signature& a, const Signature& b);

// sub(phi,psi): every subformula of phi and psi together with its
// negation, with ~~chi identified with chi. Members are stored as
// "representatives" (top connective never ~); the member chi / ~chi is
// a (representative index, polarity) pair. Indices are stable: first
// occurrence in preorder over phi then psi.
class SubClosure {
public:
  SubClosure(Formula phi, Formula psi);

  struct Lit {
    int idx;
    bool pos;
    bool operator==(const Lit& o) const { return idx == o.idx && pos == o.pos; }
  };

  const Formula& phi() const { return phi_; }
  const Formula& psi() const { return psi_; }

  int rep_count() const { return (int)reps_.size(); }
  const Formula& rep(int i) const { return reps_[i]; }
  const std::vector<Formula>& reps() const { return reps_; }

  // Paper-style counts: |sub(phi,psi)|, |sub(phi)|, |sub(psi)| count
  // both polarities.
  int member_count() const { return 2 * rep_count(); }
  int phi_member_count() const { return 2 * phi_rep_count_; }
  int psi_member_count() const { return 2 * psi_rep_count_; }
  bool rep_in_phi(int i) const { return in_phi_[i]; }
  bool rep_in_psi(int i) const { return in_psi_[i]; }

  // Strip double negations; idx is -1 if the core is not a member.
  Lit normalize(const Formula& f) const;
  // Index of a representative (formula with non-~ top connective).
  std::optional<int> index_of(const Formula& f) const;
  bool is_member(const Formula& f) const { return normalize(f).idx >= 0; }

  // Indices of <>-prefixed representatives, ascending.
  const std::vector<int>& diamond_reps() const { return diamond_reps_; }
  // For a diamond representative <>chi: the literal of chi.
  Lit diamond_child(int rep_idx) const { return diamond_child_[rep_idx]; }

  // A type over this closure holds one bit per representative.
  bool type_contains(const BitVec& type, const Formula& f) const;

private:
  void collect(const Formula& f, bool from_phi);
  int add_rep(const Formula& f);

  Formula phi_, psi_;
  std::vector<Formula> reps_;
  std::vector<bool> in_phi_, in_psi_;
  int phi_rep_count_ = 0, psi_rep_count_ = 0;
  std::vector<int> diamond_reps_;
  std::vector<Lit> diamond_child_;  // indexed by rep index; valid for diamonds
};

}  // namespace wk4
