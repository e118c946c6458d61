#pragma once

#include <optional>
#include <string>

#include "wk4/satsearch.hpp"

namespace wk4 {

// Witness data for interpolant nonexistence: pointed models for phi and
// ~psi whose roots are rho-bisimilar for the shared signature.
struct WitnessPair {
  PointedModel phi_side;
  PointedModel psi_side;
  Signature rho;
  std::optional<Relation> beta;
};

struct WitnessCheck {
  bool ok = false;
  std::string reason;  // first failed condition, empty when ok
};

WitnessCheck check_witness(const WitnessPair& w, const Formula& phi,
                           const Formula& psi, Logic logic);
bool verify_witness(const WitnessPair& w, const Formula& phi, const Formula& psi,
                    Logic logic);

struct IepVerdict {
  enum class Status {
    NotValid,
    NoInterpolant,
    HasInterpolantCertified,
    HasInterpolantUpToBound,
  };
  Status status = Status::NotValid;
  std::optional<PointedModel> counter;  // NotValid
  std::optional<WitnessPair> witness;   // NoInterpolant
  int bound = 0;                        // HasInterpolantUpToBound
  SearchStats stats;
};

// Per-model size bound for the DL witness search:
// (2|sub phi|+1) + (2|sub psi|+1) + 2(2|sub phi| + 2|sub psi| + 2).
int b_iep(const Formula& phi, const Formula& psi);

// Complete DL decision: validity pre-check, then search over cluster
// pairs up to b_iep; exhaustion certifies interpolant existence via the
// polysize bisimilar model property.
IepVerdict decide_iep_dl(const Formula& phi, const Formula& psi);

// Bounded wK4 decision: searching pairs of rooted weakly transitive
// pointed models of at most `bound` worlds each. Exhaustion is only
// "up to bound" (certification would need a triple-exponential bound).
IepVerdict decide_iep_wk4(const Formula& phi, const Formula& psi, int bound);

// The two-stage polynomial extraction: per satisfiable closure member
// keep two satisfying points, then two realizers per shared rho-type.
WitnessPair shrink_dl_witness(const WitnessPair& w, const Formula& phi,
                              const Formula& psi);

// Bounded constructive cross-check: first rho-formula (by size, then
// canonical print) within the budget that interpolates; absence within
// the budget is inconclusive.
std::optional<Formula> enumerate_interpolants(const Formula& phi, const Formula& psi,
                                              Logic logic, int max_depth,
                                              int max_size, int validity_bound);

}  // namespace wk4
