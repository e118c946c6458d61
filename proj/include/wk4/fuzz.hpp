#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wk4/filtration.hpp"
#include "wk4/iep.hpp"

namespace wk4 {

struct FuzzOptions {
  std::string module = "filtration";  // formula|kripke|bisim|satsearch|filtration
  uint64_t seed = 1;
  int iterations = 1000;
  int max_worlds = 8;
  int max_vars = 3;
  int max_depth = 3;
  int workers = 1;
};

struct FuzzReport {
  int iterations = 0;
  int violations = 0;
  std::vector<std::string> messages;  // first few violation descriptions
  double seconds = 0;
};

FuzzReport run_fuzz(const FuzzOptions& opt);

// Seeded generators shared with the test suites.
Formula random_formula(std::mt19937_64& rng, int depth, const Signature& vars);
Model random_wtrans_model(std::mt19937_64& rng, int max_worlds, const Signature& vars);
Model random_symmetric_model(std::mt19937_64& rng, int max_worlds,
                             const Signature& vars);

// One filtration lemma check over one random scenario; returns a
// nonempty message on violation.
std::string check_filtration_properties(std::mt19937_64& rng, int max_worlds,
                                        int max_vars, int max_depth);

}  // namespace wk4
