#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wk4/iep.hpp"

namespace wk4 {

// Exponential torus tiling instance: tile set, horizontal/vertical
// matching relations, initial condition for the first row, exponent n
// (the torus is 2^n x 2^n, addition mod 2^n).
struct TilingInstance {
  std::vector<std::string> tiles;
  std::vector<std::pair<int, int>> h, v;  // tile index pairs
  std::vector<int> init;                  // tile indices, length n
  int n = 1;

  void validate() const;
  bool h_ok(int a, int b) const;
  bool v_ok(int a, int b) const;
};

struct TorusSolution {
  int n = 1;
  std::vector<int> cells;  // row-major: cell(i,j) = cells[j * side + i]

  int side() const { return 1 << n; }
  int at(int i, int j) const { return cells[j * side() + i]; }
  bool solves(const TilingInstance& inst) const;
};

// Exhaustive backtracking in row-major order, tiles tried in input
// order; first solution or none. Enforces n <= 2 (torus <= 16 cells).
std::optional<TorusSolution> solve_tiling(const TilingInstance& inst);

// Variable naming for the generated formulas.
std::string tile_var(const std::string& tile);
std::string level_var(int i);
std::string a_var(int i);
std::string b_var(int i);

// The reduction formulas: phi = e & (<><>p & ~<>p) & [](e -> <>p) padded
// with tautologies over the shared signature; psi = chi -> ([][]q -> q)
// with chi the tree/grid/matching/initial-condition conjunction.
std::pair<Formula, Formula> generate_formulas(const TilingInstance& inst);

// Position encodings over the a/b bit variables, LSB first; every one
// of the 2n bits is constrained.
Formula encode_position_a(const TilingInstance& inst, int i, int j);
Formula encode_position_b(const TilingInstance& inst, int i, int j);

// The explicit witness pair for a solved instance: a two-point cluster
// with 2^(2n) tile successors on the phi side, the marked full binary
// tree of depth 2n with per-leaf tile successors on the psi side, and
// the block bisimulation between them.
WitnessPair build_witness_from_solution(const TilingInstance& inst,
                                        const TorusSolution& sol);

// Solvable instances: build the witness and verify it directly.
// Unsolvable ones: run the bounded pair search and expect it not to
// find a witness (evidence at the given bound, not certification).
bool roundtrip_check(const TilingInstance& inst, int search_bound = 2);

}  // namespace wk4
