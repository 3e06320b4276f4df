#ifndef PLANET_SOLVER_HPP
#define PLANET_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>

#include "planet/constraints.hpp"
#include "planet/plan_matrix.hpp"

namespace planet {

// How nest nodes are materialized.
//   Kron:   children are solved separately and composed as a Kronecker
//           product; every block repeats the same inner matrix.
//   Scoped: the outer design is solved at block granularity and each block
//           receives an independently solved inner matrix. Strictly more
//           general; every Kron solution is also a Scoped solution.
enum class NestMode { Kron, Scoped };

struct SolveOptions {
  std::uint64_t seed = 0;
  NestMode nest_mode = NestMode::Kron;
  std::chrono::milliseconds timeout{60'000};
};

// Produces one plan matrix satisfying the design, by seeded backtracking
// search with balance-count propagation. Deterministic for a fixed
// (design, seed, options). The result is re-checked against the design's
// constraints before it is returned.
// Throws Errc::Unsatisfiable, Errc::Timeout, Errc::DesignTooLarge.
PlanMatrix solve(const ResolvedDesign& rd, const SolveOptions& options = {});

// Row-pairwise superimposition: result row (i, j) — pairs in lexicographic
// order — superimposes left row i on right row j, column by column.
// Requires equal trial counts and disjoint variables.
PlanMatrix solve_cross(const PlanMatrix& left, const PlanMatrix& right);

// Literal Kronecker composition: result row (i_out, i_in), block column s,
// inner column c holds outer[i_out][s] combined with inner[i_in][c].
// Requires disjoint variables.
PlanMatrix solve_nest_kron(const PlanMatrix& inner, const PlanMatrix& outer);

struct EnumerateOptions {
  std::optional<std::uint64_t> limit;  // stop after this many matrices
  NestMode nest_mode = NestMode::Kron;
  std::uint64_t cell_cap = 64;  // guard for unbounded enumeration
};

// Yields every satisfying matrix exactly once, in row-major lexicographic
// order of cell codes. The sink returns false to stop early. Leaf designs
// stream; composite designs are materialized and sorted, so they are always
// subject to the cell cap. Throws Errc::DesignTooLarge when the design
// exceeds the cap and no limit allows streaming.
void enumerate_plans(const ResolvedDesign& rd, const EnumerateOptions& options,
                     const std::function<bool(const PlanMatrix&)>& sink);

// Exact satisfying-matrix count. Composite designs are counted by
// composition (product rules) without materializing matrices.
std::uint64_t count_plans(const ResolvedDesign& rd,
                          const EnumerateOptions& options = {});

}  // namespace planet

#endif  // PLANET_SOLVER_HPP
