#ifndef PLANET_CONSTRAINTS_HPP
#define PLANET_CONSTRAINTS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planet/design_ast.hpp"
#include "planet/variables.hpp"

namespace planet {

struct Shape {
  std::uint64_t plans = 0;
  std::uint64_t trials = 0;
  bool operator==(const Shape&) const = default;
};

// ── Constraint ──────────────────────────────────────────────────────────────
// Constraints are scoped to a rectangular grid of "tiles": `rows` x `cols`
// tiles starting at base cell (row0, col0), each tile spanning
// tile_h x tile_w base cells. Plain cell scopes use tile_h = tile_w = 1.
// Nesting introduces tile sizes > 1: an outer design's constraints hold at
// block granularity, where every tile is constant in the outer variables
// (guaranteed by an accompanying BlockConstant constraint), so a tile's
// value is read from its top-left cell.
struct Region {
  std::uint64_t row0 = 0, col0 = 0;
  std::uint64_t rows = 0, cols = 0;
  std::uint64_t tile_h = 1, tile_w = 1;
};

enum class ConstraintKind {
  RowBalance,        // each level of `variable` appears cols/levels times per tile-row
  ColumnBalance,     // each level appears rows/levels times per tile-column
  FixedFirstColumn,  // first tile-column fixed to `level`
  DistinctRows,      // no two tile-rows agree on all `distinct_vars` projections
  ConstantInRow,     // `variable` constant along each tile-row
  BlockConstant,     // `variable` constant within every tile
};

struct Constraint {
  ConstraintKind kind;
  std::string variable;                    // empty for DistinctRows
  std::string level;                       // FixedFirstColumn only
  std::vector<std::string> distinct_vars;  // DistinctRows only; empty = all
  Region scope;
};

const char* constraint_kind_name(ConstraintKind kind);

// ── BlockTree ───────────────────────────────────────────────────────────────
// Records the block partitions nesting introduces: a region of rows x cols
// cells split into a grid_rows x grid_cols grid of equal blocks, each
// constant in `block_vars`. `outer` describes structure of the block grid
// itself, `inner` the structure inside each block. Leaf designs have a
// trivial tree (grid 1x1, no block vars).
struct BlockTree {
  std::uint64_t rows = 1, cols = 1;
  std::uint64_t grid_rows = 1, grid_cols = 1;
  std::vector<std::string> block_vars;
  std::shared_ptr<const BlockTree> outer;
  std::shared_ptr<const BlockTree> inner;

  bool trivial() const { return grid_rows == 1 && grid_cols == 1 && block_vars.empty(); }
};

// ── ResolvedNode ────────────────────────────────────────────────────────────
// Structural mirror of the design AST after semantic resolution. The solver
// and the verifier both walk this tree; leaves carry concrete constraints.
struct ResolvedNode {
  enum class Kind { Leaf, Cross, Nest };
  enum class Role { Counterbalance, Within, Between };

  struct LeafVar {
    std::size_t var_index;  // into `vars`
    Role role;
  };

  Kind kind = Kind::Leaf;
  Shape shape;
  VariableSet vars;  // governing variables, program declaration order

  // Leaf payload.
  std::vector<LeafVar> leaf_vars;
  std::vector<Constraint> local;  // full-grid scope, tile 1x1
  bool distinct_rows = false;
  bool per_unit_default = false;    // plan count defaulted to one per unit
  std::uint64_t feasible_rows = 0;  // count of distinct rows satisfying the
                                    // per-row constraints
  // Composite payload. Cross: first=left, second=right.
  // Nest: first=inner, second=outer.
  std::shared_ptr<const ResolvedNode> first, second;
};

// ── ResolvedDesign ──────────────────────────────────────────────────────────
struct ResolvedDesign {
  Shape shape;
  VariableSet vars;
  std::shared_ptr<const ResolvedNode> root;
  // Flattened scoped constraints over the full matrix. Available whenever
  // every cross in the tree combines plain leaves (always true for designs
  // the surface language produces today); empty otherwise, in which case the
  // structural checker in verify.hpp remains authoritative.
  std::vector<Constraint> constraints;
  BlockTree blocks;
  // True when the design's plan count was defaulted to "one plan per unit"
  // (within-subjects designs without an explicit limit). The shape then
  // already reflects the unit count passed at resolve time.
  bool plans_per_unit = false;
};

struct ResolveOptions {
  // Materializes "one plan per unit" defaults. Absent: such designs resolve
  // to a single plan.
  std::optional<std::uint64_t> unit_count;
};

// Resolves a design AST into a concrete matrix shape plus scoped constraints.
// Throws planet::Error with Errc::UnsatisfiableShape, MissingTrialCount,
// CrossArityMismatch, VariableOverlap, PartialNestingUnsupported or
// UnsupportedMethod.
ResolvedDesign resolve(const DesignAst& ast, const VariableSet& vs,
                       const ResolveOptions& options = {});

// Convenience: resolves the assigned design of a parsed program, using the
// program's unit count for per-unit plan defaults.
ResolvedDesign resolve_program(const Program& program,
                               const std::optional<std::uint64_t>& unit_count_override = {});

// Shape composition rules, exposed for direct use and testing.
Shape shape_of_cross(const ResolvedDesign& left, const ResolvedDesign& right);
Shape shape_of_nest(const ResolvedDesign& inner, const ResolvedDesign& outer);

}  // namespace planet

#endif  // PLANET_CONSTRAINTS_HPP
