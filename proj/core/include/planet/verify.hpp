#ifndef PLANET_VERIFY_HPP
#define PLANET_VERIFY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planet/constraints.hpp"
#include "planet/plan_matrix.hpp"

namespace planet {

struct CellRef {
  std::uint64_t row = 0, col = 0;
  bool operator==(const CellRef&) const = default;
};

struct CheckResult {
  std::string name;
  std::string variable;  // empty when the check is not per-variable
  bool pass = false;
  std::string detail;
  std::optional<CellRef> first_violation;
};

// Purely descriptive summary of a plan table.
struct Classification {
  // variable name -> one of "between", "within-random", "counterbalanced",
  // "latin-square" (declaration order preserved by the map's input order).
  std::vector<std::pair<std::string, std::string>> per_variable;
  // Detected column blockings: variable constant within blocks of `width`
  // trials (widest such blocking, only reported when 1 < width < trials).
  struct Blocking {
    std::string variable;
    std::uint64_t width = 0;
  };
  std::vector<Blocking> blocks;
  // Classification of the full combined condition, when >= 2 variables.
  std::optional<std::string> combined;
};

struct Report {
  std::vector<CheckResult> checks;
  Classification classification;
  bool all_pass() const;
};

// ── Canonical property checks ───────────────────────────────────────────────

// Each level of `var` exactly once per row and once per column. Requires a
// square matrix with side = level count (Errc::ShapeMismatch otherwise).
CheckResult check_fisher_latin_square(const PlanMatrix& m, const std::string& var);

// Fisher check over the full combined condition code (the matrix viewed as a
// square over condition symbols).
CheckResult check_fisher_latin_square_combined(const PlanMatrix& m);

// Each level of `var` exactly plans/levels times in every column — position
// balance only, no row requirement. Requires levels | plans
// (Errc::DivisibilityError otherwise).
CheckResult check_apa_balance(const PlanMatrix& m, const std::string& var);

// Row balance and column balance together.
CheckResult check_counterbalance(const PlanMatrix& m, const std::string& var);

// Every plan exposes at least two distinct levels of `var`.
CheckResult check_within(const PlanMatrix& m, const std::string& var);

// `var` constant within every plan.
CheckResult check_between(const PlanMatrix& m, const std::string& var);

// First trial fixed to `level`.
CheckResult check_start_with(const PlanMatrix& m, const std::string& var,
                             const std::string& level);

// Every block of the tree is constant in its block variables.
CheckResult check_block_structure(const PlanMatrix& m, const BlockTree& blocks);

// No two plans identical.
CheckResult check_distinct_rows(const PlanMatrix& m);

// ── Structural verification ─────────────────────────────────────────────────

// Checks a matrix against a resolved design by walking the design tree:
// leaf constraints on leaf regions, cross decomposition on projections,
// block constancy plus per-block recursion for nests. Shape mismatches are
// reported as failing checks, not thrown.
std::vector<CheckResult> check_all(const PlanMatrix& m, const ResolvedDesign& rd);

// Descriptive classification of each variable plus block detection.
Classification classify(const PlanMatrix& m, const VariableSet& vs);

// check_all + classify in one report.
Report verify_against(const PlanMatrix& m, const ResolvedDesign& rd);

// Stable JSON rendering:
// { "checks": [ {name, variable, pass, detail, first_violation|null} ],
//   "classification": { "variables": {..}, "combined": .., "blocks": [..] } }
std::string report_to_json(const Report& report);

}  // namespace planet

#endif  // PLANET_VERIFY_HPP
