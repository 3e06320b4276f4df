#ifndef PLANET_ASSIGN_HPP
#define PLANET_ASSIGN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "planet/design_ast.hpp"
#include "planet/plan_matrix.hpp"

namespace planet {

// One assignable unit. Cluster units list their member ids (numbered
// globally from 1); singleton units have an empty member list.
struct UnitRow {
  std::uint64_t unit_id = 0;
  std::vector<std::uint64_t> members;
  bool operator==(const UnitRow&) const = default;
};

struct UnitTable {
  std::vector<UnitRow> rows;
  std::uint64_t size() const { return rows.size(); }
};

struct AssignmentRow {
  std::uint64_t unit_id = 0;
  std::uint64_t plan_id = 0;  // 0-based row index into the plan matrix
  bool operator==(const AssignmentRow&) const = default;
};

struct Warning {
  std::string message;
};

struct AssignmentTable {
  std::vector<AssignmentRow> rows;
  std::vector<Warning> warnings;
};

enum class MatchPolicy { Strict, AllowUneven };

// Unit ids are consecutive from 1.
UnitTable build_units(const UnitsSpec& spec);

// Joins units to plans: the plan-id column (each plan repeated N/p times) is
// shuffled with the seed and joined to units by row number.
//   Strict:      N must be a multiple of p, else Errc::UnevenPartition.
//   AllowUneven: plan multiplicities differ by at most one — a random subset
//                of plans receives the extra unit — and a warning naming the
//                imbalance is attached to the result.
AssignmentTable match(const UnitTable& units, const PlanMatrix& plans,
                      std::uint64_t seed, MatchPolicy policy);

// Plan table rows: header "plan_id,trial_1,...,trial_T", then one row per
// plan with "-"-joined level names per trial.
std::vector<std::vector<std::string>> emit_plan_table(const PlanMatrix& plans);

// Assignment table rows: header "unit_id,members,plan_id"; members are
// ";"-joined ids, empty for singleton units.
std::vector<std::vector<std::string>> emit_assignment_table(
    const UnitTable& units, const AssignmentTable& assignment);

}  // namespace planet

#endif  // PLANET_ASSIGN_HPP
