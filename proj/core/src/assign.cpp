#include "planet/assign.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "planet/error.hpp"
#include "planet/rng.hpp"

namespace planet {

UnitTable build_units(const UnitsSpec& spec) {
  if (spec.count == 0) fail(Errc::ArityError, "unit count must be positive");
  UnitTable table;
  table.rows.reserve(spec.count);
  if (spec.kind == UnitsSpec::Kind::Units) {
    for (std::uint64_t i = 1; i <= spec.count; ++i) {
      table.rows.push_back(UnitRow{i, {}});
    }
    return table;
  }
  if (spec.members_per_cluster == 0) {
    fail(Errc::ArityError, "cluster size must be positive");
  }
  std::uint64_t member = 1;
  for (std::uint64_t i = 1; i <= spec.count; ++i) {
    UnitRow row{i, {}};
    for (std::uint64_t k = 0; k < spec.members_per_cluster; ++k) {
      row.members.push_back(member++);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

AssignmentTable match(const UnitTable& units, const PlanMatrix& plans,
                      std::uint64_t seed, MatchPolicy policy) {
  const std::uint64_t n = units.size();
  const std::uint64_t p = plans.plans();
  if (n == 0) fail(Errc::ArityError, "no units to assign");
  if (p == 0) fail(Errc::ArityError, "no plans to assign");

  AssignmentTable out;
  Rng rng(mix_seed(seed, 0x6a6f696e));

  std::vector<std::uint64_t> column;
  column.reserve(n);
  const std::uint64_t per_plan = n / p;
  const std::uint64_t leftover = n % p;
  if (leftover != 0) {
    if (policy == MatchPolicy::Strict) {
      std::uint64_t next = (n / p + 1) * p;
      fail(Errc::UnevenPartition,
           std::to_string(n) + " units cannot be split evenly across " +
               std::to_string(p) + " plans; use " + std::to_string(next) +
               " units or --policy allow-uneven");
    }
    std::uint64_t next = (n / p + 1) * p;
    out.warnings.push_back(Warning{
        "uneven assignment: " + std::to_string(n) + " units across " +
        std::to_string(p) + " plans leaves " + std::to_string(leftover) +
        " plans with " + std::to_string(per_plan + 1) + " units and " +
        std::to_string(p - leftover) + " with " + std::to_string(per_plan) +
        "; the nearest balanced count is " + std::to_string(next) + " units"});
  }

  for (std::uint64_t id = 0; id < p; ++id) {
    for (std::uint64_t k = 0; k < per_plan; ++k) column.push_back(id);
  }
  if (leftover != 0) {
    // A seed-chosen subset of plans receives one extra unit each, keeping
    // multiplicities within one of each other.
    std::vector<std::uint64_t> ids(p);
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);
    column.insert(column.end(), ids.begin(), ids.begin() + leftover);
  }
  rng.shuffle(column);

  out.rows.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.rows.push_back(AssignmentRow{units.rows[i].unit_id, column[i]});
  }
  return out;
}

std::vector<std::vector<std::string>> emit_plan_table(const PlanMatrix& plans) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(plans.plans() + 1);
  std::vector<std::string> header{"plan_id"};
  for (std::uint64_t c = 1; c <= plans.trials(); ++c) {
    header.push_back("trial_" + std::to_string(c));
  }
  rows.push_back(std::move(header));
  for (std::uint64_t r = 0; r < plans.plans(); ++r) {
    std::vector<std::string> row{std::to_string(r)};
    for (std::uint64_t c = 0; c < plans.trials(); ++c) {
      row.push_back(condition_label(plans.variables(), plans.at(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<std::string>> emit_assignment_table(
    const UnitTable& units, const AssignmentTable& assignment) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(assignment.rows.size() + 1);
  rows.push_back({"unit_id", "members", "plan_id"});
  for (const auto& row : assignment.rows) {
    const UnitRow* unit = nullptr;
    for (const auto& u : units.rows) {
      if (u.unit_id == row.unit_id) {
        unit = &u;
        break;
      }
    }
    std::string members;
    if (unit) {
      for (std::uint64_t id : unit->members) {
        if (!members.empty()) members += ";";
        members += std::to_string(id);
      }
    }
    rows.push_back({std::to_string(row.unit_id), std::move(members),
                    std::to_string(row.plan_id)});
  }
  return rows;
}

}  // namespace planet
