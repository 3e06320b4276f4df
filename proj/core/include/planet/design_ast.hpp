#ifndef PLANET_DESIGN_AST_HPP
#define PLANET_DESIGN_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planet/variables.hpp"

namespace planet {

// ── DesignAst ───────────────────────────────────────────────────────────────
// Tree of design expressions exactly as written: method nodes chain onto a
// base design (fluent order preserved), cross/nest combine two subdesigns.
struct DesignAst;
using DesignPtr = std::shared_ptr<const DesignAst>;

struct DesignAst {
  enum class Kind {
    Empty,           // design()
    Counterbalance,  // .counterbalance(var)
    WithinSubjects,  // .within_subjects(var)
    BetweenSubjects, // .between_subjects(var)
    LimitPlans,      // .limit_plans(int)
    NumTrials,       // .num_trials(int)
    StartWith,       // .start_with(var, level)
    Multifact,       // .multifact(var, var, ...)
    Cross,           // cross(left, right)
    Nest,            // nest(inner, outer)
  };

  Kind kind = Kind::Empty;
  DesignPtr base;            // method nodes only
  DesignPtr first, second;   // Cross: left/right; Nest: inner/outer
  std::string variable;
  std::string level;              // StartWith
  std::vector<std::string> parts; // Multifact
  std::uint64_t count = 0;        // LimitPlans / NumTrials
};

bool ast_equal(const DesignAst& a, const DesignAst& b);

// Names of all variables a design expression references (method targets and
// multifact parts), in first-mention order, duplicates removed.
std::vector<std::string> variables_of(const DesignAst& ast);

// Builders mirroring the surface language; handy for tests and embedding.
namespace dsl {
DesignPtr design();
DesignPtr counterbalance(DesignPtr base, std::string var);
DesignPtr within_subjects(DesignPtr base, std::string var);
DesignPtr between_subjects(DesignPtr base, std::string var);
DesignPtr limit_plans(DesignPtr base, std::uint64_t n);
DesignPtr num_trials(DesignPtr base, std::uint64_t n);
DesignPtr start_with(DesignPtr base, std::string var, std::string level);
DesignPtr multifact(DesignPtr base, std::vector<std::string> parts);
DesignPtr cross(DesignPtr left, DesignPtr right);
DesignPtr nest(DesignPtr inner, DesignPtr outer);
}  // namespace dsl

// ── UnitsSpec ───────────────────────────────────────────────────────────────
// units(n): n independently assignable units.
// clusters(k, units(m)): k assignable clusters of m members each.
struct UnitsSpec {
  enum class Kind { Units, Clusters };
  Kind kind = Kind::Units;
  std::uint64_t count = 0;                // units, or cluster count
  std::uint64_t members_per_cluster = 0;  // Clusters only

  // Number of independently assignable rows.
  std::uint64_t assignable() const { return count; }

  bool operator==(const UnitsSpec&) const = default;
};

// ── Program ─────────────────────────────────────────────────────────────────
struct NamedDesign {
  std::string name;
  DesignPtr ast;
};

struct NamedUnits {
  std::string name;
  UnitsSpec spec;
};

struct AssignDirective {
  std::string units_name;
  std::string design_name;
  std::optional<std::uint64_t> seed;
};

struct Program {
  // Declared variables plus any compound variables introduced by multifact,
  // in first-appearance order.
  VariableSet variables;
  std::vector<NamedDesign> designs;
  std::vector<NamedUnits> units;
  AssignDirective assign;

  const NamedDesign* find_design(std::string_view name) const;
  const NamedUnits* find_units(std::string_view name) const;
  const NamedDesign& assigned_design() const;
  const NamedUnits& assigned_units() const;
};

bool program_equal(const Program& a, const Program& b);

}  // namespace planet

#endif  // PLANET_DESIGN_AST_HPP
