#ifndef PLANET_PLAN_MATRIX_HPP
#define PLANET_PLAN_MATRIX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "planet/variables.hpp"

namespace planet {

// p x t table of condition codes: rows are experimental plans, columns are
// trials. Immutable in normal use; cells are filled during construction.
class PlanMatrix {
public:
  PlanMatrix() = default;
  PlanMatrix(std::uint64_t plans, std::uint64_t trials, VariableSet vars);

  std::uint64_t plans() const { return plans_; }
  std::uint64_t trials() const { return trials_; }
  const VariableSet& variables() const { return vars_; }

  ConditionCode at(std::uint64_t row, std::uint64_t col) const {
    return cells_[row * trials_ + col];
  }
  void set(std::uint64_t row, std::uint64_t col, ConditionCode code) {
    cells_[row * trials_ + col] = code;
  }

  std::vector<std::uint64_t> row_values(std::uint64_t row) const;

  bool operator==(const PlanMatrix& other) const = default;

  // Row-major lexicographic order on cell codes; the canonical enumeration
  // order.
  static bool lex_less(const PlanMatrix& a, const PlanMatrix& b);

private:
  std::uint64_t plans_ = 0, trials_ = 0;
  std::vector<ConditionCode> cells_;
  VariableSet vars_;
};

// Projection of every cell onto a subset of the matrix variables.
PlanMatrix project_matrix(const PlanMatrix& m, const VariableSet& onto);

// Rectangular submatrix copy.
PlanMatrix submatrix(const PlanMatrix& m, std::uint64_t row0, std::uint64_t col0,
                     std::uint64_t rows, std::uint64_t cols);

// Cell text used in output tables: level names joined with "-" in variable
// order, e.g. "ffl-2-creation".
std::string condition_label(const VariableSet& vs, ConditionCode code);

// Inverse of condition_label (backtracking match, since level names may
// themselves contain '-'). Throws Errc::InvalidLevel when no parse exists.
ConditionCode parse_condition_label(const VariableSet& vs, std::string_view text);

}  // namespace planet

#endif  // PLANET_PLAN_MATRIX_HPP
