#include "planet/plan_matrix.hpp"

#include <algorithm>

#include "planet/error.hpp"

namespace planet {

PlanMatrix::PlanMatrix(std::uint64_t plans, std::uint64_t trials, VariableSet vars)
    : plans_(plans),
      trials_(trials),
      cells_(checked_mul(plans, trials)),
      vars_(std::move(vars)) {}

std::vector<std::uint64_t> PlanMatrix::row_values(std::uint64_t row) const {
  std::vector<std::uint64_t> out(trials_);
  for (std::uint64_t c = 0; c < trials_; ++c) out[c] = at(row, c).value;
  return out;
}

bool PlanMatrix::lex_less(const PlanMatrix& a, const PlanMatrix& b) {
  return std::lexicographical_compare(a.cells_.begin(), a.cells_.end(),
                                      b.cells_.begin(), b.cells_.end());
}

PlanMatrix project_matrix(const PlanMatrix& m, const VariableSet& onto) {
  const VariableSet& from = m.variables();
  std::vector<std::size_t> positions(onto.size());
  for (std::size_t i = 0; i < onto.size(); ++i) {
    auto at = from.index_of(onto[i].name);
    if (!at || !(from[*at] == onto[i])) {
      fail(Errc::ProjectionError,
           "variable '" + onto[i].name + "' is not part of the matrix");
    }
    positions[i] = *at;
  }
  PlanMatrix out(m.plans(), m.trials(), onto);
  std::vector<std::size_t> indices(onto.size());
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    for (std::uint64_t c = 0; c < m.trials(); ++c) {
      for (std::size_t i = 0; i < onto.size(); ++i) {
        indices[i] = from.level_of(m.at(r, c), positions[i]);
      }
      out.set(r, c, onto.encode(indices));
    }
  }
  return out;
}

PlanMatrix submatrix(const PlanMatrix& m, std::uint64_t row0, std::uint64_t col0,
                     std::uint64_t rows, std::uint64_t cols) {
  PlanMatrix out(rows, cols, m.variables());
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      out.set(r, c, m.at(row0 + r, col0 + c));
    }
  }
  return out;
}

std::string condition_label(const VariableSet& vs, ConditionCode code) {
  auto names = vs.decode_names(code);
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += "-";
    out += name;
  }
  return out;
}

namespace {
// Level names may contain '-' (compound variables do), so the split is not
// unique without trying alternatives.
bool match_label(const VariableSet& vs, std::string_view text, std::size_t var,
                 std::vector<std::size_t>& indices) {
  if (var == vs.size()) return text.empty();
  const Variable& v = vs[var];
  bool last = var + 1 == vs.size();
  for (std::size_t i = 0; i < v.levels.size(); ++i) {
    const std::string& level = v.levels[i];
    if (text.size() < level.size() || text.substr(0, level.size()) != level) continue;
    std::string_view rest = text.substr(level.size());
    if (!last) {
      if (rest.empty() || rest[0] != '-') continue;
      rest.remove_prefix(1);
    }
    indices[var] = i;
    if (match_label(vs, rest, var + 1, indices)) return true;
  }
  return false;
}
}  // namespace

ConditionCode parse_condition_label(const VariableSet& vs, std::string_view text) {
  std::vector<std::size_t> indices(vs.size());
  if (!match_label(vs, text, 0, indices)) {
    fail(Errc::InvalidLevel,
         "cell '" + std::string(text) + "' does not name a condition");
  }
  return vs.encode(indices);
}

}  // namespace planet
