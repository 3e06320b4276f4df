#include "planet/verify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "planet/error.hpp"

namespace planet {

namespace {

std::size_t var_index_or_throw(const PlanMatrix& m, const std::string& var) {
  auto i = m.variables().index_of(var);
  if (!i) {
    fail(Errc::ProjectionError, "variable '" + var + "' is not part of the table");
  }
  return *i;
}

CheckResult pass_result(std::string name, std::string var, std::string detail) {
  return CheckResult{std::move(name), std::move(var), true, std::move(detail),
                     std::nullopt};
}

CheckResult fail_result(std::string name, std::string var, std::string detail,
                        CellRef at) {
  return CheckResult{std::move(name), std::move(var), false, std::move(detail), at};
}

struct Violation {
  CellRef at;
  std::string detail;
};

// Each level of var appears exactly `quota` times in every row of the region.
std::optional<Violation> find_row_imbalance(const PlanMatrix& m, std::size_t vi,
                                            std::uint64_t quota) {
  const VariableSet& vs = m.variables();
  std::uint64_t n = vs[vi].level_count();
  std::vector<std::uint64_t> counts(n);
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t c = 0; c < m.trials(); ++c) {
      std::size_t lvl = vs.level_of(m.at(r, c), vi);
      if (++counts[lvl] > quota) {
        return Violation{{r, c},
                         "level '" + vs[vi].levels[lvl] + "' appears more than " +
                             std::to_string(quota) + " times in plan " +
                             std::to_string(r)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> find_column_imbalance(const PlanMatrix& m, std::size_t vi,
                                               std::uint64_t quota) {
  const VariableSet& vs = m.variables();
  std::uint64_t n = vs[vi].level_count();
  std::vector<std::uint64_t> counts(n);
  for (std::uint64_t c = 0; c < m.trials(); ++c) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t r = 0; r < m.plans(); ++r) {
      std::size_t lvl = vs.level_of(m.at(r, c), vi);
      if (++counts[lvl] > quota) {
        return Violation{{r, c},
                         "level '" + vs[vi].levels[lvl] + "' appears more than " +
                             std::to_string(quota) + " times in trial " +
                             std::to_string(c + 1)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> find_nonconstant_row(const PlanMatrix& m, std::size_t vi) {
  const VariableSet& vs = m.variables();
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    std::size_t first = vs.level_of(m.at(r, 0), vi);
    for (std::uint64_t c = 1; c < m.trials(); ++c) {
      if (vs.level_of(m.at(r, c), vi) != first) {
        return Violation{{r, c}, "plan " + std::to_string(r) + " switches from '" +
                                     vs[vi].levels[first] + "' to '" +
                                     vs[vi].levels[vs.level_of(m.at(r, c), vi)] + "'"};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> find_first_column_break(const PlanMatrix& m, std::size_t vi,
                                                 std::size_t level_index) {
  const VariableSet& vs = m.variables();
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    std::size_t lvl = vs.level_of(m.at(r, 0), vi);
    if (lvl != level_index) {
      return Violation{{r, 0}, "plan " + std::to_string(r) + " starts with '" +
                                   vs[vi].levels[lvl] + "'"};
    }
  }
  return std::nullopt;
}

std::optional<Violation> find_duplicate_rows(const PlanMatrix& m) {
  std::map<std::vector<std::uint64_t>, std::uint64_t> seen;
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    auto [it, inserted] = seen.emplace(m.row_values(r), r);
    if (!inserted) {
      return Violation{{r, 0}, "plan " + std::to_string(r) + " repeats plan " +
                                   std::to_string(it->second)};
    }
  }
  return std::nullopt;
}

CheckResult from_violation(std::string name, std::string var, std::string pass_detail,
                           const std::optional<Violation>& v) {
  if (!v) return pass_result(std::move(name), std::move(var), std::move(pass_detail));
  return fail_result(std::move(name), std::move(var), v->detail, v->at);
}

// Fisher property over an arbitrary symbol extractor.
template <class SymbolOf>
CheckResult fisher_check(const PlanMatrix& m, std::string name, std::string var,
                         std::uint64_t symbols, const std::string& what,
                         SymbolOf&& symbol_of) {
  if (m.plans() != m.trials() || m.plans() != symbols) {
    fail(Errc::ShapeMismatch,
         what + " has " + std::to_string(symbols) + " symbols but the table is " +
             std::to_string(m.plans()) + "x" + std::to_string(m.trials()));
  }
  std::vector<std::uint64_t> seen(symbols);
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint64_t c = 0; c < m.trials(); ++c) {
      if (++seen[symbol_of(r, c)] > 1) {
        return fail_result(name, var,
                           "symbol repeats in row " + std::to_string(r), {r, c});
      }
    }
  }
  for (std::uint64_t c = 0; c < m.trials(); ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint64_t r = 0; r < m.plans(); ++r) {
      if (++seen[symbol_of(r, c)] > 1) {
        return fail_result(name, var,
                           "symbol repeats in column " + std::to_string(c), {r, c});
      }
    }
  }
  return pass_result(std::move(name), std::move(var),
                     "each symbol exactly once per row and column");
}

}  // namespace

CheckResult check_fisher_latin_square(const PlanMatrix& m, const std::string& var) {
  std::size_t vi = var_index_or_throw(m, var);
  const VariableSet& vs = m.variables();
  return fisher_check(m, "fisher_latin_square", var, vs[vi].level_count(),
                      "variable '" + var + "'",
                      [&](std::uint64_t r, std::uint64_t c) {
                        return vs.level_of(m.at(r, c), vi);
                      });
}

CheckResult check_fisher_latin_square_combined(const PlanMatrix& m) {
  return fisher_check(m, "fisher_latin_square", "",
                      m.variables().condition_count(), "the combined condition",
                      [&](std::uint64_t r, std::uint64_t c) {
                        return m.at(r, c).value;
                      });
}

CheckResult check_apa_balance(const PlanMatrix& m, const std::string& var) {
  std::size_t vi = var_index_or_throw(m, var);
  std::uint64_t n = m.variables()[vi].level_count();
  if (m.plans() % n != 0) {
    fail(Errc::DivisibilityError, "variable '" + var + "' has " + std::to_string(n) +
                                      " levels, not a divisor of " +
                                      std::to_string(m.plans()) + " plans");
  }
  std::uint64_t quota = m.plans() / n;
  return from_violation("apa_balance", var,
                        "each level " + std::to_string(quota) + " times per trial",
                        find_column_imbalance(m, vi, quota));
}

CheckResult check_counterbalance(const PlanMatrix& m, const std::string& var) {
  std::size_t vi = var_index_or_throw(m, var);
  std::uint64_t n = m.variables()[vi].level_count();
  if (m.trials() % n != 0 || m.plans() % n != 0) {
    fail(Errc::DivisibilityError,
         "variable '" + var + "' has " + std::to_string(n) +
             " levels, not a divisor of both table dimensions");
  }
  if (auto v = find_row_imbalance(m, vi, m.trials() / n)) {
    return fail_result("counterbalance", var, v->detail, v->at);
  }
  if (auto v = find_column_imbalance(m, vi, m.plans() / n)) {
    return fail_result("counterbalance", var, v->detail, v->at);
  }
  return pass_result("counterbalance", var, "balanced per plan and per trial");
}

CheckResult check_within(const PlanMatrix& m, const std::string& var) {
  std::size_t vi = var_index_or_throw(m, var);
  const VariableSet& vs = m.variables();
  for (std::uint64_t r = 0; r < m.plans(); ++r) {
    std::set<std::size_t> distinct;
    for (std::uint64_t c = 0; c < m.trials(); ++c) {
      distinct.insert(vs.level_of(m.at(r, c), vi));
    }
    if (distinct.size() < 2) {
      return fail_result("within_subjects", var,
                         "plan " + std::to_string(r) + " exposes a single level",
                         {r, 0});
    }
  }
  return pass_result("within_subjects", var, "every plan exposes >= 2 levels");
}

CheckResult check_between(const PlanMatrix& m, const std::string& var) {
  std::size_t vi = var_index_or_throw(m, var);
  return from_violation("between_subjects", var, "constant within every plan",
                        find_nonconstant_row(m, vi));
}

CheckResult check_start_with(const PlanMatrix& m, const std::string& var,
                             const std::string& level) {
  std::size_t vi = var_index_or_throw(m, var);
  auto lvl = m.variables()[vi].level_index(level);
  if (!lvl) {
    fail(Errc::InvalidLevel, "variable '" + var + "' has no level '" + level + "'");
  }
  return from_violation("start_with", var, "every plan starts with '" + level + "'",
                        find_first_column_break(m, vi, *lvl));
}

CheckResult check_distinct_rows(const PlanMatrix& m) {
  return from_violation("distinct_rows", "", "all plans distinct",
                        find_duplicate_rows(m));
}

namespace {

std::optional<Violation> block_walk(const PlanMatrix& m, const BlockTree& tree,
                                    std::uint64_t row0, std::uint64_t col0) {
  const VariableSet& vs = m.variables();
  std::uint64_t block_h = tree.rows / tree.grid_rows;
  std::uint64_t block_w = tree.cols / tree.grid_cols;
  for (const auto& var : tree.block_vars) {
    auto vi = vs.index_of(var);
    if (!vi) continue;
    for (std::uint64_t bi = 0; bi < tree.grid_rows; ++bi) {
      for (std::uint64_t bj = 0; bj < tree.grid_cols; ++bj) {
        std::uint64_t r0 = row0 + bi * block_h, c0 = col0 + bj * block_w;
        std::size_t expected = vs.level_of(m.at(r0, c0), *vi);
        for (std::uint64_t r = 0; r < block_h; ++r) {
          for (std::uint64_t c = 0; c < block_w; ++c) {
            if (vs.level_of(m.at(r0 + r, c0 + c), *vi) != expected) {
              return Violation{
                  {r0 + r, c0 + c},
                  "variable '" + var + "' is not constant in block (" +
                      std::to_string(bi) + "," + std::to_string(bj) + ")"};
            }
          }
        }
      }
    }
  }
  if (tree.inner) {
    for (std::uint64_t bi = 0; bi < tree.grid_rows; ++bi) {
      for (std::uint64_t bj = 0; bj < tree.grid_cols; ++bj) {
        if (auto v = block_walk(m, *tree.inner, row0 + bi * block_h,
                                col0 + bj * block_w)) {
          return v;
        }
      }
    }
  }
  if (tree.outer) {
    if (auto v = block_walk(m, *tree.outer, row0, col0)) return v;
  }
  return std::nullopt;
}

}  // namespace

CheckResult check_block_structure(const PlanMatrix& m, const BlockTree& blocks) {
  if (m.plans() != blocks.rows || m.trials() != blocks.cols) {
    fail(Errc::ShapeMismatch, "block tree describes a " + std::to_string(blocks.rows) +
                                  "x" + std::to_string(blocks.cols) + " table");
  }
  return from_violation("block_structure", "",
                        "outer conditions constant within every block",
                        block_walk(m, blocks, 0, 0));
}

// ── Structural verification ─────────────────────────────────────────────────

namespace {

void append_leaf_checks(const PlanMatrix& m, const ResolvedNode& leaf,
                        const std::string& where, std::vector<CheckResult>& out) {
  const VariableSet& vs = m.variables();
  auto tag = [&](CheckResult r) {
    if (!where.empty()) {
      r.detail = r.detail.empty() ? where : r.detail + " [" + where + "]";
    }
    out.push_back(std::move(r));
  };
  for (const Constraint& c : leaf.local) {
    switch (c.kind) {
      case ConstraintKind::RowBalance: {
        std::size_t vi = *vs.index_of(c.variable);
        std::uint64_t quota = m.trials() / vs[vi].level_count();
        tag(from_violation("row_balance", c.variable,
                           "each level " + std::to_string(quota) + " times per plan",
                           find_row_imbalance(m, vi, quota)));
        break;
      }
      case ConstraintKind::ColumnBalance: {
        std::size_t vi = *vs.index_of(c.variable);
        std::uint64_t quota = m.plans() / vs[vi].level_count();
        tag(from_violation("column_balance", c.variable,
                           "each level " + std::to_string(quota) + " times per trial",
                           find_column_imbalance(m, vi, quota)));
        break;
      }
      case ConstraintKind::FixedFirstColumn: {
        std::size_t vi = *vs.index_of(c.variable);
        tag(from_violation("fixed_first_column", c.variable,
                           "every plan starts with '" + c.level + "'",
                           find_first_column_break(m, vi,
                                                   *vs[vi].level_index(c.level))));
        break;
      }
      case ConstraintKind::ConstantInRow: {
        std::size_t vi = *vs.index_of(c.variable);
        tag(from_violation("constant_in_row", c.variable, "constant within every plan",
                           find_nonconstant_row(m, vi)));
        break;
      }
      case ConstraintKind::DistinctRows:
        tag(from_violation("distinct_rows", "", "all plans distinct",
                           find_duplicate_rows(m)));
        break;
      case ConstraintKind::BlockConstant:
        break;  // only arises in flattened nest scopes
    }
  }
}

void check_node(const PlanMatrix& m, const ResolvedNode& node, const std::string& where,
                std::vector<CheckResult>& out);

void check_cross_side(const PlanMatrix& m, const ResolvedNode& cross,
                      const ResolvedNode& child, const ResolvedNode& other,
                      const char* side, const std::string& where,
                      std::vector<CheckResult>& out) {
  (void)cross;
  PlanMatrix proj = project_matrix(m, child.vars);
  // Distinct projections in first-appearance order; valid compositions list
  // each child plan exactly `other.p` times.
  std::vector<std::uint64_t> first_rows;
  std::map<std::vector<std::uint64_t>, std::uint64_t> multiplicity;
  for (std::uint64_t r = 0; r < proj.plans(); ++r) {
    auto key = proj.row_values(r);
    auto [it, inserted] = multiplicity.emplace(std::move(key), 0);
    if (inserted) first_rows.push_back(r);
    ++it->second;
  }
  std::string ctx = where.empty() ? std::string(side) : where + ", " + side;
  bool counts_ok = first_rows.size() == child.shape.plans;
  for (const auto& [row, count] : multiplicity) {
    (void)row;
    counts_ok &= count == other.shape.plans;
  }
  if (!counts_ok) {
    out.push_back(fail_result(
        "cross_multiset", "",
        std::string(side) + " projection must list each of " +
            std::to_string(child.shape.plans) + " plans exactly " +
            std::to_string(other.shape.plans) + " times" +
            (where.empty() ? "" : " [" + where + "]"),
        CellRef{0, 0}));
  } else {
    out.push_back(pass_result("cross_multiset", "",
                              std::string(side) + " plans each repeated " +
                                  std::to_string(other.shape.plans) + " times" +
                                  (where.empty() ? "" : " [" + where + "]")));
  }

  PlanMatrix distinct(first_rows.size(), proj.trials(), proj.variables());
  for (std::uint64_t i = 0; i < first_rows.size(); ++i) {
    for (std::uint64_t c = 0; c < proj.trials(); ++c) {
      distinct.set(i, c, proj.at(first_rows[i], c));
    }
  }
  if (distinct.plans() == child.shape.plans) {
    check_node(distinct, child, ctx, out);
  }
}

void check_node(const PlanMatrix& m, const ResolvedNode& node, const std::string& where,
                std::vector<CheckResult>& out) {
  switch (node.kind) {
    case ResolvedNode::Kind::Leaf:
      append_leaf_checks(m, node, where, out);
      return;
    case ResolvedNode::Kind::Cross:
      check_cross_side(m, node, *node.first, *node.second, "left", where, out);
      check_cross_side(m, node, *node.second, *node.first, "right", where, out);
      return;
    case ResolvedNode::Kind::Nest: {
      const ResolvedNode& inner = *node.first;
      const ResolvedNode& outer = *node.second;
      const VariableSet& vs = m.variables();
      std::uint64_t pi = inner.shape.plans, ti = inner.shape.trials;

      // Outer conditions must be constant per block.
      bool blocks_ok = true;
      CellRef bad{0, 0};
      std::string bad_var;
      for (const auto& v : outer.vars.variables()) {
        std::size_t vi = *vs.index_of(v.name);
        for (std::uint64_t bi = 0; bi < outer.shape.plans && blocks_ok; ++bi) {
          for (std::uint64_t bj = 0; bj < outer.shape.trials && blocks_ok; ++bj) {
            std::size_t expected = vs.level_of(m.at(bi * pi, bj * ti), vi);
            for (std::uint64_t r = 0; r < pi && blocks_ok; ++r) {
              for (std::uint64_t c = 0; c < ti && blocks_ok; ++c) {
                if (vs.level_of(m.at(bi * pi + r, bj * ti + c), vi) != expected) {
                  blocks_ok = false;
                  bad = {bi * pi + r, bj * ti + c};
                  bad_var = v.name;
                }
              }
            }
          }
        }
      }
      if (blocks_ok) {
        out.push_back(pass_result("block_constant", "",
                                  "outer conditions constant per block" +
                                      (where.empty() ? "" : " [" + where + "]")));
      } else {
        out.push_back(fail_result("block_constant", bad_var,
                                  "outer condition changes inside a block" +
                                      (where.empty() ? "" : " [" + where + "]"),
                                  bad));
        return;
      }

      // The block grid itself is an outer-design table.
      PlanMatrix grid(outer.shape.plans, outer.shape.trials, outer.vars);
      std::vector<std::size_t> indices(outer.vars.size());
      for (std::uint64_t bi = 0; bi < outer.shape.plans; ++bi) {
        for (std::uint64_t bj = 0; bj < outer.shape.trials; ++bj) {
          for (std::size_t k = 0; k < outer.vars.size(); ++k) {
            indices[k] = vs.level_of(m.at(bi * pi, bj * ti),
                                     *vs.index_of(outer.vars[k].name));
          }
          grid.set(bi, bj, outer.vars.encode(indices));
        }
      }
      check_node(grid, outer, where.empty() ? "block grid" : where + ", block grid",
                 out);

      // Every block is an inner-design table of its own.
      for (std::uint64_t bi = 0; bi < outer.shape.plans; ++bi) {
        for (std::uint64_t bj = 0; bj < outer.shape.trials; ++bj) {
          PlanMatrix block =
              project_matrix(submatrix(m, bi * pi, bj * ti, pi, ti), inner.vars);
          std::string ctx = "block (" + std::to_string(bi) + "," +
                            std::to_string(bj) + ")";
          check_node(block, inner, where.empty() ? ctx : where + ", " + ctx, out);
        }
      }
      return;
    }
  }
}

}  // namespace

std::vector<CheckResult> check_all(const PlanMatrix& m, const ResolvedDesign& rd) {
  std::vector<CheckResult> out;
  if (m.plans() != rd.shape.plans || m.trials() != rd.shape.trials) {
    out.push_back(fail_result(
        "shape", "",
        "table is " + std::to_string(m.plans()) + "x" + std::to_string(m.trials()) +
            ", design requires " + std::to_string(rd.shape.plans) + "x" +
            std::to_string(rd.shape.trials),
        CellRef{0, 0}));
    return out;
  }
  if (!(m.variables() == rd.vars)) {
    out.push_back(fail_result("shape", "", "table variables differ from the design",
                              CellRef{0, 0}));
    return out;
  }
  out.push_back(pass_result("shape", "",
                            std::to_string(m.plans()) + " plans x " +
                                std::to_string(m.trials()) + " trials"));
  check_node(m, *rd.root, "", out);
  return out;
}

// ── Classification ──────────────────────────────────────────────────────────

namespace {

template <class SymbolOf>
std::string classify_symbols(const PlanMatrix& m, std::uint64_t n,
                             SymbolOf&& symbol_of) {
  bool constant_rows = true;
  for (std::uint64_t r = 0; r < m.plans() && constant_rows; ++r) {
    for (std::uint64_t c = 1; c < m.trials(); ++c) {
      if (symbol_of(r, c) != symbol_of(r, 0)) {
        constant_rows = false;
        break;
      }
    }
  }
  if (constant_rows) return "between";

  auto balanced = [&](bool rows) {
    std::uint64_t length = rows ? m.trials() : m.plans();
    std::uint64_t lanes = rows ? m.plans() : m.trials();
    if (length % n != 0) return false;
    std::uint64_t quota = length / n;
    std::vector<std::uint64_t> counts(n);
    for (std::uint64_t lane = 0; lane < lanes; ++lane) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::uint64_t k = 0; k < length; ++k) {
        std::size_t s = rows ? symbol_of(lane, k) : symbol_of(k, lane);
        if (++counts[s] > quota) return false;
      }
    }
    return true;
  };
  if (balanced(true) && balanced(false)) {
    return (m.plans() == n && m.trials() == n) ? "latin-square" : "counterbalanced";
  }
  return "within-random";
}

}  // namespace

Classification classify(const PlanMatrix& m, const VariableSet& vs) {
  Classification result;
  for (std::size_t vi = 0; vi < vs.size(); ++vi) {
    auto mi = m.variables().index_of(vs[vi].name);
    if (!mi) continue;
    std::size_t idx = *mi;
    const VariableSet& mvs = m.variables();
    std::string label = classify_symbols(
        m, mvs[idx].level_count(),
        [&](std::uint64_t r, std::uint64_t c) { return mvs.level_of(m.at(r, c), idx); });
    result.per_variable.emplace_back(vs[vi].name, label);

    if (label != "between") {
      // Widest column blocking that keeps the variable constant per segment.
      std::uint64_t best = 0;
      for (std::uint64_t w = 2; w < m.trials(); ++w) {
        if (m.trials() % w != 0) continue;
        bool constant = true;
        for (std::uint64_t r = 0; r < m.plans() && constant; ++r) {
          for (std::uint64_t c = 0; c < m.trials() && constant; ++c) {
            if (mvs.level_of(m.at(r, c), idx) !=
                mvs.level_of(m.at(r, (c / w) * w), idx)) {
              constant = false;
            }
          }
        }
        if (constant) best = w;
      }
      if (best > 1) {
        result.blocks.push_back(Classification::Blocking{vs[vi].name, best});
      }
    }
  }
  if (m.variables().size() >= 2) {
    result.combined = classify_symbols(
        m, m.variables().condition_count(),
        [&](std::uint64_t r, std::uint64_t c) { return m.at(r, c).value; });
  }
  return result;
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

Report verify_against(const PlanMatrix& m, const ResolvedDesign& rd) {
  Report report;
  report.checks = check_all(m, rd);
  report.classification = classify(m, rd.vars);
  return report;
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& check : report.checks) {
    nlohmann::ordered_json c;
    c["name"] = check.name;
    c["variable"] = check.variable;
    c["pass"] = check.pass;
    c["detail"] = check.detail;
    if (check.first_violation) {
      c["first_violation"] = {{"row", check.first_violation->row},
                              {"col", check.first_violation->col}};
    } else {
      c["first_violation"] = nullptr;
    }
    j["checks"].push_back(std::move(c));
  }
  nlohmann::ordered_json vars = nlohmann::ordered_json::object();
  for (const auto& [name, label] : report.classification.per_variable) {
    vars[name] = label;
  }
  j["classification"]["variables"] = std::move(vars);
  if (report.classification.combined) {
    j["classification"]["combined"] = *report.classification.combined;
  } else {
    j["classification"]["combined"] = nullptr;
  }
  j["classification"]["blocks"] = nlohmann::ordered_json::array();
  for (const auto& block : report.classification.blocks) {
    j["classification"]["blocks"].push_back(
        {{"variable", block.variable}, {"width", block.width}});
  }
  return j.dump(2);
}

}  // namespace planet
