#include "planet/solver.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "leaf_search.hpp"
#include "planet/error.hpp"
#include "planet/rng.hpp"
#include "planet/verify.hpp"

namespace planet {

namespace solver_detail {

void Deadline::poll() {
  if (!enabled) return;
  if ((++counter & 0xFFF) == 0 &&
      std::chrono::steady_clock::now() > end) {
    fail(Errc::Timeout, "solve budget exceeded");
  }
}

LeafSearch::LeafSearch(const ResolvedNode& leaf, Deadline* deadline)
    : vars_(leaf.vars),
      deadline_(deadline),
      plans_(leaf.shape.plans),
      trials_(leaf.shape.trials) {
  domain_ = vars_.condition_count();
  if (domain_ > kDomainCap) {
    fail(Errc::DesignTooLarge,
         "condition space of " + std::to_string(domain_) + " is too large to search");
  }
  var_count_ = vars_.size();
  max_levels_ = 1;
  for (const auto& v : vars_.variables()) {
    max_levels_ = std::max<std::uint64_t>(max_levels_, v.level_count());
  }
  row_quota_.assign(var_count_, 0);
  col_quota_.assign(var_count_, 0);
  fixed_first_.assign(var_count_, kNoLevel);
  const_row_.assign(var_count_, false);
  for (const Constraint& c : leaf.local) {
    if (c.kind == ConstraintKind::DistinctRows) {
      distinct_ = true;
      continue;
    }
    std::size_t vi = *vars_.index_of(c.variable);
    std::uint64_t n = vars_[vi].level_count();
    switch (c.kind) {
      case ConstraintKind::RowBalance: row_quota_[vi] = trials_ / n; break;
      case ConstraintKind::ColumnBalance: col_quota_[vi] = plans_ / n; break;
      case ConstraintKind::FixedFirstColumn:
        fixed_first_[vi] = *vars_[vi].level_index(c.level);
        break;
      case ConstraintKind::ConstantInRow: const_row_[vi] = true; break;
      default: break;
    }
  }
  row_counts_.assign(plans_ * var_count_ * max_levels_, 0);
  col_counts_.assign(trials_ * var_count_ * max_levels_, 0);
}

bool LeafSearch::valid(const PlanMatrix& m, std::uint64_t r, std::uint64_t c,
                       std::uint64_t code, std::vector<std::uint64_t>& scratch) {
  for (std::size_t v = 0; v < var_count_; ++v) {
    std::size_t lvl = vars_.level_of(ConditionCode{code}, v);
    if (c == 0) {
      if (fixed_first_[v] != kNoLevel && lvl != fixed_first_[v]) {
        ++prune_fixed_;
        return false;
      }
    } else if (const_row_[v] && lvl != vars_.level_of(m.at(r, 0), v)) {
      ++prune_const_;
      return false;
    }
    if (row_quota_[v] && row_counts_[row_at(r, v, lvl)] + 1 > row_quota_[v]) {
      ++prune_row_;
      return false;
    }
    if (col_quota_[v] && col_counts_[col_at(c, v, lvl)] + 1 > col_quota_[v]) {
      ++prune_col_;
      return false;
    }
  }
  if (distinct_ && c + 1 == trials_) {
    scratch.clear();
    for (std::uint64_t k = 0; k + 1 < trials_; ++k) scratch.push_back(m.at(r, k).value);
    scratch.push_back(code);
    if (used_rows_.count(scratch)) {
      ++prune_distinct_;
      return false;
    }
  }
  return true;
}

void LeafSearch::apply(PlanMatrix& m, std::uint64_t r, std::uint64_t c,
                       std::uint64_t code) {
  m.set(r, c, ConditionCode{code});
  for (std::size_t v = 0; v < var_count_; ++v) {
    std::size_t lvl = vars_.level_of(ConditionCode{code}, v);
    if (row_quota_[v]) ++row_counts_[row_at(r, v, lvl)];
    if (col_quota_[v]) ++col_counts_[col_at(c, v, lvl)];
  }
  if (distinct_ && c + 1 == trials_) used_rows_.insert(m.row_values(r));
}

void LeafSearch::unapply(const PlanMatrix& m, std::uint64_t r, std::uint64_t c) {
  std::uint64_t code = m.at(r, c).value;
  if (distinct_ && c + 1 == trials_) used_rows_.erase(m.row_values(r));
  for (std::size_t v = 0; v < var_count_; ++v) {
    std::size_t lvl = vars_.level_of(ConditionCode{code}, v);
    if (row_quota_[v]) --row_counts_[row_at(r, v, lvl)];
    if (col_quota_[v]) --col_counts_[col_at(c, v, lvl)];
  }
}

// Depth-first over cells in row-major order. Candidate order per cell is
// ascending (enumeration order) or a per-cell seeded shuffle. Returns true
// when the sink stopped the walk, false when the space was exhausted.
bool LeafSearch::run(bool randomized, std::uint64_t seed,
                     const std::function<bool(const PlanMatrix&)>& sink) {
  const std::uint64_t total = plans_ * trials_;
  PlanMatrix m(plans_, trials_, vars_);
  std::vector<std::vector<std::uint32_t>> orders(total);
  std::vector<std::size_t> pos(total, 0);
  std::vector<std::uint64_t> scratch;

  std::vector<std::uint32_t> base(domain_);
  for (std::uint64_t i = 0; i < domain_; ++i) base[i] = static_cast<std::uint32_t>(i);

  std::uint64_t d = 0;
  bool entering = true;
  while (true) {
    if (d == total) {
      if (!sink(m)) return true;
      --d;
      unapply(m, d / trials_, d % trials_);
      entering = false;
      continue;
    }
    if (entering) {
      orders[d] = base;
      if (randomized) {
        Rng rng(mix_seed(seed, d));
        rng.shuffle(orders[d]);
      }
      pos[d] = 0;
    }
    const std::uint64_t r = d / trials_, c = d % trials_;
    bool advanced = false;
    while (pos[d] < orders[d].size()) {
      if (deadline_) deadline_->poll();
      std::uint32_t code = orders[d][pos[d]++];
      if (valid(m, r, c, code, scratch)) {
        apply(m, r, c, code);
        advanced = true;
        break;
      }
    }
    if (advanced) {
      ++d;
      entering = true;
    } else {
      if (d == 0) return false;
      --d;
      unapply(m, d / trials_, d % trials_);
      entering = false;
    }
  }
}

std::string LeafSearch::dominant_pruner() const {
  const char* name = "row balance";
  std::uint64_t best = prune_row_;
  if (prune_col_ > best) { best = prune_col_; name = "column balance"; }
  if (prune_distinct_ > best) { best = prune_distinct_; name = "distinct plans"; }
  if (prune_fixed_ > best) { best = prune_fixed_; name = "fixed first trial"; }
  if (prune_const_ > best) { best = prune_const_; name = "constant-in-plan"; }
  return name;
}

namespace {

// Gathers per-variable level indices from two source matrices into codes over
// a merged variable set.
struct Merger {
  explicit Merger(const VariableSet& target, const VariableSet& a,
                  const VariableSet& b)
      : target_(target), a_(a), b_(b), indices_(target.size()) {
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (auto ai = a.index_of(target[i].name)) {
        sources_.push_back({0, *ai});
      } else {
        sources_.push_back({1, *b.index_of(target[i].name)});
      }
    }
  }

  ConditionCode fuse(ConditionCode ca, ConditionCode cb) {
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      const auto& [child, idx] = sources_[i];
      indices_[i] = child == 0 ? a_.level_of(ca, idx) : b_.level_of(cb, idx);
    }
    return target_.encode(indices_);
  }

  const VariableSet& target_;
  const VariableSet& a_;
  const VariableSet& b_;
  std::vector<std::pair<int, std::size_t>> sources_;
  std::vector<std::size_t> indices_;
};

}  // namespace

PlanMatrix cross_matrices(const VariableSet& target, const PlanMatrix& left,
                          const PlanMatrix& right) {
  Merger merger(target, left.variables(), right.variables());
  PlanMatrix out(checked_mul(left.plans(), right.plans()), left.trials(), target);
  for (std::uint64_t i = 0; i < left.plans(); ++i) {
    for (std::uint64_t j = 0; j < right.plans(); ++j) {
      for (std::uint64_t c = 0; c < left.trials(); ++c) {
        out.set(i * right.plans() + j, c, merger.fuse(left.at(i, c), right.at(j, c)));
      }
    }
  }
  return out;
}

PlanMatrix nest_block_matrices(
    const VariableSet& target, const PlanMatrix& outer, std::uint64_t inner_plans,
    std::uint64_t inner_trials, const VariableSet& inner_vars,
    const std::function<const PlanMatrix&(std::uint64_t, std::uint64_t)>& block_of) {
  PlanMatrix out(checked_mul(outer.plans(), inner_plans),
                 checked_mul(outer.trials(), inner_trials), target);
  Merger merger(target, outer.variables(), inner_vars);
  for (std::uint64_t big_r = 0; big_r < outer.plans(); ++big_r) {
    for (std::uint64_t big_c = 0; big_c < outer.trials(); ++big_c) {
      const PlanMatrix& block = block_of(big_r, big_c);
      for (std::uint64_t r = 0; r < inner_plans; ++r) {
        for (std::uint64_t c = 0; c < inner_trials; ++c) {
          out.set(big_r * inner_plans + r, big_c * inner_trials + c,
                  merger.fuse(outer.at(big_r, big_c), block.at(r, c)));
        }
      }
    }
  }
  return out;
}

}  // namespace solver_detail

namespace {

using solver_detail::cross_matrices;
using solver_detail::Deadline;
using solver_detail::LeafSearch;
using solver_detail::nest_block_matrices;

PlanMatrix solve_node(const ResolvedNode& node, std::uint64_t seed, NestMode mode,
                      Deadline* deadline);

PlanMatrix solve_node(const ResolvedNode& node, std::uint64_t seed, NestMode mode,
                      Deadline* deadline) {
  switch (node.kind) {
    case ResolvedNode::Kind::Leaf: {
      LeafSearch search(node, deadline);
      PlanMatrix result;
      bool found = false;
      search.run(true, seed, [&](const PlanMatrix& m) {
        result = m;
        found = true;
        return false;
      });
      if (!found) {
        fail(Errc::Unsatisfiable,
             "no matrix satisfies the design constraints (most pruning by " +
                 search.dominant_pruner() + ")");
      }
      return result;
    }
    case ResolvedNode::Kind::Cross: {
      PlanMatrix left = solve_node(*node.first, mix_seed(seed, 1), mode, deadline);
      PlanMatrix right = solve_node(*node.second, mix_seed(seed, 2), mode, deadline);
      return cross_matrices(node.vars, left, right);
    }
    case ResolvedNode::Kind::Nest: {
      const ResolvedNode& inner = *node.first;
      const ResolvedNode& outer = *node.second;
      PlanMatrix outer_m = solve_node(outer, mix_seed(seed, 4), mode, deadline);
      if (mode == NestMode::Kron) {
        PlanMatrix inner_m = solve_node(inner, mix_seed(seed, 3), mode, deadline);
        return nest_block_matrices(node.vars, outer_m, inner.shape.plans,
                             inner.shape.trials, inner.vars,
                             [&](std::uint64_t, std::uint64_t) -> const PlanMatrix& {
                               return inner_m;
                             });
      }
      std::vector<PlanMatrix> blocks;
      blocks.reserve(outer.shape.plans * outer.shape.trials);
      for (std::uint64_t i = 0; i < outer.shape.plans; ++i) {
        for (std::uint64_t j = 0; j < outer.shape.trials; ++j) {
          blocks.push_back(solve_node(
              inner, mix_seed(seed, 5 + i * outer.shape.trials + j), mode, deadline));
        }
      }
      return nest_block_matrices(node.vars, outer_m, inner.shape.plans, inner.shape.trials,
                           inner.vars,
                           [&](std::uint64_t i, std::uint64_t j) -> const PlanMatrix& {
                             return blocks[i * outer.shape.trials + j];
                           });
    }
  }
  fail(Errc::Unsatisfiable, "unreachable design node");
}

}  // namespace

PlanMatrix solve(const ResolvedDesign& rd, const SolveOptions& options) {
  Deadline deadline;
  deadline.enabled = options.timeout.count() > 0;
  deadline.end = std::chrono::steady_clock::now() + options.timeout;

  PlanMatrix m = solve_node(*rd.root, options.seed, options.nest_mode, &deadline);

  for (const CheckResult& check : check_all(m, rd)) {
    if (!check.pass) {
      throw std::logic_error("solver produced an invalid matrix: " + check.name +
                             (check.variable.empty() ? "" : " on " + check.variable) +
                             " - " + check.detail);
    }
  }
  return m;
}

PlanMatrix solve_cross(const PlanMatrix& left, const PlanMatrix& right) {
  if (left.trials() != right.trials()) {
    fail(Errc::CrossArityMismatch, "crossed matrices have different trial counts");
  }
  VariableSet merged = union_of(left.variables(), right.variables());
  return cross_matrices(merged, left, right);
}

PlanMatrix solve_nest_kron(const PlanMatrix& inner, const PlanMatrix& outer) {
  VariableSet merged = union_of(outer.variables(), inner.variables());
  return nest_block_matrices(merged, outer, inner.plans(), inner.trials(),
                       inner.variables(),
                       [&](std::uint64_t, std::uint64_t) -> const PlanMatrix& {
                         return inner;
                       });
}

}  // namespace planet
