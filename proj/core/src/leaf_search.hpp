#ifndef PLANET_SRC_LEAF_SEARCH_HPP
#define PLANET_SRC_LEAF_SEARCH_HPP

// Internal backtracking engine shared by solve() and enumerate_plans().
// Not installed.

#include <chrono>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "planet/constraints.hpp"
#include "planet/plan_matrix.hpp"

namespace planet::solver_detail {

struct Deadline {
  std::chrono::steady_clock::time_point end;
  bool enabled = false;
  std::uint64_t counter = 0;
  void poll();
};

// Cell-by-cell search over one leaf design's grid, with per-row/per-column
// balance counting, first-column pinning, constant-in-row forwarding and
// duplicate-plan rejection.
class LeafSearch {
public:
  LeafSearch(const ResolvedNode& leaf, Deadline* deadline);

  bool run(bool randomized, std::uint64_t seed,
           const std::function<bool(const PlanMatrix&)>& sink);

  std::string dominant_pruner() const;

private:
  static constexpr std::size_t kNoLevel = static_cast<std::size_t>(-1);
  static constexpr std::uint64_t kDomainCap = 100000;

  std::size_t row_at(std::uint64_t r, std::size_t v, std::size_t lvl) const {
    return (r * var_count_ + v) * max_levels_ + lvl;
  }
  std::size_t col_at(std::uint64_t c, std::size_t v, std::size_t lvl) const {
    return (c * var_count_ + v) * max_levels_ + lvl;
  }

  bool valid(const PlanMatrix& m, std::uint64_t r, std::uint64_t c,
             std::uint64_t code, std::vector<std::uint64_t>& scratch);
  void apply(PlanMatrix& m, std::uint64_t r, std::uint64_t c, std::uint64_t code);
  void unapply(const PlanMatrix& m, std::uint64_t r, std::uint64_t c);

  VariableSet vars_;
  Deadline* deadline_ = nullptr;
  std::uint64_t plans_ = 0, trials_ = 0;
  std::uint64_t domain_ = 0;
  std::size_t var_count_ = 0;
  std::uint64_t max_levels_ = 1;
  bool distinct_ = false;

  std::vector<std::uint64_t> row_quota_, col_quota_;
  std::vector<std::size_t> fixed_first_;
  std::vector<char> const_row_;
  std::vector<std::uint32_t> row_counts_, col_counts_;
  std::set<std::vector<std::uint64_t>> used_rows_;

  std::uint64_t prune_row_ = 0, prune_col_ = 0, prune_fixed_ = 0, prune_const_ = 0,
                prune_distinct_ = 0;
};

// Row-pairwise combination of two matrices into codes over `target`.
PlanMatrix cross_matrices(const VariableSet& target, const PlanMatrix& left,
                          const PlanMatrix& right);

// Block assembly: outer cell (I, J) spans block (I, J); `block_of(I, J)`
// supplies the inner content. Kron reuses one matrix for every block, the
// scoped mode hands out independent ones.
PlanMatrix nest_block_matrices(
    const VariableSet& target, const PlanMatrix& outer, std::uint64_t inner_plans,
    std::uint64_t inner_trials, const VariableSet& inner_vars,
    const std::function<const PlanMatrix&(std::uint64_t, std::uint64_t)>& block_of);

}  // namespace planet::solver_detail

#endif  // PLANET_SRC_LEAF_SEARCH_HPP
