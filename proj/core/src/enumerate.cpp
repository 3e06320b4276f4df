#include <algorithm>
#include <string>

#include "leaf_search.hpp"
#include "planet/error.hpp"
#include "planet/solver.hpp"

namespace planet {

namespace {

using solver_detail::cross_matrices;
using solver_detail::LeafSearch;
using solver_detail::nest_block_matrices;

constexpr std::uint64_t kMaterializeCap = 200000;

std::uint64_t pow_checked(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

std::uint64_t count_node(const ResolvedNode& node, NestMode mode) {
  switch (node.kind) {
    case ResolvedNode::Kind::Leaf: {
      LeafSearch search(node, nullptr);
      std::uint64_t count = 0;
      search.run(false, 0, [&](const PlanMatrix&) {
        ++count;
        return true;
      });
      return count;
    }
    case ResolvedNode::Kind::Cross:
      return checked_mul(count_node(*node.first, mode),
                         count_node(*node.second, mode));
    case ResolvedNode::Kind::Nest: {
      std::uint64_t inner = count_node(*node.first, mode);
      std::uint64_t outer = count_node(*node.second, mode);
      if (mode == NestMode::Kron) return checked_mul(inner, outer);
      std::uint64_t blocks =
          checked_mul(node.second->shape.plans, node.second->shape.trials);
      return checked_mul(outer, pow_checked(inner, blocks));
    }
  }
  return 0;
}

std::vector<PlanMatrix> materialize(const ResolvedNode& node, NestMode mode) {
  std::uint64_t total = count_node(node, mode);
  if (total > kMaterializeCap) {
    fail(Errc::DesignTooLarge,
         std::to_string(total) + " matrices is too many to enumerate; use "
         "--count-only or --limit with a smaller design");
  }
  std::vector<PlanMatrix> out;
  out.reserve(total);
  switch (node.kind) {
    case ResolvedNode::Kind::Leaf: {
      LeafSearch search(node, nullptr);
      search.run(false, 0, [&](const PlanMatrix& m) {
        out.push_back(m);
        return true;
      });
      return out;
    }
    case ResolvedNode::Kind::Cross: {
      auto lefts = materialize(*node.first, mode);
      auto rights = materialize(*node.second, mode);
      for (const auto& l : lefts) {
        for (const auto& r : rights) {
          out.push_back(cross_matrices(node.vars, l, r));
        }
      }
      return out;
    }
    case ResolvedNode::Kind::Nest: {
      const ResolvedNode& inner = *node.first;
      const ResolvedNode& outer = *node.second;
      auto inners = materialize(inner, mode);
      auto outers = materialize(outer, mode);
      if (mode == NestMode::Kron) {
        for (const auto& o : outers) {
          for (const auto& i : inners) {
            out.push_back(nest_block_matrices(
                node.vars, o, inner.shape.plans, inner.shape.trials, inner.vars,
                [&](std::uint64_t, std::uint64_t) -> const PlanMatrix& { return i; }));
          }
        }
        return out;
      }
      // Scoped: every block varies independently over the inner solutions.
      std::uint64_t blocks = outer.shape.plans * outer.shape.trials;
      std::vector<std::size_t> pick(blocks, 0);
      for (const auto& o : outers) {
        std::fill(pick.begin(), pick.end(), 0);
        while (true) {
          out.push_back(nest_block_matrices(
              node.vars, o, inner.shape.plans, inner.shape.trials, inner.vars,
              [&](std::uint64_t i, std::uint64_t j) -> const PlanMatrix& {
                return inners[pick[i * outer.shape.trials + j]];
              }));
          std::size_t b = 0;
          while (b < blocks && ++pick[b] == inners.size()) {
            pick[b] = 0;
            ++b;
          }
          if (b == blocks) break;
        }
      }
      return out;
    }
  }
  return out;
}

void check_cell_cap(const ResolvedDesign& rd, const EnumerateOptions& options,
                    bool streamable) {
  std::uint64_t cells = checked_mul(rd.shape.plans, rd.shape.trials);
  if (cells <= options.cell_cap) return;
  if (streamable && options.limit) return;  // bounded walk is fine
  fail(Errc::DesignTooLarge,
       "design has " + std::to_string(cells) + " cells, above the enumeration cap of " +
           std::to_string(options.cell_cap));
}

}  // namespace

void enumerate_plans(const ResolvedDesign& rd, const EnumerateOptions& options,
                     const std::function<bool(const PlanMatrix&)>& sink) {
  const ResolvedNode& root = *rd.root;
  if (root.kind == ResolvedNode::Kind::Leaf) {
    check_cell_cap(rd, options, true);
    std::uint64_t produced = 0;
    LeafSearch search(root, nullptr);
    search.run(false, 0, [&](const PlanMatrix& m) {
      if (!sink(m)) return false;
      ++produced;
      return !(options.limit && produced >= *options.limit);
    });
    return;
  }
  check_cell_cap(rd, options, false);
  std::vector<PlanMatrix> all = materialize(root, options.nest_mode);
  std::sort(all.begin(), all.end(), PlanMatrix::lex_less);
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i] == all[i - 1]) {
      throw std::logic_error("enumeration produced a duplicate matrix");
    }
  }
  std::uint64_t produced = 0;
  for (const auto& m : all) {
    if (options.limit && produced >= *options.limit) break;
    if (!sink(m)) break;
    ++produced;
  }
}

std::uint64_t count_plans(const ResolvedDesign& rd, const EnumerateOptions& options) {
  check_cell_cap(rd, options, false);
  return count_node(*rd.root, options.nest_mode);
}

}  // namespace planet
