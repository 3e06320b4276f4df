#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "planet/constraints.hpp"
#include "planet/error.hpp"

namespace planet {

namespace {

// Divisibility failure where the trial window is too small to show every
// condition. Inside a nest this is the partial-nesting pattern and gets its
// own diagnostic; elsewhere it surfaces as a plain shape error.
struct SubsetShapeError : Error {
  using Error::Error;
};

std::uint64_t binomial_checked(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) fail(Errc::DesignTooLarge, "row count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t multinomial_checked(std::uint64_t total,
                                  const std::vector<std::uint64_t>& counts) {
  std::uint64_t remaining = total;
  std::uint64_t result = 1;
  for (std::uint64_t c : counts) {
    result = checked_mul(result, binomial_checked(remaining, c));
    remaining -= c;
  }
  return result;
}

std::uint64_t lcm_checked(std::uint64_t a, std::uint64_t b) {
  return checked_mul(a / std::gcd(a, b), b);
}

struct LeafMethods {
  struct GovernedVar {
    std::string name;
    ResolvedNode::Role role;
  };
  std::vector<GovernedVar> governed;          // fluent order
  std::map<std::string, std::string> starts;  // variable -> fixed first level
  std::optional<std::uint64_t> limit;
  std::optional<std::uint64_t> trials;
};

// Walks a method chain down to its base. Returns the base expression
// (Empty, Cross or Nest) and fills `out` in fluent order.
const DesignAst* unroll_chain(const DesignAst& ast, std::vector<const DesignAst*>& out) {
  const DesignAst* node = &ast;
  std::vector<const DesignAst*> reversed;
  while (node->base) {
    reversed.push_back(node);
    node = node->base.get();
  }
  if (node->kind != DesignAst::Kind::Empty && !reversed.empty()) {
    fail(Errc::UnsupportedMethod,
         "design methods cannot be chained onto cross/nest expressions");
  }
  out.assign(reversed.rbegin(), reversed.rend());
  return node;
}

class Resolver {
public:
  Resolver(const VariableSet& vs, const ResolveOptions& options)
      : vs_(vs), options_(options) {}

  std::shared_ptr<const ResolvedNode> resolve_node(const DesignAst& ast, bool root) {
    switch (ast.kind) {
      case DesignAst::Kind::Cross:
      case DesignAst::Kind::Nest:
        return resolve_composite(ast);
      default:
        return resolve_leaf(ast, root);
    }
  }

private:
  const Variable& lookup(const std::string& name) const {
    const Variable* v = vs_.find(name);
    if (!v) fail(Errc::UnknownIdentifier, "unknown variable '" + name + "'");
    return *v;
  }

  VariableSet subset_in_declaration_order(const std::set<std::string>& names) const {
    std::vector<Variable> vars;
    for (const auto& v : vs_.variables()) {
      if (names.count(v.name)) vars.push_back(v);
    }
    return VariableSet(std::move(vars));
  }

  std::shared_ptr<const ResolvedNode> resolve_leaf(const DesignAst& ast, bool root) {
    std::vector<const DesignAst*> chain;
    unroll_chain(ast, chain);

    LeafMethods m;
    for (const DesignAst* node : chain) {
      switch (node->kind) {
        case DesignAst::Kind::Counterbalance:
          m.governed.push_back({node->variable, ResolvedNode::Role::Counterbalance});
          break;
        case DesignAst::Kind::WithinSubjects:
          m.governed.push_back({node->variable, ResolvedNode::Role::Within});
          break;
        case DesignAst::Kind::BetweenSubjects:
          m.governed.push_back({node->variable, ResolvedNode::Role::Between});
          break;
        case DesignAst::Kind::LimitPlans:
          m.limit = node->count;
          break;
        case DesignAst::Kind::NumTrials:
          m.trials = node->count;
          break;
        case DesignAst::Kind::StartWith: {
          const Variable& v = lookup(node->variable);
          if (!v.level_index(node->level)) {
            fail(Errc::InvalidLevel, "variable '" + v.name + "' has no level '" +
                                         node->level + "'");
          }
          auto [it, inserted] = m.starts.emplace(node->variable, node->level);
          if (!inserted && it->second != node->level) {
            fail(Errc::UnsatisfiableShape,
                 "conflicting start_with levels for variable '" + node->variable + "'");
          }
          break;
        }
        case DesignAst::Kind::Multifact:
          // Registration happens when the program is built; the compound
          // enters the design only when a later method targets it.
          lookup(join_parts(node->parts));
          break;
        default:
          break;
      }
    }
    return build_leaf(m, root);
  }

  static std::string join_parts(const std::vector<std::string>& parts) {
    std::string name;
    for (const auto& p : parts) {
      if (!name.empty()) name += "_";
      name += p;
    }
    return name;
  }

  std::shared_ptr<const ResolvedNode> build_leaf(const LeafMethods& m, bool root) {
    // Governed variables must not share factors.
    std::set<std::string> atoms;
    std::set<std::string> governed_names;
    for (const auto& g : m.governed) {
      const Variable& v = lookup(g.name);
      if (!governed_names.insert(g.name).second) {
        fail(Errc::VariableOverlap,
             "variable '" + g.name + "' assigned twice in one design");
      }
      for (const auto& atom : v.footprint()) {
        if (!atoms.insert(atom).second) {
          fail(Errc::VariableOverlap,
               "designs may assign factor '" + atom + "' only once");
        }
      }
    }
    for (const auto& [var, level] : m.starts) {
      (void)level;
      if (!governed_names.count(var)) {
        fail(Errc::UnsupportedMethod,
             "start_with targets variable '" + var + "' which this design does not assign");
      }
    }

    bool any_cb = false, any_within = false;
    for (const auto& g : m.governed) {
      any_cb |= g.role == ResolvedNode::Role::Counterbalance;
      any_within |= g.role == ResolvedNode::Role::Within;
    }

    // Trial count.
    std::uint64_t trials = 0;
    if (m.trials) {
      trials = *m.trials;
    } else {
      std::uint64_t need = 0;
      for (const auto& g : m.governed) {
        if (g.role == ResolvedNode::Role::Between) continue;
        std::uint64_t n = lookup(g.name).level_count();
        need = need == 0 ? n : lcm_checked(need, n);
      }
      if (need == 0) {
        if (m.governed.empty()) {
          fail(Errc::MissingTrialCount, "no method determines the trial count");
        }
        need = 1;  // between-subjects only
      }
      trials = need;
    }

    // Row-balance divisibility, eagerly.
    for (const auto& g : m.governed) {
      if (g.role == ResolvedNode::Role::Between) continue;
      std::uint64_t n = lookup(g.name).level_count();
      if (trials % n != 0) {
        std::string msg = "variable '" + g.name + "' has " + std::to_string(n) +
                          " levels, not a divisor of " + std::to_string(trials) +
                          " trials";
        if (trials < n) {
          throw SubsetShapeError(Errc::UnsatisfiableShape,
                                 msg + "; only a subset of conditions would appear");
        }
        fail(Errc::UnsatisfiableShape, msg);
      }
    }

    // Distinct feasible rows under the per-row constraints.
    std::uint64_t feasible = 1;
    for (const auto& g : m.governed) {
      const Variable& v = lookup(g.name);
      std::uint64_t n = v.level_count();
      auto start = m.starts.find(g.name);
      if (g.role == ResolvedNode::Role::Between) {
        feasible = checked_mul(feasible, start == m.starts.end() ? n : 1);
        continue;
      }
      std::uint64_t quota = trials / n;
      std::vector<std::uint64_t> counts(n, quota);
      std::uint64_t slots = trials;
      if (start != m.starts.end()) {
        counts[*v.level_index(start->second)] -= 1;
        slots -= 1;
      }
      feasible = checked_mul(feasible, multinomial_checked(slots, counts));
    }

    // Plan count.
    bool per_unit = false;
    std::uint64_t plans = 0;
    if (m.limit) {
      plans = *m.limit;
      if (any_cb && plans > feasible) {
        fail(Errc::UnsatisfiableShape,
             "limit_plans(" + std::to_string(plans) + ") exceeds the " +
                 std::to_string(feasible) + " distinct feasible plans");
      }
    } else if (any_cb) {
      plans = feasible;
    } else if (any_within) {
      per_unit = true;
      plans = root && options_.unit_count ? *options_.unit_count : 1;
    } else if (!m.governed.empty()) {
      plans = feasible;
    } else {
      plans = 1;
    }
    if (plans == 0) fail(Errc::UnsatisfiableShape, "design admits no plans");

    auto node = std::make_shared<ResolvedNode>();
    node->kind = ResolvedNode::Kind::Leaf;
    node->shape = Shape{plans, trials};
    node->vars = subset_in_declaration_order(governed_names);
    node->distinct_rows = any_cb;
    node->per_unit_default = per_unit;
    node->feasible_rows = feasible;

    for (const auto& g : m.governed) {
      node->leaf_vars.push_back(
          ResolvedNode::LeafVar{*node->vars.index_of(g.name), g.role});
    }
    std::sort(node->leaf_vars.begin(), node->leaf_vars.end(),
              [](const auto& a, const auto& b) { return a.var_index < b.var_index; });

    // Concrete constraints, full-grid scope.
    Region grid{0, 0, plans, trials, 1, 1};
    std::vector<Constraint>& cs = node->local;
    for (const auto& lv : node->leaf_vars) {
      const Variable& v = node->vars[lv.var_index];
      std::uint64_t n = v.level_count();
      bool column_balance = false;
      switch (lv.role) {
        case ResolvedNode::Role::Counterbalance:
        case ResolvedNode::Role::Within:
          if (lv.role == ResolvedNode::Role::Counterbalance) {
            cs.push_back({ConstraintKind::RowBalance, v.name, "", {}, grid});
            column_balance = true;
          } else {
            cs.push_back({ConstraintKind::RowBalance, v.name, "", {}, grid});
          }
          break;
        case ResolvedNode::Role::Between:
          cs.push_back({ConstraintKind::ConstantInRow, v.name, "", {}, grid});
          column_balance = true;
          break;
      }
      if (column_balance && plans > 1) {
        if (plans % n != 0) {
          fail(Errc::UnsatisfiableShape,
               "variable '" + v.name + "' has " + std::to_string(n) +
                   " levels, not a divisor of " + std::to_string(plans) + " plans");
        }
        if (m.starts.count(v.name) && n > 1) {
          fail(Errc::UnsatisfiableShape,
               "start_with('" + v.name + "') pins the first trial, which contradicts "
               "column balance; add limit_plans(1) or drop the constraint");
        }
        cs.push_back({ConstraintKind::ColumnBalance, v.name, "", {}, grid});
      }
    }
    for (const auto& [var, level] : m.starts) {
      cs.push_back({ConstraintKind::FixedFirstColumn, var, level, {}, grid});
    }
    if (node->distinct_rows) {
      std::vector<std::string> names;
      for (const auto& v : node->vars.variables()) names.push_back(v.name);
      cs.push_back({ConstraintKind::DistinctRows, "", "", names, grid});
    }
    return node;
  }

  std::shared_ptr<const ResolvedNode> resolve_composite(const DesignAst& ast) {
    std::shared_ptr<const ResolvedNode> a, b;
    if (ast.kind == DesignAst::Kind::Nest) {
      try {
        a = resolve_node(*ast.first, false);
        b = resolve_node(*ast.second, false);
      } catch (const SubsetShapeError& e) {
        throw Error(Errc::PartialNestingUnsupported,
                    std::string("nesting a strict subset of conditions is not "
                                "supported: ") +
                        e.what());
      }
    } else {
      a = resolve_node(*ast.first, false);
      b = resolve_node(*ast.second, false);
    }

    if (!a->vars.disjoint_with(b->vars)) {
      fail(Errc::VariableOverlap, "subdesigns share a factor");
    }

    auto node = std::make_shared<ResolvedNode>();
    node->first = a;
    node->second = b;
    std::set<std::string> names;
    for (const auto& v : a->vars.variables()) names.insert(v.name);
    for (const auto& v : b->vars.variables()) names.insert(v.name);
    node->vars = subset_in_declaration_order(names);
    node->distinct_rows = a->distinct_rows && b->distinct_rows;

    if (ast.kind == DesignAst::Kind::Cross) {
      node->kind = ResolvedNode::Kind::Cross;
      if (a->shape.trials != b->shape.trials) {
        fail(Errc::CrossArityMismatch,
             "crossed subdesigns have different trial counts (" +
                 std::to_string(a->shape.trials) + " vs " +
                 std::to_string(b->shape.trials) + ")");
      }
      node->shape = Shape{checked_mul(a->shape.plans, b->shape.plans),
                          a->shape.trials};
    } else {
      node->kind = ResolvedNode::Kind::Nest;
      node->shape = Shape{checked_mul(b->shape.plans, a->shape.plans),
                          checked_mul(b->shape.trials, a->shape.trials)};
    }
    return node;
  }

  const VariableSet& vs_;
  ResolveOptions options_;
};

std::shared_ptr<const BlockTree> scale_block_tree(const BlockTree& tree,
                                                  std::uint64_t fh, std::uint64_t fw) {
  auto out = std::make_shared<BlockTree>(tree);
  out->rows *= fh;
  out->cols *= fw;
  if (tree.outer) out->outer = scale_block_tree(*tree.outer, fh, fw);
  if (tree.inner) out->inner = scale_block_tree(*tree.inner, fh, fw);
  return out;
}

BlockTree build_block_tree(const ResolvedNode& node) {
  BlockTree tree;
  tree.rows = node.shape.plans;
  tree.cols = node.shape.trials;
  if (node.kind != ResolvedNode::Kind::Nest) return tree;

  const ResolvedNode& inner = *node.first;
  const ResolvedNode& outer = *node.second;
  tree.grid_rows = outer.shape.plans;
  tree.grid_cols = outer.shape.trials;
  for (const auto& v : outer.vars.variables()) tree.block_vars.push_back(v.name);
  if (BlockTree sub = build_block_tree(inner); !sub.trivial()) {
    tree.inner = std::make_shared<BlockTree>(std::move(sub));
  }
  if (BlockTree sub = build_block_tree(outer); !sub.trivial()) {
    tree.outer = scale_block_tree(sub, inner.shape.plans, inner.shape.trials);
  }
  return tree;
}

std::optional<std::vector<Constraint>> flatten(const ResolvedNode& node,
                                               std::uint64_t row0, std::uint64_t col0,
                                               std::uint64_t tile_h,
                                               std::uint64_t tile_w);

std::optional<std::vector<Constraint>> flatten_cross(const ResolvedNode& node,
                                                     std::uint64_t row0,
                                                     std::uint64_t col0,
                                                     std::uint64_t tile_h,
                                                     std::uint64_t tile_w) {
  // Liftable only when both children are plain leaves: their per-row and
  // per-column families then apply uniformly to the whole region.
  const ResolvedNode& l = *node.first;
  const ResolvedNode& r = *node.second;
  if (l.kind != ResolvedNode::Kind::Leaf || r.kind != ResolvedNode::Kind::Leaf) {
    return std::nullopt;
  }
  Region grid{row0, col0, node.shape.plans, node.shape.trials, tile_h, tile_w};
  std::vector<Constraint> out;
  for (const ResolvedNode* child : {&l, &r}) {
    for (const Constraint& c : child->local) {
      if (c.kind == ConstraintKind::DistinctRows) continue;
      Constraint lifted = c;
      lifted.scope = grid;
      out.push_back(std::move(lifted));
    }
  }
  if (l.distinct_rows && r.distinct_rows) {
    std::vector<std::string> names;
    for (const auto& v : node.vars.variables()) names.push_back(v.name);
    out.push_back({ConstraintKind::DistinctRows, "", "", names, grid});
  }
  return out;
}

std::optional<std::vector<Constraint>> flatten(const ResolvedNode& node,
                                               std::uint64_t row0, std::uint64_t col0,
                                               std::uint64_t tile_h,
                                               std::uint64_t tile_w) {
  switch (node.kind) {
    case ResolvedNode::Kind::Leaf: {
      std::vector<Constraint> out;
      Region grid{row0, col0, node.shape.plans, node.shape.trials, tile_h, tile_w};
      for (const Constraint& c : node.local) {
        Constraint scoped = c;
        scoped.scope = grid;
        out.push_back(std::move(scoped));
      }
      return out;
    }
    case ResolvedNode::Kind::Cross:
      return flatten_cross(node, row0, col0, tile_h, tile_w);
    case ResolvedNode::Kind::Nest: {
      const ResolvedNode& inner = *node.first;
      const ResolvedNode& outer = *node.second;
      std::vector<Constraint> out;
      Region block_grid{row0,
                        col0,
                        outer.shape.plans,
                        outer.shape.trials,
                        tile_h * inner.shape.plans,
                        tile_w * inner.shape.trials};
      for (const auto& v : outer.vars.variables()) {
        out.push_back({ConstraintKind::BlockConstant, v.name, "", {}, block_grid});
      }
      auto outer_flat = flatten(outer, row0, col0, tile_h * inner.shape.plans,
                                tile_w * inner.shape.trials);
      if (!outer_flat) return std::nullopt;
      out.insert(out.end(), outer_flat->begin(), outer_flat->end());
      for (std::uint64_t i = 0; i < outer.shape.plans; ++i) {
        for (std::uint64_t j = 0; j < outer.shape.trials; ++j) {
          auto inner_flat =
              flatten(inner, row0 + i * inner.shape.plans * tile_h,
                      col0 + j * inner.shape.trials * tile_w, tile_h, tile_w);
          if (!inner_flat) return std::nullopt;
          out.insert(out.end(), inner_flat->begin(), inner_flat->end());
        }
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* constraint_kind_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::RowBalance: return "row_balance";
    case ConstraintKind::ColumnBalance: return "column_balance";
    case ConstraintKind::FixedFirstColumn: return "fixed_first_column";
    case ConstraintKind::DistinctRows: return "distinct_rows";
    case ConstraintKind::ConstantInRow: return "constant_in_row";
    case ConstraintKind::BlockConstant: return "block_constant";
  }
  return "?";
}

ResolvedDesign resolve(const DesignAst& ast, const VariableSet& vs,
                       const ResolveOptions& options) {
  Resolver resolver(vs, options);
  auto root = resolver.resolve_node(ast, true);
  ResolvedDesign rd;
  rd.shape = root->shape;
  rd.vars = root->vars;
  rd.root = root;
  if (auto flat = flatten(*root, 0, 0, 1, 1)) {
    rd.constraints = std::move(*flat);
  }
  rd.blocks = build_block_tree(*root);
  rd.plans_per_unit = root->per_unit_default;
  return rd;
}

ResolvedDesign resolve_program(const Program& program,
                               const std::optional<std::uint64_t>& unit_count_override) {
  const NamedDesign& design = program.assigned_design();
  const NamedUnits& units = program.assigned_units();
  ResolveOptions options;
  options.unit_count = unit_count_override ? *unit_count_override
                                           : units.spec.assignable();
  return resolve(*design.ast, program.variables, options);
}

Shape shape_of_cross(const ResolvedDesign& left, const ResolvedDesign& right) {
  if (left.shape.trials != right.shape.trials) {
    fail(Errc::CrossArityMismatch, "crossed designs have different trial counts");
  }
  if (!left.vars.disjoint_with(right.vars)) {
    fail(Errc::VariableOverlap, "crossed designs share a factor");
  }
  return Shape{checked_mul(left.shape.plans, right.shape.plans), left.shape.trials};
}

Shape shape_of_nest(const ResolvedDesign& inner, const ResolvedDesign& outer) {
  if (!inner.vars.disjoint_with(outer.vars)) {
    fail(Errc::VariableOverlap, "nested designs share a factor");
  }
  return Shape{checked_mul(outer.shape.plans, inner.shape.plans),
               checked_mul(outer.shape.trials, inner.shape.trials)};
}

}  // namespace planet
