#include <doctest.h>

#include "planet/constraints.hpp"
#include "planet/error.hpp"
#include "planet/parser.hpp"

using namespace planet;

namespace {

VariableSet vars3() {
  return VariableSet({make_variable("v", {"a", "b", "c"})});
}

Errc resolve_error(const DesignAst& ast, const VariableSet& vs) {
  try {
    resolve(ast, vs);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a resolve error");
  return Errc::UnsatisfiableShape;
}

bool has_constraint(const ResolvedDesign& rd, ConstraintKind kind,
                    const std::string& var = "") {
  for (const auto& c : rd.constraints) {
    if (c.kind == kind && (var.empty() || c.variable == var)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("full counterbalance of three levels is 6 x 3") {
  auto ast = dsl::counterbalance(dsl::design(), "v");
  ResolvedDesign rd = resolve(*ast, vars3());
  CHECK(rd.shape == Shape{6, 3});
  CHECK(rd.root->feasible_rows == 6);
  CHECK(has_constraint(rd, ConstraintKind::RowBalance, "v"));
  CHECK(has_constraint(rd, ConstraintKind::ColumnBalance, "v"));
  CHECK(has_constraint(rd, ConstraintKind::DistinctRows));
}

TEST_CASE("limit_plans(3) on three levels is the Latin-square shape") {
  auto ast = dsl::limit_plans(dsl::counterbalance(dsl::design(), "v"), 3);
  ResolvedDesign rd = resolve(*ast, vars3());
  CHECK(rd.shape == Shape{3, 3});
  CHECK(has_constraint(rd, ConstraintKind::RowBalance, "v"));
  CHECK(has_constraint(rd, ConstraintKind::ColumnBalance, "v"));
  CHECK(has_constraint(rd, ConstraintKind::DistinctRows));
}

TEST_CASE("between-subjects of twelve levels is 12 x 1") {
  VariableSet vs({make_variable("cond", {"c1", "c2", "c3", "c4", "c5", "c6", "c7",
                                         "c8", "c9", "c10", "c11", "c12"})});
  auto ast = dsl::between_subjects(dsl::design(), "cond");
  ResolvedDesign rd = resolve(*ast, vs);
  CHECK(rd.shape == Shape{12, 1});
  CHECK(has_constraint(rd, ConstraintKind::ConstantInRow, "cond"));
  CHECK(has_constraint(rd, ConstraintKind::ColumnBalance, "cond"));
}

TEST_CASE("within-subjects defaults to one plan per unit") {
  VariableSet vs({make_variable("gesture", {"g1", "g2", "g3"})});
  auto ast = dsl::within_subjects(dsl::design(), "gesture");

  ResolvedDesign standalone = resolve(*ast, vs);
  CHECK(standalone.shape == Shape{1, 3});
  CHECK(standalone.plans_per_unit);
  CHECK_FALSE(has_constraint(standalone, ConstraintKind::DistinctRows));
  CHECK_FALSE(has_constraint(standalone, ConstraintKind::ColumnBalance));

  ResolveOptions options;
  options.unit_count = 12;
  ResolvedDesign sized = resolve(*ast, vs, options);
  CHECK(sized.shape == Shape{12, 3});
}

TEST_CASE("the nested formula-styling design is 4 x 4 with 2x2 blocks") {
  Program p = parse(
      "variable interface { ffl latex }\n"
      "variable tasknum { 1 2 }\n"
      "variable tasktype { creation editing }\n"
      "design number_order = design().counterbalance(tasknum).limit_plans(2)\n"
      "design interface_order = design().counterbalance(interface).limit_plans(2)\n"
      "design task_block = design().counterbalance(tasktype)"
      ".start_with(tasktype, creation).limit_plans(1)\n"
      "design full = nest(cross(number_order, interface_order), task_block)\n"
      "units u = units(28)\n"
      "assign u to full\n");
  ResolvedDesign rd = resolve_program(p);
  CHECK(rd.shape == Shape{4, 4});
  CHECK(rd.blocks.grid_rows == 1);
  CHECK(rd.blocks.grid_cols == 2);
  CHECK(rd.blocks.block_vars == std::vector<std::string>{"tasktype"});
  CHECK(has_constraint(rd, ConstraintKind::BlockConstant, "tasktype"));
  CHECK(has_constraint(rd, ConstraintKind::FixedFirstColumn, "tasktype"));
  // variables in declaration order throughout
  REQUIRE(rd.vars.size() == 3);
  CHECK(rd.vars[0].name == "interface");
  CHECK(rd.vars[1].name == "tasknum");
  CHECK(rd.vars[2].name == "tasktype");
}

TEST_CASE("shape_of_cross") {
  VariableSet vs({make_variable("a", {"a1", "a2"}), make_variable("b", {"b1", "b2"}),
                  make_variable("c", {"c1", "c2", "c3"}),
                  make_variable("d", {"d1", "d2", "d3"})});
  auto two = [&](const std::string& v) {
    return resolve(*dsl::limit_plans(dsl::counterbalance(dsl::design(), v), 2), vs);
  };
  auto three = [&](const std::string& v) {
    return resolve(*dsl::limit_plans(dsl::counterbalance(dsl::design(), v), 3), vs);
  };

  CHECK(shape_of_cross(two("a"), two("b")) == Shape{4, 2});
  CHECK(shape_of_cross(three("c"), three("d")) == Shape{9, 3});

  auto one_trial = [&](const std::string& v) {
    return resolve(*dsl::num_trials(dsl::between_subjects(dsl::design(), v), 2), vs);
  };
  ResolvedDesign a1 = resolve(
      *dsl::limit_plans(dsl::num_trials(dsl::within_subjects(dsl::design(), "a"), 2), 1),
      vs);
  ResolvedDesign b1 = resolve(
      *dsl::limit_plans(dsl::num_trials(dsl::within_subjects(dsl::design(), "b"), 2), 1),
      vs);
  CHECK(shape_of_cross(a1, b1) == Shape{1, 2});
  (void)one_trial;

  CHECK_THROWS_WITH_AS(shape_of_cross(two("a"), three("c")),
                       doctest::Contains("CrossArityMismatch"), Error);
  CHECK_THROWS_WITH_AS(shape_of_cross(two("a"), two("a")),
                       doctest::Contains("VariableOverlap"), Error);
}

TEST_CASE("shape_of_nest") {
  VariableSet vs({make_variable("a", {"a1", "a2"}), make_variable("b", {"b1", "b2"}),
                  make_variable("c", {"c1", "c2", "c3"}),
                  make_variable("d", {"d1", "d2"})});
  auto square = [&](const std::string& v, std::uint64_t n) {
    return resolve(*dsl::limit_plans(dsl::counterbalance(dsl::design(), v), n), vs);
  };
  CHECK(shape_of_nest(square("a", 2), square("b", 2)) == Shape{4, 4});
  CHECK(shape_of_nest(square("c", 3), square("d", 2)) == Shape{6, 6});

  // nesting in a unit design keeps the inner shape
  ResolvedDesign unit = resolve(*dsl::num_trials(dsl::design(), 1), vs);
  CHECK(unit.shape == Shape{1, 1});
  CHECK(shape_of_nest(square("a", 2), unit) == Shape{2, 2});
}

TEST_CASE("resolve rejects ill-shaped designs eagerly") {
  VariableSet vs({make_variable("v", {"a", "b", "c"}),
                  make_variable("w", {"x", "y"})});

  // trial count not divisible by the level count
  CHECK(resolve_error(*dsl::num_trials(dsl::counterbalance(dsl::design(), "v"), 4),
                      vs) == Errc::UnsatisfiableShape);
  // no method determines the trial count
  CHECK(resolve_error(*dsl::limit_plans(dsl::design(), 3), vs) ==
        Errc::MissingTrialCount);
  // limit above the number of distinct feasible plans
  CHECK(resolve_error(*dsl::limit_plans(dsl::counterbalance(dsl::design(), "v"), 7),
                      vs) == Errc::UnsatisfiableShape);
  // plans not divisible by the level count under column balance
  CHECK(resolve_error(*dsl::limit_plans(dsl::counterbalance(dsl::design(), "v"), 4),
                      vs) == Errc::UnsatisfiableShape);
  // same factor on both sides of a cross
  CHECK(resolve_error(*dsl::cross(dsl::counterbalance(dsl::design(), "v"),
                                  dsl::counterbalance(dsl::design(), "v")),
                      vs) == Errc::VariableOverlap);
  // different trial counts under cross
  CHECK(resolve_error(*dsl::cross(dsl::counterbalance(dsl::design(), "v"),
                                  dsl::counterbalance(dsl::design(), "w")),
                      vs) == Errc::CrossArityMismatch);
  // methods on composite bases
  CHECK(resolve_error(*dsl::limit_plans(
                          dsl::cross(dsl::counterbalance(dsl::design(), "v"),
                                     dsl::num_trials(
                                         dsl::counterbalance(dsl::design(), "w"), 3)),
                          2),
                      vs) == Errc::UnsupportedMethod);
}

TEST_CASE("nesting a strict subset of conditions is rejected") {
  VariableSet vs({make_variable("mode", {"m1", "m2", "m3"}),
                  make_variable("topic", {"t1", "t2", "t3", "t4", "t5", "t6"})});
  auto inner = dsl::num_trials(dsl::within_subjects(dsl::design(), "topic"), 2);
  auto outer = dsl::counterbalance(dsl::design(), "mode");
  CHECK(resolve_error(*dsl::nest(inner, outer), vs) ==
        Errc::PartialNestingUnsupported);

  // outside a nest the same leaf is a plain shape error
  CHECK(resolve_error(*inner, vs) == Errc::UnsatisfiableShape);
}

TEST_CASE("start_with shrinks the feasible row set") {
  VariableSet vs({make_variable("tasktype", {"creation", "editing"})});
  auto ast = dsl::limit_plans(
      dsl::start_with(dsl::counterbalance(dsl::design(), "tasktype"), "tasktype",
                      "creation"),
      1);
  ResolvedDesign rd = resolve(*ast, vs);
  CHECK(rd.shape == Shape{1, 2});
  CHECK(rd.root->feasible_rows == 1);
}

TEST_CASE("resolution is deterministic") {
  Program p = parse(
      "variable a { x y }\nvariable b { p q }\n"
      "design d = nest(design().counterbalance(a).limit_plans(2), "
      "design().counterbalance(b).limit_plans(2))\n"
      "units u = units(4)\nassign u to d\n");
  ResolvedDesign r1 = resolve_program(p);
  ResolvedDesign r2 = resolve_program(p);
  CHECK(r1.shape == r2.shape);
  REQUIRE(r1.constraints.size() == r2.constraints.size());
  for (std::size_t i = 0; i < r1.constraints.size(); ++i) {
    CHECK(r1.constraints[i].kind == r2.constraints[i].kind);
    CHECK(r1.constraints[i].variable == r2.constraints[i].variable);
    CHECK(r1.constraints[i].scope.row0 == r2.constraints[i].scope.row0);
    CHECK(r1.constraints[i].scope.col0 == r2.constraints[i].scope.col0);
  }
}

TEST_CASE("nest block partition tiles the matrix exactly") {
  Program p = parse(
      "variable a { x y }\nvariable b { p q }\nvariable c { 1 2 3 }\n"
      "design inner = design().counterbalance(a).limit_plans(2)\n"
      "design mid = nest(inner, design().counterbalance(b).limit_plans(2))\n"
      "design full = nest(mid, design().counterbalance(c).limit_plans(3))\n"
      "units u = units(12)\nassign u to full\n");
  ResolvedDesign rd = resolve_program(p);
  CHECK(rd.shape == Shape{12, 12});
  const BlockTree& t = rd.blocks;
  CHECK(t.rows == 12);
  CHECK(t.cols == 12);
  CHECK(t.grid_rows == 3);
  CHECK(t.grid_cols == 3);
  REQUIRE(t.inner);
  CHECK(t.inner->rows * t.grid_rows == t.rows);
  CHECK(t.inner->cols * t.grid_cols == t.cols);
  CHECK(t.inner->grid_rows == 2);
  CHECK(t.inner->grid_cols == 2);
}
