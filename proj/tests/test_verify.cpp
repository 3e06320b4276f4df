#include <vector>

#include <doctest.h>

#include "planet/constraints.hpp"
#include "planet/error.hpp"
#include "planet/solver.hpp"
#include "planet/verify.hpp"

using namespace planet;

namespace {

VariableSet single(const std::string& name, std::vector<std::string> levels) {
  return VariableSet({make_variable(name, std::move(levels))});
}

ResolvedDesign latin_square_design(const std::string& var, std::uint64_t order) {
  std::vector<std::string> levels;
  for (std::uint64_t i = 1; i <= order; ++i) levels.push_back("l" + std::to_string(i));
  VariableSet vs = single(var, std::move(levels));
  return resolve(*dsl::limit_plans(dsl::counterbalance(dsl::design(), var), order),
                 vs);
}

PlanMatrix from_rows(const VariableSet& vs,
                     const std::vector<std::vector<std::uint64_t>>& rows) {
  PlanMatrix m(rows.size(), rows[0].size(), vs);
  for (std::uint64_t r = 0; r < rows.size(); ++r) {
    for (std::uint64_t c = 0; c < rows[r].size(); ++c) {
      m.set(r, c, ConditionCode{rows[r][c]});
    }
  }
  return m;
}

}  // namespace

TEST_CASE("Fisher check accepts solver output and the 1x1 square") {
  PlanMatrix m = solve(latin_square_design("t", 4), SolveOptions{.seed = 9});
  CHECK(check_fisher_latin_square(m, "t").pass);

  PlanMatrix tiny = from_rows(single("t", {"l1"}), {{0}});
  CHECK(check_fisher_latin_square(tiny, "t").pass);
}

TEST_CASE("a swapped pair inside one column fails Fisher with coordinates") {
  PlanMatrix m = solve(latin_square_design("t", 3), SolveOptions{.seed = 2});
  PlanMatrix broken = m;
  // swapping two cells within a column keeps columns balanced but breaks rows
  ConditionCode a = broken.at(0, 1), b = broken.at(1, 1);
  broken.set(0, 1, b);
  broken.set(1, 1, a);
  CheckResult r = check_fisher_latin_square(broken, "t");
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_violation.has_value());
  CHECK(r.first_violation->col < 3);
  // column balance is untouched, so the APA reading still passes
  CHECK(check_apa_balance(broken, "t").pass);
}

TEST_CASE("Fisher demands the square shape") {
  PlanMatrix m = from_rows(single("t", {"l1", "l2"}), {{0, 1}, {1, 0}, {0, 1}});
  CHECK_THROWS_WITH_AS(check_fisher_latin_square(m, "t"),
                       doctest::Contains("ShapeMismatch"), Error);
}

TEST_CASE("APA balance is positions only") {
  // full counterbalance of three levels: 6 plans, each level twice per column
  VariableSet vs = single("v", {"a", "b", "c"});
  ResolvedDesign rd = resolve(*dsl::counterbalance(dsl::design(), "v"), vs);
  PlanMatrix m = solve(rd, SolveOptions{.seed = 4});
  CheckResult r = check_apa_balance(m, "v");
  CHECK(r.pass);
  CHECK(std::string(r.detail).find("2 times") != std::string::npos);

  // a Latin square passes with count 1
  PlanMatrix square = solve(latin_square_design("t", 3), SolveOptions{.seed = 1});
  CHECK(check_apa_balance(square, "t").pass);

  // skew one column
  PlanMatrix skewed = m;
  skewed.set(0, 0, skewed.at(1, 0));
  bool ok = true;
  for (std::uint64_t r2 = 0; r2 < skewed.plans(); ++r2) {
    ok &= check_apa_balance(skewed, "v").pass;
  }
  CHECK_FALSE(ok);

  PlanMatrix odd = from_rows(single("t", {"l1", "l2"}), {{0, 1}, {1, 0}, {0, 1}});
  CHECK_THROWS_WITH_AS(check_apa_balance(odd, "t"),
                       doctest::Contains("DivisibilityError"), Error);
}

TEST_CASE("matrices exist that pass the APA reading and fail Fisher's") {
  // both columns balanced, but each row repeats its level
  PlanMatrix m = from_rows(single("v", {"a", "b"}), {{0, 0}, {1, 1}});
  CHECK(check_apa_balance(m, "v").pass);
  CHECK_FALSE(check_fisher_latin_square(m, "v").pass);
}

TEST_CASE("Fisher implies APA over all order-3 squares") {
  ResolvedDesign rd = latin_square_design("t", 3);
  std::uint64_t seen = 0;
  enumerate_plans(rd, {}, [&](const PlanMatrix& m) {
    ++seen;
    REQUIRE(check_fisher_latin_square(m, "t").pass);
    REQUIRE(check_apa_balance(m, "t").pass);
    return true;
  });
  CHECK(seen == 12);
}

TEST_CASE("within/between checks") {
  VariableSet vs = single("cond", {"a", "b", "c"});
  PlanMatrix between = from_rows(vs, {{0}, {1}, {2}});
  CHECK(check_between(between, "cond").pass);
  CHECK_FALSE(check_within(between, "cond").pass);

  PlanMatrix within = from_rows(vs, {{0, 1, 2}, {2, 0, 1}});
  CHECK(check_within(within, "cond").pass);
  CheckResult r = check_between(within, "cond");
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_violation.has_value());
  CHECK(r.first_violation->row == 0);
  CHECK(r.first_violation->col == 1);
}

TEST_CASE("start_with pins the first trial") {
  VariableSet vs = single("tasktype", {"creation", "editing"});
  PlanMatrix good = from_rows(vs, {{0, 1}, {0, 1}});
  CHECK(check_start_with(good, "tasktype", "creation").pass);
  PlanMatrix bad = from_rows(vs, {{0, 1}, {1, 0}});
  CheckResult r = check_start_with(bad, "tasktype", "creation");
  CHECK_FALSE(r.pass);
  CHECK(r.first_violation->row == 1);
}

TEST_CASE("block structure of a Kronecker composition") {
  VariableSet both({make_variable("in", {"i1", "i2"}),
                    make_variable("out", {"o1", "o2"})});
  auto inner_ast = dsl::limit_plans(dsl::counterbalance(dsl::design(), "in"), 2);
  auto outer_ast = dsl::limit_plans(dsl::counterbalance(dsl::design(), "out"), 2);
  ResolvedDesign nest_rd = resolve(*dsl::nest(inner_ast, outer_ast), both);
  PlanMatrix m = solve(nest_rd, SolveOptions{.seed = 3});
  CHECK(check_block_structure(m, nest_rd.blocks).pass);

  // corrupt one cell's outer component
  std::size_t oi = *m.variables().index_of("out");
  std::vector<std::size_t> levels = m.variables().decode(m.at(0, 0));
  levels[*m.variables().index_of("out")] ^= 1;
  PlanMatrix broken = m;
  broken.set(0, 0, m.variables().encode(levels));
  CheckResult r = check_block_structure(broken, nest_rd.blocks);
  CHECK_FALSE(r.pass);
  (void)oi;
}

TEST_CASE("check_all confirms the formula-styling properties") {
  VariableSet vs({make_variable("interface", {"ffl", "latex"}),
                  make_variable("tasknum", {"1", "2"}),
                  make_variable("tasktype", {"creation", "editing"})});
  auto inner = dsl::cross(
      dsl::limit_plans(dsl::counterbalance(dsl::design(), "tasknum"), 2),
      dsl::limit_plans(dsl::counterbalance(dsl::design(), "interface"), 2));
  auto outer = dsl::limit_plans(
      dsl::start_with(dsl::counterbalance(dsl::design(), "tasktype"), "tasktype",
                      "creation"),
      1);
  ResolvedDesign rd = resolve(*dsl::nest(inner, outer), vs);
  PlanMatrix m = solve(rd, SolveOptions{.seed = 12});
  for (const auto& check : check_all(m, rd)) {
    CAPTURE(check.name);
    CAPTURE(check.detail);
    CHECK(check.pass);
  }
  CHECK(check_counterbalance(m, "tasknum").pass);
  CHECK(check_counterbalance(m, "interface").pass);
  CHECK(check_start_with(m, "tasktype", "creation").pass);
  CHECK(check_distinct_rows(m).pass);
}

TEST_CASE("classification") {
  SUBCASE("square counterbalance of a compound variable reads latin-square") {
    Variable f = make_variable("footstep", {"f1", "f2", "f3"});
    Variable p = make_variable("posture", {"p1", "p2", "p3"});
    std::vector<Variable> parts{f, p};
    VariableSet vs({make_compound("footstep_posture", parts)});
    ResolvedDesign rd = resolve(
        *dsl::limit_plans(dsl::counterbalance(dsl::design(), "footstep_posture"), 9),
        vs);
    PlanMatrix m = solve(rd, SolveOptions{.seed = 6});
    Classification c = classify(m, vs);
    REQUIRE(c.per_variable.size() == 1);
    CHECK(c.per_variable[0].second == "latin-square");
  }
  SUBCASE("independent random orders read within-random") {
    VariableSet vs =
        single("gesture", {"g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8", "g9",
                           "g10", "g11"});
    ResolveOptions options;
    options.unit_count = 12;
    ResolvedDesign rd =
        resolve(*dsl::within_subjects(dsl::design(), "gesture"), vs, options);
    PlanMatrix m = solve(rd, SolveOptions{.seed = 7});
    Classification c = classify(m, vs);
    CHECK(c.per_variable[0].second == "within-random");
  }
  SUBCASE("a constant matrix reads between") {
    VariableSet vs = single("v", {"a", "b"});
    PlanMatrix m = from_rows(vs, {{0, 0}, {0, 0}});
    Classification c = classify(m, vs);
    CHECK(c.per_variable[0].second == "between");
  }
}

TEST_CASE("reports are order-stable and serialize to JSON") {
  ResolvedDesign rd = latin_square_design("t", 3);
  PlanMatrix m = solve(rd, SolveOptions{.seed = 1});
  Report r1 = verify_against(m, rd);
  Report r2 = verify_against(m, rd);
  REQUIRE(r1.checks.size() == r2.checks.size());
  for (std::size_t i = 0; i < r1.checks.size(); ++i) {
    CHECK(r1.checks[i].name == r2.checks[i].name);
    CHECK(r1.checks[i].pass == r2.checks[i].pass);
  }
  CHECK(r1.all_pass());
  std::string json = report_to_json(r1);
  CHECK(json == report_to_json(r2));
  CHECK(std::string(json).find("\"checks\"") != std::string::npos);
  CHECK(std::string(json).find("\"classification\"") != std::string::npos);
  CHECK(std::string(json).find("\"first_violation\"") != std::string::npos);
}

TEST_CASE("the flattened constraint list matches the structural walk") {
  // Evaluate the flattened scoped constraints directly on a nested design's
  // output; both verification routes must agree.
  VariableSet both({make_variable("in", {"i1", "i2"}),
                    make_variable("out", {"o1", "o2"})});
  auto inner_ast = dsl::limit_plans(dsl::counterbalance(dsl::design(), "in"), 2);
  auto outer_ast = dsl::limit_plans(dsl::counterbalance(dsl::design(), "out"), 2);
  ResolvedDesign rd = resolve(*dsl::nest(inner_ast, outer_ast), both);
  REQUIRE_FALSE(rd.constraints.empty());
  PlanMatrix m = solve(rd, SolveOptions{.seed = 5});

  const VariableSet& vs = m.variables();
  for (const Constraint& c : rd.constraints) {
    const Region& s = c.scope;
    auto cell_level = [&](std::uint64_t tr, std::uint64_t tc, std::size_t vi) {
      return vs.level_of(
          m.at(s.row0 + tr * s.tile_h, s.col0 + tc * s.tile_w), vi);
    };
    switch (c.kind) {
      case ConstraintKind::RowBalance: {
        std::size_t vi = *vs.index_of(c.variable);
        std::uint64_t quota = s.cols / vs[vi].level_count();
        for (std::uint64_t tr = 0; tr < s.rows; ++tr) {
          std::map<std::size_t, std::uint64_t> counts;
          for (std::uint64_t tc = 0; tc < s.cols; ++tc) {
            counts[cell_level(tr, tc, vi)]++;
          }
          for (auto& [lvl, count] : counts) CHECK(count == quota);
        }
        break;
      }
      case ConstraintKind::ColumnBalance: {
        std::size_t vi = *vs.index_of(c.variable);
        std::uint64_t quota = s.rows / vs[vi].level_count();
        for (std::uint64_t tc = 0; tc < s.cols; ++tc) {
          std::map<std::size_t, std::uint64_t> counts;
          for (std::uint64_t tr = 0; tr < s.rows; ++tr) {
            counts[cell_level(tr, tc, vi)]++;
          }
          for (auto& [lvl, count] : counts) CHECK(count == quota);
        }
        break;
      }
      case ConstraintKind::BlockConstant: {
        std::size_t vi = *vs.index_of(c.variable);
        for (std::uint64_t tr = 0; tr < s.rows; ++tr) {
          for (std::uint64_t tc = 0; tc < s.cols; ++tc) {
            std::size_t expected = cell_level(tr, tc, vi);
            for (std::uint64_t dr = 0; dr < s.tile_h; ++dr) {
              for (std::uint64_t dc = 0; dc < s.tile_w; ++dc) {
                CHECK(vs.level_of(m.at(s.row0 + tr * s.tile_h + dr,
                                       s.col0 + tc * s.tile_w + dc),
                                  vi) == expected);
              }
            }
          }
        }
        break;
      }
      default:
        break;
    }
  }
}
