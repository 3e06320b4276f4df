#include <algorithm>
#include <set>
#include <vector>

#include <doctest.h>

#include "planet/error.hpp"
#include "planet/variables.hpp"

using namespace planet;

namespace {

VariableSet ffl_variables() {
  return VariableSet({make_variable("interface", {"ffl", "latex"}),
                      make_variable("tasknum", {"1", "2"}),
                      make_variable("tasktype", {"creation", "editing"})});
}

// Independent oracle: list every level tuple in mixed-radix order (first
// variable most significant) and use the list position as the code.
std::vector<std::vector<std::string>> all_tuples(const VariableSet& vs) {
  std::vector<std::vector<std::string>> tuples{{}};
  for (const auto& v : vs.variables()) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : tuples) {
      for (const auto& level : v.levels) {
        auto t = prefix;
        t.push_back(level);
        next.push_back(std::move(t));
      }
    }
    tuples = std::move(next);
  }
  return tuples;
}

std::uint64_t oracle_code(const VariableSet& vs, const std::vector<std::string>& tuple) {
  auto tuples = all_tuples(vs);
  auto it = std::find(tuples.begin(), tuples.end(), tuple);
  REQUIRE(it != tuples.end());
  return static_cast<std::uint64_t>(it - tuples.begin());
}

}  // namespace

TEST_CASE("first levels encode to zero, last levels to the radix product - 1") {
  VariableSet vs = ffl_variables();
  CHECK(vs.encode_names(std::vector<std::string>{"ffl", "1", "creation"}).value == 0);
  CHECK(vs.encode_names(std::vector<std::string>{"latex", "2", "editing"}).value == 7);
}

TEST_CASE("encoding matches the enumeration oracle") {
  VariableSet vs = ffl_variables();
  for (const auto& tuple : all_tuples(vs)) {
    CHECK(vs.encode_names(tuple).value == oracle_code(vs, tuple));
  }
  CHECK(vs.encode_names(std::vector<std::string>{"latex", "1", "creation"}).value ==
        oracle_code(vs, {"latex", "1", "creation"}));
}

TEST_CASE("unknown level names are rejected") {
  VariableSet vs = ffl_variables();
  CHECK_THROWS_WITH_AS(
      vs.encode_names(std::vector<std::string>{"ffl", "1", "deletion"}),
      doctest::Contains("InvalidLevel"), Error);
}

TEST_CASE("encode/decode round-trips exhaustively on small sets") {
  std::vector<VariableSet> sets;
  sets.push_back(ffl_variables());
  sets.push_back(VariableSet({make_variable("single", {"a"})}));
  sets.push_back(VariableSet({make_variable("x", {"a", "b", "c"}),
                              make_variable("y", {"p", "q", "r", "s"})}));
  sets.push_back(VariableSet(
      {make_variable("big", {"l0", "l1", "l2", "l3", "l4", "l5", "l6", "l7", "l8",
                             "l9"}),
       make_variable("mid", {"m0", "m1", "m2", "m3", "m4"}),
       make_variable("sml", {"s0", "s1"})}));
  for (const auto& vs : sets) {
    REQUIRE(vs.condition_count() <= 10000);
    for (std::uint64_t code = 0; code < vs.condition_count(); ++code) {
      auto names = vs.decode_names(ConditionCode{code});
      CHECK(vs.encode_names(names).value == code);
    }
  }
}

TEST_CASE("projection") {
  VariableSet vs = ffl_variables();
  VariableSet iface({make_variable("interface", {"ffl", "latex"})});
  VariableSet tasknum({make_variable("tasknum", {"1", "2"})});

  SUBCASE("projection of a consistent tuple onto a singleton") {
    ConditionCode code = vs.encode_names(std::vector<std::string>{"ffl", "1", "creation"});
    CHECK(project(code, vs, iface).value ==
          iface.encode_names(std::vector<std::string>{"ffl"}).value);
  }
  SUBCASE("identity projection") {
    for (std::uint64_t c = 0; c < vs.condition_count(); ++c) {
      CHECK(project(ConditionCode{c}, vs, vs).value == c);
    }
  }
  SUBCASE("full projection table matches decode-then-reencode") {
    for (std::uint64_t c = 0; c < vs.condition_count(); ++c) {
      auto names = vs.decode_names(ConditionCode{c});
      // tasknum is the second declared variable.
      auto expected = tasknum.encode_names(std::vector<std::string>{names[1]});
      CHECK(project(ConditionCode{c}, vs, tasknum).value == expected.value);
    }
  }
  SUBCASE("projecting onto a non-subset fails") {
    VariableSet other({make_variable("other", {"x", "y"})});
    CHECK_THROWS_WITH_AS(project(ConditionCode{0}, vs, other),
                         doctest::Contains("ProjectionError"), Error);
  }
}

TEST_CASE("combine") {
  VariableSet iface({make_variable("interface", {"ffl", "latex"})});
  VariableSet ttype({make_variable("tasktype", {"creation", "editing"})});

  SUBCASE("definition") {
    ConditionCode a = iface.encode_names(std::vector<std::string>{"ffl"});
    ConditionCode b = ttype.encode_names(std::vector<std::string>{"creation"});
    VariableSet merged = union_of(iface, ttype);
    CHECK(combine(a, iface, b, ttype).value ==
          merged.encode_names(std::vector<std::string>{"ffl", "creation"}).value);
  }
  SUBCASE("combining with the empty set is the identity") {
    VariableSet empty;
    for (std::uint64_t c = 0; c < iface.condition_count(); ++c) {
      CHECK(combine(ConditionCode{c}, iface, ConditionCode{0}, empty).value == c);
      CHECK(combine(ConditionCode{0}, empty, ConditionCode{c}, iface).value == c);
    }
  }
  SUBCASE("all 2x2 pairs are a bijection onto the 4 combined codes") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 2; ++a) {
      for (std::uint64_t b = 0; b < 2; ++b) {
        seen.insert(combine(ConditionCode{a}, iface, ConditionCode{b}, ttype).value);
      }
    }
    CHECK(seen == std::set<std::uint64_t>{0, 1, 2, 3});
  }
  SUBCASE("projection recovers both operands") {
    VariableSet merged = union_of(iface, ttype);
    for (std::uint64_t a = 0; a < 2; ++a) {
      for (std::uint64_t b = 0; b < 2; ++b) {
        ConditionCode c = combine(ConditionCode{a}, iface, ConditionCode{b}, ttype);
        CHECK(project(c, merged, iface).value == a);
        CHECK(project(c, merged, ttype).value == b);
      }
    }
  }
  SUBCASE("overlapping variable sets are rejected") {
    CHECK_THROWS_WITH_AS(combine(ConditionCode{0}, iface, ConditionCode{0}, iface),
                         doctest::Contains("VariableOverlap"), Error);
  }
}

TEST_CASE("compound variables flatten eagerly") {
  Variable footstep = make_variable("footstep", {"heel_toe", "toe_heel", "flat"});
  Variable posture = make_variable("posture", {"upright", "lean"});
  std::vector<Variable> parts{footstep, posture};
  Variable compound = make_compound("footstep_posture", parts);

  CHECK(compound.level_count() == 6);
  CHECK(compound.levels[0] == "heel_toe-upright");
  CHECK(compound.levels[5] == "flat-lean");
  CHECK(compound.footprint() == std::vector<std::string>{"footstep", "posture"});

  SUBCASE("components must be pairwise distinct") {
    std::vector<Variable> dup{footstep, footstep};
    CHECK_THROWS_WITH_AS(make_compound("ff", dup),
                         doctest::Contains("VariableOverlap"), Error);
  }
  SUBCASE("a compound overlaps its components") {
    VariableSet a({compound});
    VariableSet b({posture});
    CHECK_FALSE(a.disjoint_with(b));
  }
}

TEST_CASE("variable invariants") {
  CHECK_THROWS_WITH_AS(make_variable("v", {"a", "a"}),
                       doctest::Contains("InvalidLevel"), Error);
  CHECK_THROWS_WITH_AS(make_variable("v", {}), doctest::Contains("InvalidLevel"),
                       Error);
  CHECK_THROWS_WITH_AS(
      VariableSet({make_variable("v", {"a"}), make_variable("v", {"b"})}),
      doctest::Contains("DuplicateVariable"), Error);
}
