#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <doctest.h>

#include "planet/constraints.hpp"
#include "planet/error.hpp"
#include "planet/parser.hpp"
#include "planet/solver.hpp"
#include "planet/verify.hpp"

using namespace planet;

namespace {

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(PLANET_CORPUS_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

enum class Declared { Counterbalanced, Within, Between };

void collect_methods(const DesignAst& ast, std::map<std::string, Declared>& out) {
  if (ast.base) collect_methods(*ast.base, out);
  if (ast.first) collect_methods(*ast.first, out);
  if (ast.second) collect_methods(*ast.second, out);
  switch (ast.kind) {
    case DesignAst::Kind::Counterbalance:
      out[ast.variable] = Declared::Counterbalanced;
      break;
    case DesignAst::Kind::WithinSubjects:
      out[ast.variable] = Declared::Within;
      break;
    case DesignAst::Kind::BetweenSubjects:
      out[ast.variable] = Declared::Between;
      break;
    default:
      break;
  }
}

// Programs for the published studies the language expresses.
const char* kExpressible[] = {
    "silver_tongued.pln",   "skinergy.pln",   "recommender_snoop.pln",
    "human_augmentation.pln", "framed_questioning.pln", "seated_wip.pln",
    "vr_exergaming.pln",    "rambler.pln",    "electrotactile_grains.pln",
    "artist.pln",           "mousering.pln",
};

}  // namespace

TEST_CASE("every expressible study program solves and classifies back") {
  for (const char* name : kExpressible) {
    CAPTURE(name);
    Program program = parse(read_corpus(name));
    ResolvedDesign rd = resolve_program(program);
    SolveOptions options;
    options.seed = program.assign.seed.value_or(0);
    PlanMatrix m = solve(rd, options);

    Report report = verify_against(m, rd);
    for (const auto& check : report.checks) {
      CAPTURE(check.name);
      CAPTURE(check.detail);
      CHECK(check.pass);
    }

    std::map<std::string, Declared> declared;
    collect_methods(*program.assigned_design().ast, declared);
    std::map<std::string, std::string> classified(
        report.classification.per_variable.begin(),
        report.classification.per_variable.end());
    for (const auto& [var, method] : declared) {
      CAPTURE(var);
      REQUIRE(classified.count(var) == 1);
      const std::string& label = classified[var];
      switch (method) {
        case Declared::Counterbalanced:
          CHECK((label == "counterbalanced" || label == "latin-square"));
          break;
        case Declared::Within:
          CHECK(label == "within-random");
          break;
        case Declared::Between:
          CHECK(label == "between");
          break;
      }
    }
  }
}

TEST_CASE("per-study expectations") {
  SUBCASE("the seated walking study is a 9x9 Latin square over the compound") {
    Program p = parse(read_corpus("seated_wip.pln"));
    ResolvedDesign rd = resolve_program(p);
    CHECK(rd.shape == Shape{9, 9});
    PlanMatrix m = solve(rd, SolveOptions{.seed = 37});
    CHECK(check_fisher_latin_square(m, "footstep_posture").pass);
  }
  SUBCASE("the exergaming study nests emotion squares in intensity blocks") {
    Program p = parse(read_corpus("vr_exergaming.pln"));
    ResolvedDesign rd = resolve_program(p);
    CHECK(rd.shape == Shape{12, 12});
    CHECK(rd.blocks.grid_rows == 3);
    CHECK(rd.blocks.grid_cols == 3);
    PlanMatrix m = solve(rd, SolveOptions{.seed = 38});
    CHECK(check_block_structure(m, rd.blocks).pass);
    CHECK(check_counterbalance(m, "emotion").pass);
    CHECK(check_counterbalance(m, "intensity").pass);
  }
  SUBCASE("the recommender study is twelve between-subjects arms") {
    Program p = parse(read_corpus("recommender_snoop.pln"));
    ResolvedDesign rd = resolve_program(p);
    CHECK(rd.shape == Shape{12, 1});
    PlanMatrix m = solve(rd, SolveOptions{.seed = 33});
    CHECK(check_between(m, "personalization").pass);
    CHECK(check_between(m, "choice").pass);
    CHECK_FALSE(check_within(m, "personalization").pass);
    // all twelve combinations appear exactly once
    std::set<std::uint64_t> combos;
    for (std::uint64_t r = 0; r < 12; ++r) combos.insert(m.at(r, 0).value);
    CHECK(combos.size() == 12);
  }
  SUBCASE("the pronoun study gives every participant an independent order") {
    Program p = parse(read_corpus("silver_tongued.pln"));
    ResolvedDesign rd = resolve_program(p);
    CHECK(rd.plans_per_unit);
    CHECK(rd.shape == Shape{201, 10});
  }
}

TEST_CASE("the partially nested study is rejected with its own diagnostic") {
  Program p = parse(read_corpus("health_buddy.pln"));
  try {
    resolve_program(p);
    FAIL("expected PartialNestingUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PartialNestingUnsupported);
  }
}
