#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "planet/assign.hpp"
#include "planet/csv.hpp"
#include "planet/error.hpp"
#include "planet/parser.hpp"
#include "planet/solver.hpp"
#include "planet/verify.hpp"

namespace planet {

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::SyntaxError:
    case Errc::DuplicateVariable:
    case Errc::DuplicateName:
    case Errc::UnknownIdentifier:
    case Errc::ArityError:
    case Errc::InvalidLevel:
    case Errc::MissingAssign:
    case Errc::DuplicateAssign:
    case Errc::ProjectionError:
    case Errc::CsvFormat:
    case Errc::IoError:
      return 1;
    case Errc::VariableOverlap:
    case Errc::UnsatisfiableShape:
    case Errc::MissingTrialCount:
    case Errc::CrossArityMismatch:
    case Errc::PartialNestingUnsupported:
    case Errc::UnsupportedMethod:
    case Errc::DesignTooLarge:
      return 2;
    case Errc::Unsatisfiable:
      return 3;
    case Errc::Timeout:
      return 4;
    case Errc::UnevenPartition:
      return 5;
    case Errc::ShapeMismatch:
    case Errc::DivisibilityError:
      return 6;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// "-" targets the process stream.
void write_output(const std::string& path, std::ostream& out,
                  const std::string& content) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(Errc::IoError, "cannot write '" + path + "'");
  file << content;
}

struct CommonOptions {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::string nest_mode = "kron";
  double timeout_secs = 60.0;

  NestMode mode() const {
    return nest_mode == "scoped" ? NestMode::Scoped : NestMode::Kron;
  }

  std::chrono::milliseconds timeout() const {
    double secs = timeout_secs;
    if (const char* env = std::getenv("PLANET_TIMEOUT_SECS")) {
      try {
        secs = std::stod(env);
      } catch (...) {
        fail(Errc::IoError, "PLANET_TIMEOUT_SECS is not a number");
      }
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(secs * 1000.0));
  }
};

std::uint64_t effective_seed(const CommonOptions& opts, const Program& program,
                             bool required) {
  if (opts.seed) return *opts.seed;
  if (program.assign.seed) return *program.assign.seed;
  if (required) {
    fail(Errc::ArityError,
         "assign needs a seed: pass --seed or add 'seed N' to the program");
  }
  return 0;
}

std::string table_to_csv(const std::vector<std::string>& comments,
                         const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream buffer;
  write_csv(buffer, comments, rows);
  return buffer.str();
}

int cmd_solve(const CommonOptions& opts, const std::string& out_path,
              std::ostream& out) {
  Program program = parse(read_file(opts.spec_path));
  ResolvedDesign rd = resolve_program(program);
  SolveOptions solve_opts;
  solve_opts.seed = effective_seed(opts, program, false);
  solve_opts.nest_mode = opts.mode();
  solve_opts.timeout = opts.timeout();
  PlanMatrix plans = solve(rd, solve_opts);
  write_output(out_path, out, table_to_csv({}, emit_plan_table(plans)));
  return 0;
}

int cmd_assign(const CommonOptions& opts, const std::string& out_path,
               const std::string& plans_path, const std::string& policy,
               std::ostream& out, std::ostream& err) {
  Program program = parse(read_file(opts.spec_path));
  ResolvedDesign rd = resolve_program(program);
  std::uint64_t seed = effective_seed(opts, program, true);

  SolveOptions solve_opts;
  solve_opts.seed = seed;
  solve_opts.nest_mode = opts.mode();
  solve_opts.timeout = opts.timeout();
  PlanMatrix plans = solve(rd, solve_opts);

  UnitTable units = build_units(program.assigned_units().spec);
  MatchPolicy match_policy =
      policy == "allow-uneven" ? MatchPolicy::AllowUneven : MatchPolicy::Strict;
  AssignmentTable assignment = match(units, plans, seed, match_policy);

  std::vector<std::string> warnings;
  for (const auto& w : assignment.warnings) {
    warnings.push_back("warning: " + w.message);
    err << "warning: " << w.message << "\n";
  }
  write_output(plans_path, out, table_to_csv({}, emit_plan_table(plans)));
  write_output(out_path, out,
               table_to_csv(warnings, emit_assignment_table(units, assignment)));
  return 0;
}

int cmd_verify(const CommonOptions& opts, const std::string& plans_path,
               std::ostream& out) {
  Program program = parse(read_file(opts.spec_path));
  ResolvedDesign rd = resolve_program(program);

  std::istringstream stream(read_file(plans_path));
  CsvFile csv = read_csv(stream);
  if (csv.rows.empty()) fail(Errc::CsvFormat, "plan table is empty");
  const auto& header = csv.rows.front();
  if (header.empty() || header[0] != "plan_id") {
    fail(Errc::CsvFormat, "plan table must start with a plan_id column");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "trial_" + std::to_string(i)) {
      fail(Errc::CsvFormat, "unexpected column '" + header[i] + "'");
    }
  }
  std::uint64_t trials = header.size() - 1;
  std::uint64_t plans = csv.rows.size() - 1;
  PlanMatrix m(plans, trials, rd.vars);
  for (std::uint64_t r = 0; r < plans; ++r) {
    const auto& row = csv.rows[r + 1];
    if (row.size() != header.size()) {
      fail(Errc::CsvFormat, "row " + std::to_string(r) + " has " +
                                std::to_string(row.size()) + " fields");
    }
    for (std::uint64_t c = 0; c < trials; ++c) {
      m.set(r, c, parse_condition_label(rd.vars, row[c + 1]));
    }
  }

  Report report = verify_against(m, rd);
  out << report_to_json(report) << "\n";
  return report.all_pass() ? 0 : 6;
}

int cmd_enumerate(const CommonOptions& opts, bool count_only,
                  std::optional<std::uint64_t> limit, std::ostream& out) {
  Program program = parse(read_file(opts.spec_path));
  ResolvedDesign rd = resolve_program(program);
  EnumerateOptions enum_opts;
  enum_opts.limit = limit;
  enum_opts.nest_mode = opts.mode();
  if (count_only) {
    out << count_plans(rd, enum_opts) << "\n";
    return 0;
  }
  std::uint64_t index = 0;
  enumerate_plans(rd, enum_opts, [&](const PlanMatrix& m) {
    std::ostringstream buffer;
    write_csv(buffer, {"matrix " + std::to_string(index)}, emit_plan_table(m));
    out << buffer.str() << "\n";
    ++index;
    return true;
  });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"experimental assignment toolkit: parse a design program, "
               "generate plan tables, match units to plans, verify tables"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&](CLI::App* cmd, bool with_solver_flags) {
    cmd->add_option("spec", opts.spec_path, "design program (.pln)")->required();
    if (with_solver_flags) {
      cmd->add_option("--seed", opts.seed, "random seed (64-bit)");
      cmd->add_option("--timeout", opts.timeout_secs,
                      "solve budget in seconds (PLANET_TIMEOUT_SECS overrides)");
    }
    cmd->add_option("--nest-mode", opts.nest_mode, "nest composition")
        ->check(CLI::IsMember({"kron", "scoped"}))
        ->default_str("kron");
  };

  auto* solve_cmd = app.add_subcommand("solve", "generate one plan table");
  std::string solve_out = "-";
  add_common(solve_cmd, true);
  solve_cmd->add_option("--out", solve_out, "output CSV path ('-' for stdout)");

  auto* assign_cmd =
      app.add_subcommand("assign", "generate plans and match units to them");
  std::string assign_out = "assignment.csv";
  std::string assign_plans_out = "plans.csv";
  std::string policy = "strict";
  add_common(assign_cmd, true);
  assign_cmd->add_option("--out", assign_out, "assignment CSV path");
  assign_cmd->add_option("--plans-out", assign_plans_out, "plan table CSV path");
  assign_cmd->add_option("--policy", policy, "uneven-partition policy")
      ->check(CLI::IsMember({"strict", "allow-uneven"}));

  auto* verify_cmd =
      app.add_subcommand("verify", "check a plan table against its program");
  std::string verify_plans;
  verify_cmd->add_option("plans", verify_plans, "plan table CSV")->required();
  add_common(verify_cmd, false);

  auto* enum_cmd =
      app.add_subcommand("enumerate", "list every table the design admits");
  bool count_only = false;
  std::optional<std::uint64_t> limit;
  add_common(enum_cmd, false);
  enum_cmd->add_flag("--count-only", count_only, "print the count only");
  enum_cmd->add_option("--limit", limit, "stop after N matrices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(opts, solve_out, out);
    if (assign_cmd->parsed()) {
      return cmd_assign(opts, assign_out, assign_plans_out, policy, out, err);
    }
    if (verify_cmd->parsed()) return cmd_verify(opts, verify_plans, out);
    if (enum_cmd->parsed()) return cmd_enumerate(opts, count_only, limit, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}

}  // namespace planet
