#include <cctype>
#include <sstream>

#include "planet/parser.hpp"

namespace planet {

namespace {

bool bare_safe(const std::string& s) {
  if (s.empty()) return false;
  bool all_digits = true;
  for (char c : s) all_digits &= std::isdigit(static_cast<unsigned char>(c)) != 0;
  if (all_digits) return true;  // renders as an INT token
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  // Keywords would change meaning if left bare.
  static const char* reserved[] = {"variable", "design", "units", "clusters",
                                   "assign",   "to",     "seed",  "cross",
                                   "nest"};
  for (const char* kw : reserved) {
    if (s == kw) return false;
  }
  return true;
}

std::string level_text(const std::string& s) {
  if (bare_safe(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void render_design(const DesignAst& ast, std::ostream& out) {
  switch (ast.kind) {
    case DesignAst::Kind::Empty:
      out << "design()";
      return;
    case DesignAst::Kind::Cross:
    case DesignAst::Kind::Nest:
      out << (ast.kind == DesignAst::Kind::Cross ? "cross(" : "nest(");
      render_design(*ast.first, out);
      out << ", ";
      render_design(*ast.second, out);
      out << ")";
      return;
    default:
      break;
  }
  render_design(*ast.base, out);
  switch (ast.kind) {
    case DesignAst::Kind::Counterbalance:
      out << ".counterbalance(" << ast.variable << ")";
      break;
    case DesignAst::Kind::WithinSubjects:
      out << ".within_subjects(" << ast.variable << ")";
      break;
    case DesignAst::Kind::BetweenSubjects:
      out << ".between_subjects(" << ast.variable << ")";
      break;
    case DesignAst::Kind::LimitPlans:
      out << ".limit_plans(" << ast.count << ")";
      break;
    case DesignAst::Kind::NumTrials:
      out << ".num_trials(" << ast.count << ")";
      break;
    case DesignAst::Kind::StartWith:
      out << ".start_with(" << ast.variable << ", " << level_text(ast.level) << ")";
      break;
    case DesignAst::Kind::Multifact: {
      out << ".multifact(";
      for (std::size_t i = 0; i < ast.parts.size(); ++i) {
        if (i) out << ", ";
        out << ast.parts[i];
      }
      out << ")";
      break;
    }
    default:
      break;
  }
}

}  // namespace

std::string render(const Program& program) {
  std::ostringstream out;
  for (const auto& v : program.variables.variables()) {
    if (!v.components.empty()) continue;  // compounds re-emerge from multifact
    out << "variable " << v.name << " {";
    for (const auto& level : v.levels) out << " " << level_text(level);
    out << " }\n";
  }
  for (const auto& u : program.units) {
    out << "units " << u.name << " = ";
    if (u.spec.kind == UnitsSpec::Kind::Units) {
      out << "units(" << u.spec.count << ")";
    } else {
      out << "clusters(" << u.spec.count << ", units(" << u.spec.members_per_cluster
          << "))";
    }
    out << "\n";
  }
  for (const auto& d : program.designs) {
    out << "design " << d.name << " = ";
    render_design(*d.ast, out);
    out << "\n";
  }
  out << "assign " << program.assign.units_name << " to "
      << program.assign.design_name;
  if (program.assign.seed) out << " seed " << *program.assign.seed;
  out << "\n";
  return out.str();
}

}  // namespace planet
