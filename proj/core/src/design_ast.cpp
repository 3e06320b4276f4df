#include "planet/design_ast.hpp"

#include <algorithm>

#include "planet/error.hpp"

namespace planet {

bool ast_equal(const DesignAst& a, const DesignAst& b) {
  if (a.kind != b.kind || a.variable != b.variable || a.level != b.level ||
      a.parts != b.parts || a.count != b.count) {
    return false;
  }
  auto eq = [](const DesignPtr& x, const DesignPtr& y) {
    if (!x || !y) return !x && !y;
    return ast_equal(*x, *y);
  };
  return eq(a.base, b.base) && eq(a.first, b.first) && eq(a.second, b.second);
}

namespace {
void collect_variables(const DesignAst& ast, std::vector<std::string>& out) {
  if (ast.base) collect_variables(*ast.base, out);
  if (ast.first) collect_variables(*ast.first, out);
  if (ast.second) collect_variables(*ast.second, out);
  auto push = [&out](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  if (!ast.variable.empty()) push(ast.variable);
  for (const auto& part : ast.parts) push(part);
}
}  // namespace

std::vector<std::string> variables_of(const DesignAst& ast) {
  std::vector<std::string> out;
  collect_variables(ast, out);
  return out;
}

namespace dsl {

namespace {
std::shared_ptr<DesignAst> method(DesignAst::Kind kind, DesignPtr base) {
  auto node = std::make_shared<DesignAst>();
  node->kind = kind;
  node->base = std::move(base);
  return node;
}
}  // namespace

DesignPtr design() { return std::make_shared<DesignAst>(); }

DesignPtr counterbalance(DesignPtr base, std::string var) {
  auto node = method(DesignAst::Kind::Counterbalance, std::move(base));
  node->variable = std::move(var);
  return node;
}

DesignPtr within_subjects(DesignPtr base, std::string var) {
  auto node = method(DesignAst::Kind::WithinSubjects, std::move(base));
  node->variable = std::move(var);
  return node;
}

DesignPtr between_subjects(DesignPtr base, std::string var) {
  auto node = method(DesignAst::Kind::BetweenSubjects, std::move(base));
  node->variable = std::move(var);
  return node;
}

DesignPtr limit_plans(DesignPtr base, std::uint64_t n) {
  auto node = method(DesignAst::Kind::LimitPlans, std::move(base));
  node->count = n;
  return node;
}

DesignPtr num_trials(DesignPtr base, std::uint64_t n) {
  auto node = method(DesignAst::Kind::NumTrials, std::move(base));
  node->count = n;
  return node;
}

DesignPtr start_with(DesignPtr base, std::string var, std::string level) {
  auto node = method(DesignAst::Kind::StartWith, std::move(base));
  node->variable = std::move(var);
  node->level = std::move(level);
  return node;
}

DesignPtr multifact(DesignPtr base, std::vector<std::string> parts) {
  auto node = method(DesignAst::Kind::Multifact, std::move(base));
  node->parts = std::move(parts);
  return node;
}

DesignPtr cross(DesignPtr left, DesignPtr right) {
  auto node = std::make_shared<DesignAst>();
  node->kind = DesignAst::Kind::Cross;
  node->first = std::move(left);
  node->second = std::move(right);
  return node;
}

DesignPtr nest(DesignPtr inner, DesignPtr outer) {
  auto node = std::make_shared<DesignAst>();
  node->kind = DesignAst::Kind::Nest;
  node->first = std::move(inner);
  node->second = std::move(outer);
  return node;
}

}  // namespace dsl

const NamedDesign* Program::find_design(std::string_view name) const {
  for (const auto& d : designs) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const NamedUnits* Program::find_units(std::string_view name) const {
  for (const auto& u : units) {
    if (u.name == name) return &u;
  }
  return nullptr;
}

const NamedDesign& Program::assigned_design() const {
  const NamedDesign* d = find_design(assign.design_name);
  if (!d) fail(Errc::UnknownIdentifier, "unknown design '" + assign.design_name + "'");
  return *d;
}

const NamedUnits& Program::assigned_units() const {
  const NamedUnits* u = find_units(assign.units_name);
  if (!u) fail(Errc::UnknownIdentifier, "unknown units '" + assign.units_name + "'");
  return *u;
}

bool program_equal(const Program& a, const Program& b) {
  if (!(a.variables == b.variables)) return false;
  if (a.designs.size() != b.designs.size()) return false;
  for (std::size_t i = 0; i < a.designs.size(); ++i) {
    if (a.designs[i].name != b.designs[i].name) return false;
    if (!ast_equal(*a.designs[i].ast, *b.designs[i].ast)) return false;
  }
  if (a.units.size() != b.units.size()) return false;
  for (std::size_t i = 0; i < a.units.size(); ++i) {
    if (a.units[i].name != b.units[i].name || !(a.units[i].spec == b.units[i].spec)) {
      return false;
    }
  }
  return a.assign.units_name == b.assign.units_name &&
         a.assign.design_name == b.assign.design_name &&
         a.assign.seed == b.assign.seed;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DuplicateVariable: return "DuplicateVariable";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
    case Errc::ArityError: return "ArityError";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::MissingAssign: return "MissingAssign";
    case Errc::DuplicateAssign: return "DuplicateAssign";
    case Errc::ProjectionError: return "ProjectionError";
    case Errc::VariableOverlap: return "VariableOverlap";
    case Errc::UnsatisfiableShape: return "UnsatisfiableShape";
    case Errc::MissingTrialCount: return "MissingTrialCount";
    case Errc::CrossArityMismatch: return "CrossArityMismatch";
    case Errc::PartialNestingUnsupported: return "PartialNestingUnsupported";
    case Errc::UnsupportedMethod: return "UnsupportedMethod";
    case Errc::Unsatisfiable: return "Unsatisfiable";
    case Errc::Timeout: return "Timeout";
    case Errc::DesignTooLarge: return "DesignTooLarge";
    case Errc::UnevenPartition: return "UnevenPartition";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DivisibilityError: return "DivisibilityError";
    case Errc::CsvFormat: return "CsvFormat";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code) {}

Error::Error(Errc code, const std::string& message, int line, int col)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message +
                         " (line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ")"),
      code_(code),
      line_(line),
      col_(col) {}

}  // namespace planet
