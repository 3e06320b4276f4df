#include "planet/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "planet/error.hpp"

namespace planet {

namespace {

enum class Tok {
  Ident,
  Int,
  Str,
  Dot,
  Comma,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Equals,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t int_value = 0;
  int line = 1, col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Str: return "string";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Equals: return "'='";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      std::size_t n = 0;
      while (i + n < src.size() && src[i + n] != '\n') ++n;
      advance(n);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t n = 1;
      while (i + n < src.size() && ident_char(src[i + n])) ++n;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, n));
      advance(n);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      std::uint64_t value = 0;
      while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) {
        std::uint64_t digit = static_cast<std::uint64_t>(src[i + n] - '0');
        if (value > (UINT64_MAX - digit) / 10) {
          throw Error(Errc::SyntaxError, "integer literal too large", line, col);
        }
        value = value * 10 + digit;
        ++n;
      }
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, n));
      t.int_value = value;
      advance(n);
    } else if (c == '"') {
      std::string text;
      std::size_t n = 1;
      bool closed = false;
      while (i + n < src.size()) {
        char d = src[i + n];
        if (d == '"') {
          ++n;
          closed = true;
          break;
        }
        if (d == '\\' && i + n + 1 < src.size() &&
            (src[i + n + 1] == '"' || src[i + n + 1] == '\\')) {
          text.push_back(src[i + n + 1]);
          n += 2;
          continue;
        }
        if (d == '\n') break;
        text.push_back(d);
        ++n;
      }
      if (!closed) {
        throw Error(Errc::SyntaxError, "unterminated string literal", line, col);
      }
      t.kind = Tok::Str;
      t.text = std::move(text);
      advance(n);
    } else {
      switch (c) {
        case '.': t.kind = Tok::Dot; break;
        case ',': t.kind = Tok::Comma; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case '=': t.kind = Tok::Equals; break;
        default:
          throw Error(Errc::SyntaxError,
                      std::string("unexpected character '") + c + "'", line, col);
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program run() {
    while (!at(Tok::End)) {
      statement();
    }
    if (!saw_assign_) {
      throw Error(Errc::MissingAssign, "program has no assign statement", cur().line,
                  cur().col);
    }
    Program p;
    std::vector<Variable> all = atomics_;
    all.insert(all.end(), compounds_.begin(), compounds_.end());
    p.variables = VariableSet(std::move(all));
    p.designs = std::move(designs_);
    p.units = std::move(units_);
    p.assign = std::move(assign_);
    return p;
  }

private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) {
      throw Error(Errc::SyntaxError,
                  "expected " + what + ", found " + tok_name(cur().kind),
                  cur().line, cur().col);
    }
    return toks_[pos_++];
  }

  Token expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      throw Error(Errc::SyntaxError,
                  "expected '" + std::string(kw) + "', found '" + cur().text + "'",
                  cur().line, cur().col);
    }
    return toks_[pos_++];
  }

  void statement() {
    if (at_keyword("variable")) {
      vardecl();
    } else if (at_keyword("design") && peek().kind == Tok::Ident) {
      designdecl();
    } else if (at_keyword("units") && peek().kind == Tok::Ident) {
      unitsdecl();
    } else if (at_keyword("assign")) {
      assigndecl();
    } else {
      throw Error(Errc::SyntaxError,
                  "expected a statement (variable, design, units, assign), found '" +
                      cur().text + "'",
                  cur().line, cur().col);
    }
  }

  const Variable* find_variable(std::string_view name) const {
    for (const auto& v : atomics_) {
      if (v.name == name) return &v;
    }
    for (const auto& v : compounds_) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  void check_fresh_variable(const std::string& name, const Token& where) {
    if (find_variable(name)) {
      throw Error(Errc::DuplicateVariable, "variable '" + name + "' already declared",
                  where.line, where.col);
    }
  }

  void vardecl() {
    expect_keyword("variable");
    Token name = expect(Tok::Ident, "variable name");
    check_fresh_variable(name.text, name);
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> levels;
    while (!at(Tok::RBrace)) {
      if (at(Tok::Ident) || at(Tok::Str) || at(Tok::Int)) {
        levels.push_back(toks_[pos_++].text);
      } else {
        throw Error(Errc::SyntaxError,
                    std::string("expected a level name, found ") + tok_name(cur().kind),
                    cur().line, cur().col);
      }
    }
    expect(Tok::RBrace, "'}'");
    if (levels.empty()) {
      throw Error(Errc::InvalidLevel, "variable '" + name.text + "' has no levels",
                  name.line, name.col);
    }
    std::set<std::string_view> seen;
    for (const auto& level : levels) {
      if (!seen.insert(level).second) {
        throw Error(Errc::InvalidLevel,
                    "variable '" + name.text + "' repeats level '" + level + "'",
                    name.line, name.col);
      }
    }
    atomics_.push_back(Variable{name.text, std::move(levels), {}});
  }

  void designdecl() {
    expect_keyword("design");
    Token name = expect(Tok::Ident, "design name");
    for (const auto& d : designs_) {
      if (d.name == name.text) {
        throw Error(Errc::DuplicateName, "design '" + name.text + "' already declared",
                    name.line, name.col);
      }
    }
    expect(Tok::Equals, "'='");
    DesignPtr ast = designexp();
    designs_.push_back(NamedDesign{name.text, std::move(ast)});
  }

  DesignPtr designexp() {
    DesignPtr node;
    if (at_keyword("design")) {
      ++pos_;
      expect(Tok::LParen, "'('");
      expect(Tok::RParen, "')'");
      node = dsl::design();
    } else if (at_keyword("cross") || at_keyword("nest")) {
      bool is_cross = cur().text == "cross";
      Token kw = toks_[pos_++];
      expect(Tok::LParen, "'('");
      DesignPtr a = ref();
      expect(Tok::Comma, "','");
      DesignPtr b = ref();
      expect(Tok::RParen, "')'");
      check_disjoint(*a, *b, kw);
      node = is_cross ? dsl::cross(std::move(a), std::move(b))
                      : dsl::nest(std::move(a), std::move(b));
    } else {
      throw Error(Errc::SyntaxError,
                  "expected a design expression, found '" + cur().text + "'",
                  cur().line, cur().col);
    }
    while (at(Tok::Dot)) {
      ++pos_;
      node = chain_method(std::move(node));
    }
    return node;
  }

  DesignPtr ref() {
    if (at(Tok::Ident) && !at_keyword("design") && !at_keyword("cross") &&
        !at_keyword("nest")) {
      Token name = toks_[pos_++];
      for (const auto& d : designs_) {
        if (d.name == name.text) return d.ast;
      }
      throw Error(Errc::UnknownIdentifier, "unknown design '" + name.text + "'",
                  name.line, name.col);
    }
    return designexp();
  }

  Token level_token() {
    if (at(Tok::Ident) || at(Tok::Str) || at(Tok::Int)) return toks_[pos_++];
    throw Error(Errc::SyntaxError,
                std::string("expected a level name, found ") + tok_name(cur().kind), cur().line,
                cur().col);
  }

  const Variable& variable_arg() {
    Token name = expect(Tok::Ident, "variable name");
    const Variable* v = find_variable(name.text);
    if (!v) {
      throw Error(Errc::UnknownIdentifier, "unknown variable '" + name.text + "'",
                  name.line, name.col);
    }
    return *v;
  }

  std::uint64_t positive_int_arg(const char* what) {
    Token t = expect(Tok::Int, "integer");
    if (t.int_value == 0) {
      throw Error(Errc::ArityError, std::string(what) + " must be positive", t.line,
                  t.col);
    }
    return t.int_value;
  }

  DesignPtr chain_method(DesignPtr base) {
    Token m = expect(Tok::Ident, "method name");
    expect(Tok::LParen, "'('");
    DesignPtr node;
    if (m.text == "counterbalance" || m.text == "within_subjects" ||
        m.text == "between_subjects") {
      const Variable& v = variable_arg();
      if (m.text == "counterbalance") {
        node = dsl::counterbalance(std::move(base), v.name);
      } else if (m.text == "within_subjects") {
        node = dsl::within_subjects(std::move(base), v.name);
      } else {
        node = dsl::between_subjects(std::move(base), v.name);
      }
    } else if (m.text == "limit_plans") {
      node = dsl::limit_plans(std::move(base), positive_int_arg("limit_plans"));
    } else if (m.text == "num_trials") {
      node = dsl::num_trials(std::move(base), positive_int_arg("num_trials"));
    } else if (m.text == "start_with") {
      const Variable& v = variable_arg();
      expect(Tok::Comma, "','");
      Token level = level_token();
      if (!v.level_index(level.text)) {
        throw Error(Errc::InvalidLevel,
                    "variable '" + v.name + "' has no level '" + level.text + "'",
                    level.line, level.col);
      }
      node = dsl::start_with(std::move(base), v.name, level.text);
    } else if (m.text == "multifact") {
      node = multifact_method(std::move(base), m);
    } else {
      throw Error(Errc::SyntaxError, "unknown design method '" + m.text + "'", m.line,
                  m.col);
    }
    expect(Tok::RParen, "')'");
    return node;
  }

  DesignPtr multifact_method(DesignPtr base, const Token& where) {
    std::vector<std::string> parts;
    std::vector<Variable> part_vars;
    parts.push_back(variable_arg().name);
    part_vars.push_back(*find_variable(parts.back()));
    while (at(Tok::Comma)) {
      ++pos_;
      parts.push_back(variable_arg().name);
      part_vars.push_back(*find_variable(parts.back()));
    }
    if (parts.size() < 2) {
      throw Error(Errc::ArityError, "multifact needs at least two variables",
                  where.line, where.col);
    }
    std::string compound_name = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) compound_name += "_" + parts[i];

    Variable compound = make_compound(compound_name, part_vars);
    if (const Variable* existing = find_variable(compound_name)) {
      if (!(*existing == compound)) {
        throw Error(Errc::DuplicateVariable,
                    "name '" + compound_name + "' conflicts with an existing variable",
                    where.line, where.col);
      }
    } else {
      compounds_.push_back(std::move(compound));
    }
    return dsl::multifact(std::move(base), std::move(parts));
  }

  std::set<std::string> footprint_of(const DesignAst& ast) const {
    std::set<std::string> atoms;
    for (const auto& name : variables_of(ast)) {
      const Variable* v = find_variable(name);
      if (!v) continue;  // unreachable: references validated at creation
      for (const auto& atom : v->footprint()) atoms.insert(atom);
    }
    return atoms;
  }

  void check_disjoint(const DesignAst& a, const DesignAst& b, const Token& where) const {
    auto fa = footprint_of(a);
    for (const auto& atom : footprint_of(b)) {
      if (fa.count(atom)) {
        throw Error(Errc::VariableOverlap,
                    "'" + where.text + "' subdesigns both involve factor '" + atom + "'",
                    where.line, where.col);
      }
    }
  }

  void unitsdecl() {
    expect_keyword("units");
    Token name = expect(Tok::Ident, "units name");
    for (const auto& u : units_) {
      if (u.name == name.text) {
        throw Error(Errc::DuplicateName, "units '" + name.text + "' already declared",
                    name.line, name.col);
      }
    }
    expect(Tok::Equals, "'='");
    UnitsSpec spec;
    if (at_keyword("units")) {
      ++pos_;
      expect(Tok::LParen, "'('");
      spec.kind = UnitsSpec::Kind::Units;
      spec.count = positive_int_arg("unit count");
      expect(Tok::RParen, "')'");
    } else if (at_keyword("clusters")) {
      ++pos_;
      expect(Tok::LParen, "'('");
      spec.kind = UnitsSpec::Kind::Clusters;
      spec.count = positive_int_arg("cluster count");
      expect(Tok::Comma, "','");
      expect_keyword("units");
      expect(Tok::LParen, "'('");
      spec.members_per_cluster = positive_int_arg("cluster size");
      expect(Tok::RParen, "')'");
      expect(Tok::RParen, "')'");
    } else {
      throw Error(Errc::SyntaxError,
                  "expected units(...) or clusters(...), found '" + cur().text + "'",
                  cur().line, cur().col);
    }
    units_.push_back(NamedUnits{name.text, spec});
  }

  void assigndecl() {
    Token kw = expect_keyword("assign");
    if (saw_assign_) {
      throw Error(Errc::DuplicateAssign, "program already has an assign statement",
                  kw.line, kw.col);
    }
    Token units_name = expect(Tok::Ident, "units name");
    expect_keyword("to");
    Token design_name = expect(Tok::Ident, "design name");
    bool units_ok = false;
    for (const auto& u : units_) units_ok |= (u.name == units_name.text);
    if (!units_ok) {
      throw Error(Errc::UnknownIdentifier, "unknown units '" + units_name.text + "'",
                  units_name.line, units_name.col);
    }
    bool design_ok = false;
    for (const auto& d : designs_) design_ok |= (d.name == design_name.text);
    if (!design_ok) {
      throw Error(Errc::UnknownIdentifier, "unknown design '" + design_name.text + "'",
                  design_name.line, design_name.col);
    }
    assign_.units_name = units_name.text;
    assign_.design_name = design_name.text;
    if (at_keyword("seed")) {
      ++pos_;
      Token s = expect(Tok::Int, "seed value");
      assign_.seed = s.int_value;
    }
    saw_assign_ = true;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Variable> atomics_;
  std::vector<Variable> compounds_;
  std::vector<NamedDesign> designs_;
  std::vector<NamedUnits> units_;
  AssignDirective assign_;
  bool saw_assign_ = false;
};

}  // namespace

Program parse(std::string_view source) { return Parser(source).run(); }

}  // namespace planet
