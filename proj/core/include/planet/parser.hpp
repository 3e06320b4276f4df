#ifndef PLANET_PARSER_HPP
#define PLANET_PARSER_HPP

#include <string>
#include <string_view>

#include "planet/design_ast.hpp"

namespace planet {

// Parses a .pln source file.
//
//   program   := stmt* ;
//   stmt      := vardecl | designdecl | unitsdecl | assigndecl ;
//   vardecl   := "variable" IDENT "{" level+ "}" ;
//   level     := IDENT | STRING | INT ;
//   designdecl:= "design" IDENT "=" designexp ;
//   designexp := "design" "(" ")" chain*
//              | "cross" "(" ref "," ref ")" chain*
//              | "nest" "(" ref "," ref ")" chain* ;
//   chain     := "." method "(" args? ")" ;
//   method    := "counterbalance" | "within_subjects" | "between_subjects"
//              | "limit_plans" | "num_trials" | "start_with" | "multifact" ;
//   unitsdecl := "units" IDENT "=" ( "units" "(" INT ")"
//              | "clusters" "(" INT "," "units" "(" INT ")" ")" ) ;
//   assigndecl:= "assign" IDENT "to" IDENT ("seed" INT)? ;
//   ref       := IDENT | designexp ;
//
// Comments run from '#' to end of line. Named design references are inlined
// into the AST (no forward references). Validation is part of parsing:
// unknown identifiers, duplicate names, method arity, level validity,
// cross/nest variable overlap, and the single-assign rule all produce
// planet::Error diagnostics with line/column positions.
Program parse(std::string_view source);

// Canonical text for a program; parse(render(p)) is structurally equal to p.
std::string render(const Program& program);

}  // namespace planet

#endif  // PLANET_PARSER_HPP
