#pragma once

#include <string>
#include <string_view>

#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"
#include "goalinf/pddl/sexpr.hpp"

namespace goalinf::pddl {

// Parses `(define (domain ...) ...)` in the supported subset and checks it.
// Throws SyntaxError for malformed text and SemanticError for undeclared
// predicates, fluents, types or variables.
DomainAst parse_domain(std::string_view text);

// Parses a single `(:action ...)` block without semantic checks.
ActionSchema parse_action(std::string_view text);

// Parses a formula without consulting any declarations. Inside `(= a b)` and
// `(assign f v)` operands are read as integer expressions.
Formula parse_formula(std::string_view text);
Formula parse_formula(const SExpr& expr);

// Semantic checks for a domain, raising SemanticError on the first problem.
void check_domain(const DomainAst& domain);

// Checks a formula that may mention problem objects (goals, observations).
void check_ground_formula(const Formula& formula, const DomainAst& domain,
                          const ProblemInstance& problem);

// Returns `domain` with the action of the same name replaced by `action`
// (or appended when absent), then re-checked.
DomainAst with_action(DomainAst domain, ActionSchema action);

}  // namespace goalinf::pddl
