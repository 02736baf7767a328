#pragma once

#include <string>

#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"

namespace goalinf::pddl {

std::string print_expr(const NumExpr& expr);
std::string print_formula(const Formula& formula);
std::string print_action(const ActionSchema& action);
std::string print_domain(const DomainAst& domain);
// Problem rendering for debugging; grid geometry is emitted as comments.
std::string print_problem(const ProblemInstance& problem, const std::string& domain_name);

}  // namespace goalinf::pddl
