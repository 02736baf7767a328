#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"

namespace goalinf::pddl {

// Closed-world state: atoms not in `facts` are false.
struct State {
  std::set<GroundAtom> facts;
  std::map<GroundFluent, long long> fluents;

  bool operator==(const State&) const = default;
};

using Binding = std::map<std::string, std::string>;

State initial_state(const ProblemInstance& problem);

// Standard satisfaction. Exists ranges over problem objects of the quantified
// type (subtypes included). Throws UnboundVariable and UnknownFluent.
bool eval_formula(const State& state, const Formula& formula, const Binding& binding,
                  const DomainAst& domain, const ProblemInstance& problem);

long long eval_expr(const State& state, const NumExpr& expr, const Binding& binding);

// Applies a conjunctive effect: deletes first, then adds, then assignments,
// all right-hand sides evaluated in the input state. Throws IllegalEffect
// for anything other than literals and assignments under a conjunction.
State apply_effect(const State& state, const Formula& effect, const Binding& binding = {});

// A schema instantiated with concrete objects.
struct ActionInstance {
  std::size_t schema = 0;
  std::string name;
  std::vector<std::string> args;

  Binding binding(const DomainAst& domain) const;
  bool operator==(const ActionInstance&) const = default;
};

// Every type-consistent substitution of every schema, in domain order and
// then lexicographic object order.
std::vector<ActionInstance> ground_actions(const DomainAst& domain, const ProblemInstance& problem);

}  // namespace goalinf::pddl
