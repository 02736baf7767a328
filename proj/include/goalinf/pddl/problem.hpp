#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "goalinf/grid.hpp"
#include "goalinf/pddl/ast.hpp"

namespace goalinf::pddl {

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;
};

// A ground fluent is keyed exactly like a ground atom.
using GroundFluent = GroundAtom;

std::string to_string(const GroundAtom& atom);

struct GoalCandidate {
  std::string label;          // trophy label as it appears in the stimulus
  std::string target_object;  // object whose cell the goal asks the agent to reach
  Formula formula;
};

// Static grid geometry consumed by the built-in movement semantics.
struct GridSpec {
  int width = 0;
  int height = 0;
  std::set<Cell> walls;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
};

struct ProblemInstance {
  std::string name;
  std::map<std::string, std::string> objects;  // object -> type
  std::set<GroundAtom> initial_facts;
  std::map<GroundFluent, long long> initial_fluents;
  std::vector<GoalCandidate> goals;
  GridSpec grid;
  // When set, agents never hold a key they cannot spend on a lock gating their goal.
  bool forbid_surplus_keys = false;

  // Objects whose type is `type` or a subtype of it, in lexicographic order.
  std::vector<std::string> objects_of_type(const DomainAst& domain, const std::string& type) const;
};

// Checks the ProblemInstance invariants against a domain: objects have
// declared types, every ground atom/fluent matches a signature, and each
// goal's target object appears in exactly one candidate.
void check_problem(const DomainAst& domain, const ProblemInstance& problem);

}  // namespace goalinf::pddl
