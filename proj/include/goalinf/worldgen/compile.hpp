#pragma once

#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"
#include "goalinf/worldgen/map.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf::worldgen {

// Object naming used by compiled problems.
std::string agent_object(const ScenarioIr& ir);
std::string lock_object(const std::string& door_id, std::size_t index);

// Encodes the map as objects, facts and fluents; one reach-the-trophy goal
// per goal label, in the order of ir.goals. Throws CompileError.
pddl::ProblemInstance compile_to_problem(const ScenarioIr& ir, const MapSample& map, const pddl::DomainAst& domain);

}  // namespace goalinf::worldgen
