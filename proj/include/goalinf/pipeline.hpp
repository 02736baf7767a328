#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "goalinf/infer/inference.hpp"
#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"
#include "goalinf/planner/task.hpp"
#include "goalinf/worldgen/map.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf {

// Everything derived from one scenario record: the domain (with a translated
// unlock operator when given), one sampled map and its compiled problem.
struct ScenarioBundle {
  worldgen::ScenarioIr ir;
  pddl::DomainAst domain;
  worldgen::MapSample map;
  pddl::ProblemInstance problem;
};

ScenarioBundle build_scenario(const worldgen::ScenarioIr& ir, const std::optional<std::string>& operator_text,
                              std::uint64_t seed, const worldgen::SamplerOptions& options = {});

// The record's observation as a trace over `task`: a subgoal condition for
// has_objects records, the expanded move sequence for action_sequence ones.
infer::ObservationTrace observation_of(const worldgen::ScenarioIr& ir, const planner::Task& task);

}  // namespace goalinf
