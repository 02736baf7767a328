#include "goalinf/pipeline.hpp"

#include "goalinf/pddl/parser.hpp"
#include "goalinf/worldgen/compile.hpp"
#include "goalinf/worldgen/domains.hpp"

namespace goalinf {

ScenarioBundle build_scenario(const worldgen::ScenarioIr& ir, const std::optional<std::string>& operator_text,
                              std::uint64_t seed, const worldgen::SamplerOptions& options) {
  ScenarioBundle b;
  b.ir = ir;
  b.domain = worldgen::build_domain(ir.variant, operator_text);
  b.map = worldgen::sample_map(ir, seed, options);
  b.problem = worldgen::compile_to_problem(ir, b.map, b.domain);
  return b;
}

infer::ObservationTrace observation_of(const worldgen::ScenarioIr& ir, const planner::Task& task) {
  if (ir.observation_type == worldgen::ObservationType::kHasObjects) {
    pddl::check_ground_formula(ir.observation, task.domain(), task.problem());
    return infer::ObservationTrace::of_condition(ir.observation);
  }
  std::vector<planner::GroundAction> moves;
  for (const auto& walk : ir.walks)
    for (int i = 0; i < walk.steps; ++i) moves.push_back(planner::move_action(walk.direction, task.options().cost_scale));
  return infer::ObservationTrace::of_actions(std::move(moves));
}

}  // namespace goalinf
