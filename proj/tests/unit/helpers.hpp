#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "goalinf/pipeline.hpp"
#include "goalinf/planner/planner.hpp"
#include "goalinf/worldgen/domains.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace testing {

inline std::string source_path(const std::string& rel) { return std::string(GOALINF_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline goalinf::worldgen::ScenarioIr fixture_ir(const std::string& id) {
  return goalinf::worldgen::parse_scenario_ir(slurp(source_path("fixtures/" + id + "/scenario.json")));
}

// Task + planner over a bundle; keeps everything alive together.
struct World {
  goalinf::ScenarioBundle bundle;
  std::unique_ptr<goalinf::planner::Task> task;
  std::unique_ptr<goalinf::planner::Planner> planner;

  World(goalinf::ScenarioBundle b, goalinf::planner::TaskOptions options = {}, bool memoize = true)
      : bundle(std::move(b)),
        task(std::make_unique<goalinf::planner::Task>(bundle.domain, bundle.problem, options)),
        planner(std::make_unique<goalinf::planner::Planner>(*task, memoize)) {}

  goalinf::infer::ObservationTrace observation() const { return goalinf::observation_of(bundle.ir, *task); }
};

inline World fixture_world(const std::string& id, std::uint64_t seed = 7, goalinf::planner::TaskOptions options = {},
                           const goalinf::worldgen::SamplerOptions& sampler = {}) {
  auto ir = fixture_ir(id);
  std::optional<std::string> op;
  if (ir.variant != goalinf::worldgen::Variant::kSpatial)
    op = slurp(source_path("fixtures/" + id + "/operator.pddl"));
  return World(goalinf::build_scenario(ir, op, seed, sampler), options);
}

inline const char* kAllFixtures[] = {
    "generic_01",         "generic_02",         "generic_03",         "generic_04",         "color_same_01",
    "color_same_02",      "color_same_03",      "color_same_04",      "color_different_01", "color_different_02",
    "color_different_03", "color_different_04", "color_different_05", "spatial_01",         "spatial_02",
    "spatial_03",         "spatial_04",         "spatial_05",
};

inline const char* kSpatialFixtures[] = {"spatial_01", "spatial_02", "spatial_03", "spatial_04", "spatial_05"};

}  // namespace testing
