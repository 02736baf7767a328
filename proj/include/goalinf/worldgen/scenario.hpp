#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goalinf/grid.hpp"
#include "goalinf/pddl/ast.hpp"

namespace goalinf::worldgen {

enum class Variant { kGeneric, kColorSame, kColorDifferent, kSpatial };
enum class ObservationType { kHasObjects, kActionSequence };

std::string to_string(Variant v);
// Accepts generic, color_same, color_different, spatial.
std::optional<Variant> parse_variant(std::string_view text);

// Marker for a lock or key that carries no color (generic variant).
inline constexpr const char* kColorless = "*";

struct DirectionWalk {
  Direction direction = Direction::kNorth;
  int steps = 1;

  bool operator==(const DirectionWalk&) const = default;
};

// `target` sits `steps` cells from `anchor` in `direction`.
struct SpatialConstraint {
  std::string target;
  std::string anchor;
  Direction direction = Direction::kEast;
  int steps = 1;

  bool operator==(const SpatialConstraint&) const = default;
};

// Structured scenario record emitted by translation. Colors are normalized
// to lower-case names ("G" -> "green"); colorless entries hold kColorless.
struct ScenarioIr {
  std::vector<std::string> agents;
  std::vector<std::string> goals;
  std::map<std::string, std::string> locations;               // trophy -> room
  std::map<std::string, std::vector<std::string>> obstacles;  // room -> lock colors
  std::vector<std::string> keys;
  int max_obstacle = 0;
  int keys_per_door = 1;
  int len_key = 0;
  int goal_count = 0;
  ObservationType observation_type = ObservationType::kHasObjects;
  pddl::Formula observation;          // has_objects; empty conjunction when nothing was observed
  std::vector<DirectionWalk> walks;   // action_sequence
  std::vector<SpatialConstraint> spatial_constraints;
  Variant variant = Variant::kGeneric;
  bool no_extra_keys = false;

  const std::string& agent() const { return agents.front(); }
  // Room of a trophy, or empty when the trophy is not behind a door.
  std::string room_of(const std::string& trophy) const;

  bool operator==(const ScenarioIr&) const = default;
};

// Normalizes a color token ("R", "r", "Red") to its lower-case name.
std::string normalize_color(std::string_view token);

// Parses the JSON record. Throws SchemaError for missing or mistyped fields
// (naming the field) and ConsistencyError for invariant violations.
ScenarioIr parse_scenario_ir(std::string_view json_text);

// Checks ScenarioIr invariants; throws ConsistencyError.
void check_scenario(const ScenarioIr& ir);

std::string to_json(const ScenarioIr& ir);

}  // namespace goalinf::worldgen
