#include "goalinf/worldgen/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "goalinf/error.hpp"
#include "goalinf/pddl/parser.hpp"
#include "goalinf/pddl/printer.hpp"

namespace goalinf::worldgen {

using nlohmann::json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kGeneric: return "generic";
    case Variant::kColorSame: return "color_same";
    case Variant::kColorDifferent: return "color_different";
    case Variant::kSpatial: return "spatial";
  }
  return "generic";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "generic") return Variant::kGeneric;
  if (text == "color_same") return Variant::kColorSame;
  if (text == "color_different") return Variant::kColorDifferent;
  if (text == "spatial") return Variant::kSpatial;
  return std::nullopt;
}

std::string ScenarioIr::room_of(const std::string& trophy) const {
  auto it = locations.find(trophy);
  if (it == locations.end() || !obstacles.count(it->second)) return {};
  return it->second;
}

std::string normalize_color(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == kColorless) return t;
  static const std::map<std::string, std::string> kCodes = {
      {"r", "red"}, {"g", "green"}, {"y", "yellow"}, {"b", "blue"},
      {"o", "orange"}, {"p", "purple"}, {"w", "white"}, {"k", "black"}};
  if (auto it = kCodes.find(t); it != kCodes.end()) return it->second;
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isalpha(c); }))
    throw ConsistencyError("'" + std::string(token) + "' is not a color");
  return t;
}

namespace {

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + name + "'");
  return *it;
}

std::vector<std::string> string_list(const json& j, const char* name) {
  if (!j.is_array()) throw SchemaError(std::string("field '") + name + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw SchemaError(std::string("field '") + name + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

int count_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw SchemaError(std::string("field '") + name + "' must be a non-negative integer");
  return v.get<int>();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Direction direction_field(const json& j, const char* where) {
  if (!j.is_string()) throw SchemaError(std::string("'direction' in ") + where + " must be a string");
  Direction d;
  if (!parse_direction(j.get<std::string>(), d))
    throw SchemaError(std::string("unknown direction '") + j.get<std::string>() + "' in " + where);
  return d;
}

int steps_field(const json& j, const char* where) {
  auto it = j.find("steps");
  if (it == j.end() || !it->is_number_integer())
    throw SchemaError(std::string("'steps' in ") + where + " must be an integer");
  return it->get<int>();
}

}  // namespace

void check_scenario(const ScenarioIr& ir) {
  if (ir.agents.size() != 1) throw ConsistencyError("exactly one agent is supported");
  if (ir.goals.empty()) throw ConsistencyError("no goals");
  if (ir.goal_count != static_cast<int>(ir.goals.size()))
    throw ConsistencyError("goal_count " + std::to_string(ir.goal_count) + " differs from " +
                           std::to_string(ir.goals.size()) + " listed goals");
  if (ir.len_key != static_cast<int>(ir.keys.size()))
    throw ConsistencyError("len_key " + std::to_string(ir.len_key) + " differs from " +
                           std::to_string(ir.keys.size()) + " listed keys");
  std::set<std::string> goals(ir.goals.begin(), ir.goals.end());
  if (goals.size() != ir.goals.size()) throw ConsistencyError("duplicate goal label");
  if (goals.count(lower(ir.agent()))) throw ConsistencyError("agent name collides with a goal label");
  for (const auto& [trophy, room] : ir.locations)
    if (!goals.count(trophy)) throw ConsistencyError("location given for unknown goal '" + trophy + "'");

  const bool generic = ir.variant == Variant::kGeneric;
  auto check_color = [&](const std::string& c, const std::string& what) {
    if (generic && c != kColorless) throw ConsistencyError(what + " color '" + c + "' in the generic variant");
    if (!generic && c == kColorless) throw ConsistencyError(what + " without a color in a colored variant");
  };
  for (const auto& [room, locks] : ir.obstacles) {
    if (locks.empty()) throw ConsistencyError("room '" + room + "' lists no locks");
    for (const auto& c : locks) check_color(c, "lock of '" + room + "'");
  }
  for (const auto& k : ir.keys) check_color(k, "key");
  if (!ir.obstacles.empty() && ir.keys_per_door < 1) throw ConsistencyError("keys_per_door must be at least 1");

  if (ir.variant == Variant::kSpatial) {
    if (!ir.obstacles.empty() || !ir.keys.empty()) throw ConsistencyError("spatial scenarios have no doors or keys");
    if (ir.observation_type != ObservationType::kActionSequence)
      throw ConsistencyError("spatial scenarios observe action sequences");
    std::set<std::string> placed = {lower(ir.agent())};
    std::set<std::string> targets;
    for (const auto& c : ir.spatial_constraints) {
      if (c.steps < 1) throw ConsistencyError("constraint on '" + c.target + "' needs at least one step");
      if (!goals.count(c.target)) throw ConsistencyError("constraint targets unknown goal '" + c.target + "'");
      if (!targets.insert(c.target).second) throw ConsistencyError("goal '" + c.target + "' constrained twice");
    }
    // Anchors must be placed before their targets; repeated passes detect cycles.
    std::vector<SpatialConstraint> pending = ir.spatial_constraints;
    while (!pending.empty()) {
      auto it = std::find_if(pending.begin(), pending.end(),
                             [&](const SpatialConstraint& c) { return placed.count(lower(c.anchor)); });
      if (it == pending.end()) throw ConsistencyError("spatial constraints are cyclic or not anchored at the agent");
      placed.insert(it->target);
      pending.erase(it);
    }
    for (const auto& g : ir.goals)
      if (!placed.count(g)) throw ConsistencyError("goal '" + g + "' has no spatial constraint");
  } else if (!ir.spatial_constraints.empty()) {
    throw ConsistencyError("spatial constraints outside the spatial variant");
  }
  if (ir.observation_type == ObservationType::kHasObjects && !ir.walks.empty())
    throw ConsistencyError("has_objects observation carries a walk list");
  if (ir.observation_type == ObservationType::kActionSequence &&
      !(ir.observation == pddl::Formula::conjunction()))
    throw ConsistencyError("action_sequence observation carries a formula");
  for (const auto& w : ir.walks)
    if (w.steps < 1) throw ConsistencyError("walk with fewer than one step");
}

ScenarioIr parse_scenario_ir(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("scenario record must be a JSON object");

  ScenarioIr ir;
  const json& agent = field(j, "agent");
  ir.agents = agent.is_string() ? std::vector<std::string>{agent.get<std::string>()} : string_list(agent, "agent");
  for (auto& g : ir.goals = string_list(field(j, "goals"), "goals")) g = lower(g);

  if (auto it = j.find("locations"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("field 'locations' must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) throw SchemaError("field 'locations' must map trophies to room names");
      ir.locations[lower(k)] = v.get<std::string>();
    }
  }
  if (auto it = j.find("obstacles"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("field 'obstacles' must be an object");
    for (const auto& [room, locks] : it->items()) {
      std::vector<std::string> colors;
      for (const auto& c : string_list(locks, "obstacles")) colors.push_back(normalize_color(c));
      ir.obstacles[room] = std::move(colors);
    }
  }
  for (const auto& k : string_list(field(j, "keys"), "keys")) ir.keys.push_back(normalize_color(k));
  ir.max_obstacle = count_field(j, "max_obstacle");
  ir.keys_per_door = count_field(j, "keys_per_door");
  ir.len_key = count_field(j, "len_key");
  ir.goal_count = count_field(j, "goal_count");

  const json& otype = field(j, "observation_type");
  if (!otype.is_string()) throw SchemaError("field 'observation_type' must be a string");
  if (otype == "has_objects") {
    ir.observation_type = ObservationType::kHasObjects;
  } else if (otype == "action_sequence") {
    ir.observation_type = ObservationType::kActionSequence;
  } else {
    throw SchemaError("unknown observation_type '" + otype.get<std::string>() + "'");
  }

  const json& obs = field(j, "observation");
  if (ir.observation_type == ObservationType::kHasObjects) {
    if (obs.is_null() || (obs.is_string() && obs.get<std::string>().empty())) {
      ir.observation = pddl::Formula::conjunction();
    } else if (obs.is_string()) {
      try {
        ir.observation = pddl::parse_formula(obs.get<std::string>());
      } catch (const SyntaxError& e) {
        throw SchemaError(std::string("field 'observation' is not a formula: ") + e.what());
      }
    } else {
      throw SchemaError("field 'observation' must be a formula string for has_objects");
    }
  } else {
    if (!obs.is_array()) throw SchemaError("field 'observation' must be a list of walks for action_sequence");
    for (const auto& w : obs) {
      if (!w.is_object()) throw SchemaError("walk entries in 'observation' must be objects");
      ir.walks.push_back({direction_field(field(w, "direction"), "observation"), steps_field(w, "observation")});
    }
  }

  if (auto it = j.find("spatial_constraints"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field 'spatial_constraints' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) throw SchemaError("spatial constraint entries must be objects");
      const json& target = field(c, "target");
      const json& anchor = field(c, "anchor");
      if (!target.is_string() || !anchor.is_string())
        throw SchemaError("spatial constraint 'target' and 'anchor' must be strings");
      ir.spatial_constraints.push_back({lower(target.get<std::string>()), lower(anchor.get<std::string>()),
                                        direction_field(field(c, "direction"), "spatial_constraints"),
                                        steps_field(c, "spatial_constraints")});
    }
  }
  if (auto it = j.find("dynamics_variant"); it != j.end()) {
    if (!it->is_string()) throw SchemaError("field 'dynamics_variant' must be a string");
    auto v = parse_variant(it->get<std::string>());
    if (!v) throw SchemaError("unknown dynamics_variant '" + it->get<std::string>() + "'");
    ir.variant = *v;
  } else if (!ir.spatial_constraints.empty()) {
    ir.variant = Variant::kSpatial;
  } else {
    // Records without the field (the plain appendix layout) default by color use;
    // the actual unlock rule then comes from the translated operator.
    bool colored = std::any_of(ir.keys.begin(), ir.keys.end(), [](const auto& k) { return k != kColorless; });
    for (const auto& [room, locks] : ir.obstacles)
      for (const auto& c : locks) colored = colored || c != kColorless;
    ir.variant = colored ? Variant::kColorSame : Variant::kGeneric;
  }
  if (auto it = j.find("no_extra_keys"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("field 'no_extra_keys' must be a boolean");
    ir.no_extra_keys = it->get<bool>();
  }
  check_scenario(ir);
  return ir;
}

std::string to_json(const ScenarioIr& ir) {
  json j;
  j["agent"] = ir.agents;
  j["goals"] = ir.goals;
  j["locations"] = json::object();
  for (const auto& [k, v] : ir.locations) j["locations"][k] = v;
  j["obstacles"] = json::object();
  for (const auto& [k, v] : ir.obstacles) j["obstacles"][k] = v;
  j["keys"] = ir.keys;
  j["max_obstacle"] = ir.max_obstacle;
  j["keys_per_door"] = ir.keys_per_door;
  j["len_key"] = ir.len_key;
  j["goal_count"] = ir.goal_count;
  if (ir.observation_type == ObservationType::kHasObjects) {
    j["observation_type"] = "has_objects";
    j["observation"] = ir.observation == pddl::Formula::conjunction() ? "" : pddl::print_formula(ir.observation);
  } else {
    j["observation_type"] = "action_sequence";
    j["observation"] = json::array();
    for (const auto& w : ir.walks) j["observation"].push_back({{"direction", to_string(w.direction)}, {"steps", w.steps}});
  }
  if (!ir.spatial_constraints.empty()) {
    j["spatial_constraints"] = json::array();
    for (const auto& c : ir.spatial_constraints)
      j["spatial_constraints"].push_back(
          {{"target", c.target}, {"anchor", c.anchor}, {"direction", to_string(c.direction)}, {"steps", c.steps}});
  }
  j["dynamics_variant"] = to_string(ir.variant);
  j["no_extra_keys"] = ir.no_extra_keys;
  return j.dump(2);
}

}  // namespace goalinf::worldgen
