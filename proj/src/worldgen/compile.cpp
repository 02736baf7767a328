#include "goalinf/worldgen/compile.hpp"

#include <algorithm>
#include <cctype>

#include "goalinf/error.hpp"
#include "goalinf/pddl/parser.hpp"

namespace goalinf::worldgen {
namespace {

constexpr const char* kPalette[] = {"black", "blue", "green", "orange", "purple", "red", "white", "yellow"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

pddl::Formula reach_formula(const std::string& agent, const std::string& target) {
  using pddl::NumExpr;
  return pddl::Formula::conjunction({
      pddl::Formula::equals(NumExpr::fluent_ref("xloc", {agent}), NumExpr::fluent_ref("xloc", {target})),
      pddl::Formula::equals(NumExpr::fluent_ref("yloc", {agent}), NumExpr::fluent_ref("yloc", {target})),
  });
}

}  // namespace

std::string agent_object(const ScenarioIr& ir) { return lower(ir.agent()); }

std::string lock_object(const std::string& door_id, std::size_t index) {
  return door_id + "-" + std::to_string(index + 1);
}

pddl::ProblemInstance compile_to_problem(const ScenarioIr& ir, const MapSample& map, const pddl::DomainAst& domain) {
  for (const char* type : {"agent", "key", "door", "trophy", "color"})
    if (!domain.types.count(type)) throw CompileError(std::string("domain does not declare type '") + type + "'");
  for (const char* fluent : {"xloc", "yloc"})
    if (!domain.find_fluent(fluent)) throw CompileError(std::string("domain does not declare fluent '") + fluent + "'");

  pddl::ProblemInstance p;
  p.name = "gameshow-" + to_string(ir.variant);
  p.grid.width = map.width;
  p.grid.height = map.height;
  p.grid.walls = map.walls;
  p.forbid_surplus_keys = ir.no_extra_keys;

  auto add_object = [&](const std::string& name, const std::string& type) {
    if (!p.objects.emplace(name, type).second) throw CompileError("object name '" + name + "' is used twice");
  };
  auto place = [&](const std::string& name, Cell c) {
    p.initial_fluents[{"xloc", {name}}] = c.x;
    p.initial_fluents[{"yloc", {name}}] = c.y;
  };
  const bool colored = ir.variant == Variant::kColorSame || ir.variant == Variant::kColorDifferent;
  auto paint = [&](const std::string& name, const std::string& color) {
    if (color == kColorless) return;
    if (!colored) throw CompileError("object '" + name + "' has a color in an uncolored variant");
    if (!p.objects.count(color)) add_object(color, "color");
    p.initial_facts.insert({"iscolor", {name, color}});
  };

  const std::string agent = agent_object(ir);
  add_object(agent, "agent");
  place(agent, map.agent_start);
  if (domain.find_fluent("keys-picked")) p.initial_fluents[{"keys-picked", {agent}}] = 0;

  if (colored)
    for (const char* c : kPalette) add_object(c, "color");

  for (const auto& goal : ir.goals) {
    auto it = map.trophy_cells.find(goal);
    if (it == map.trophy_cells.end()) throw CompileError("map has no cell for trophy '" + goal + "'");
    add_object(goal, "trophy");
    place(goal, it->second);
  }
  for (const auto& [id, key] : map.key_cells) {
    add_object(id, "key");
    place(id, key.cell);
    p.initial_facts.insert({"onmap", {id}});
    paint(id, key.color);
  }
  for (const auto& [id, door] : map.door_cells) {
    for (std::size_t i = 0; i < door.locks.size(); ++i) {
      const std::string lock = lock_object(id, i);
      add_object(lock, "door");
      place(lock, door.cell);
      if (door.locked) p.initial_facts.insert({"locked", {lock}});
      paint(lock, door.locks[i]);
    }
  }

  for (const auto& goal : ir.goals) p.goals.push_back({goal, goal, reach_formula(agent, goal)});

  try {
    pddl::check_problem(domain, p);
  } catch (const Error& e) {
    throw CompileError(e.what());
  }
  return p;
}

}  // namespace goalinf::worldgen
