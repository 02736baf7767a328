#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "goalinf/grid.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf::worldgen {

struct DoorPlacement {
  Cell cell;
  std::string room;
  std::vector<std::string> locks;  // one entry per lock, by color
  bool locked = true;

  bool operator==(const DoorPlacement&) const = default;
};

struct KeyPlacement {
  Cell cell;
  std::string color;

  bool operator==(const KeyPlacement&) const = default;
};

struct MapSample {
  int width = 0;
  int height = 0;
  Cell agent_start;
  std::map<std::string, Cell> trophy_cells;
  std::map<std::string, DoorPlacement> door_cells;  // door id -> placement
  std::map<std::string, KeyPlacement> key_cells;    // key id -> placement
  std::map<Cell, std::string> room_membership;
  std::set<Cell> walls;

  bool operator==(const MapSample&) const = default;
};

struct SamplerOptions {
  int width = 10;
  int height = 10;
  Cell agent_start{4, 4};  // key variants; spatial scenes sample the start
  int min_distance = 2;
  int max_distance = 4;
  int max_attempts = 1000;
  int spatial_margin = 1;  // free cells kept around the constrained spatial layout
};

// Rejection-samples the restricted map model until validate_map passes.
// Deterministic for a given (ir, seed, options). Throws SamplingExhausted.
MapSample sample_map(const ScenarioIr& ir, std::uint64_t seed, const SamplerOptions& options = {});

// Lists every condition derived from `ir` that `map` violates.
std::vector<std::string> validate_map(const ScenarioIr& ir, const MapSample& map);

// Door id used for a room label, e.g. "Room A" -> "door-room-a".
std::string door_id_for(const std::string& room);

// Grid rendering: '#' wall, 'A' agent, 'D' door, upper-case trophy initials,
// lower-case key color initials ('k' for colorless); a legend follows.
std::string render_ascii(const MapSample& map);

}  // namespace goalinf::worldgen
