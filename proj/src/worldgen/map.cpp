#include "goalinf/worldgen/map.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <queue>
#include <random>
#include <sstream>

#include "goalinf/error.hpp"
#include "goalinf/random.hpp"

namespace goalinf::worldgen {
namespace {

bool in_bounds(const MapSample& m, Cell c) { return c.x >= 0 && c.y >= 0 && c.x < m.width && c.y < m.height; }

std::optional<Cell> pick_at_distance(std::mt19937_64& rng, const MapSample& m, const std::set<Cell>& used,
                                     Cell origin, int distance) {
  std::vector<Cell> options;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      Cell c{x, y};
      if (manhattan(c, origin) == distance && !used.count(c)) options.push_back(c);
    }
  if (options.empty()) return std::nullopt;
  return options[uniform_index(rng, options.size())];
}

std::optional<Cell> pick_free(std::mt19937_64& rng, const MapSample& m, const std::set<Cell>& used,
                              const SamplerOptions& opt) {
  int span = opt.max_distance - opt.min_distance + 1;
  int d = opt.min_distance + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(span)));
  return pick_at_distance(rng, m, used, m.agent_start, d);
}

std::optional<MapSample> propose_key_map(const ScenarioIr& ir, std::mt19937_64& rng, const SamplerOptions& opt) {
  MapSample m;
  m.width = opt.width;
  m.height = opt.height;
  m.agent_start = opt.agent_start;
  std::set<Cell> used = {m.agent_start};

  for (const auto& [room, locks] : ir.obstacles) {
    auto door = pick_free(rng, m, used, opt);
    if (!door) return std::nullopt;
    const int d = manhattan(*door, m.agent_start);
    std::vector<Cell> inside;
    for (Direction dir : kAllDirections) {
      Cell c = step(*door, dir);
      if (in_bounds(m, c) && !used.count(c) && manhattan(c, m.agent_start) == d + 1) inside.push_back(c);
    }
    if (inside.empty()) return std::nullopt;
    Cell room_cell = inside[uniform_index(rng, inside.size())];
    used.insert(*door);
    used.insert(room_cell);
    for (Direction dir : kAllDirections) {
      Cell c = step(room_cell, dir);
      if (c == *door || !in_bounds(m, c)) continue;
      if (used.count(c) && !m.walls.count(c)) return std::nullopt;
      m.walls.insert(c);
      used.insert(c);
    }
    // The generative model never puts more than max_obstacle locks on a door.
    std::vector<std::string> placed(locks.begin(),
                                    locks.begin() + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(locks.size()),
                                                                             ir.max_obstacle));
    m.door_cells[door_id_for(room)] = {*door, room, std::move(placed), true};
    m.room_membership[room_cell] = room;
  }

  for (const auto& trophy : ir.goals) {
    const std::string room = ir.room_of(trophy);
    if (!room.empty()) {
      for (const auto& [cell, label] : m.room_membership)
        if (label == room) m.trophy_cells[trophy] = cell;
      continue;
    }
    auto cell = pick_free(rng, m, used, opt);
    if (!cell) return std::nullopt;
    m.trophy_cells[trophy] = *cell;
    used.insert(*cell);
  }

  for (std::size_t i = 0; i < ir.keys.size(); ++i) {
    auto cell = pick_free(rng, m, used, opt);
    if (!cell) return std::nullopt;
    m.key_cells["key" + std::to_string(i + 1)] = {*cell, ir.keys[i]};
    used.insert(*cell);
  }
  return m;
}

std::map<std::string, Cell> spatial_offsets(const ScenarioIr& ir) {
  std::string agent = ir.agent();
  std::transform(agent.begin(), agent.end(), agent.begin(), [](unsigned char c) { return std::tolower(c); });
  std::map<std::string, Cell> offsets = {{agent, {0, 0}}};
  std::vector<SpatialConstraint> pending = ir.spatial_constraints;
  while (!pending.empty()) {
    auto it = std::find_if(pending.begin(), pending.end(),
                           [&](const SpatialConstraint& c) { return offsets.count(c.anchor); });
    if (it == pending.end()) throw ConsistencyError("spatial constraints are cyclic or not anchored at the agent");
    offsets[it->target] = step(offsets[it->anchor], it->direction, it->steps);
    pending.erase(it);
  }
  offsets.erase(agent);
  return offsets;
}

std::optional<MapSample> propose_spatial_map(const ScenarioIr& ir, std::mt19937_64& rng, const SamplerOptions& opt) {
  auto offsets = spatial_offsets(ir);
  int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& [name, o] : offsets) {
    min_x = std::min(min_x, o.x);
    max_x = std::max(max_x, o.x);
    min_y = std::min(min_y, o.y);
    max_y = std::max(max_y, o.y);
  }
  MapSample m;
  const int margin = opt.spatial_margin;
  m.width = std::max(opt.width, max_x - min_x + 1 + 2 * margin);
  m.height = std::max(opt.height, max_y - min_y + 1 + 2 * margin);
  const int lo_x = margin - min_x, hi_x = m.width - 1 - margin - max_x;
  const int lo_y = margin - min_y, hi_y = m.height - 1 - margin - max_y;
  if (lo_x > hi_x || lo_y > hi_y) return std::nullopt;
  m.agent_start = {lo_x + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi_x - lo_x + 1))),
                   lo_y + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi_y - lo_y + 1)))};
  for (const auto& [name, o] : offsets) m.trophy_cells[name] = {m.agent_start.x + o.x, m.agent_start.y + o.y};
  return m;
}

std::string cell_str(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::set<Cell> reachable(const MapSample& m, bool doors_open) {
  std::set<Cell> doors;
  for (const auto& [id, d] : m.door_cells) doors.insert(d.cell);
  std::set<Cell> seen;
  if (!in_bounds(m, m.agent_start) || m.walls.count(m.agent_start)) return seen;
  std::queue<Cell> q;
  q.push(m.agent_start);
  seen.insert(m.agent_start);
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    for (Direction dir : kAllDirections) {
      Cell n = step(c, dir);
      if (!in_bounds(m, n) || m.walls.count(n) || seen.count(n)) continue;
      if (!doors_open && doors.count(n)) continue;
      seen.insert(n);
      q.push(n);
    }
  }
  return seen;
}

}  // namespace

std::string door_id_for(const std::string& room) {
  std::string id = "door-";
  bool dash = false;
  for (unsigned char c : room) {
    if (std::isalnum(c)) {
      id.push_back(static_cast<char>(std::tolower(c)));
      dash = false;
    } else if (!dash && id.back() != '-') {
      id.push_back('-');
      dash = true;
    }
  }
  while (id.back() == '-') id.pop_back();
  return id;
}

std::vector<std::string> validate_map(const ScenarioIr& ir, const MapSample& m) {
  std::vector<std::string> out;
  auto check_bounds = [&](Cell c, const std::string& what) {
    if (!in_bounds(m, c)) out.push_back(what + " at " + cell_str(c) + " is outside the grid");
  };

  std::map<Cell, std::string> solid;
  auto claim = [&](Cell c, const std::string& what) {
    check_bounds(c, what);
    auto [it, inserted] = solid.emplace(c, what);
    if (!inserted) out.push_back(what + " shares cell " + cell_str(c) + " with " + it->second);
  };
  claim(m.agent_start, "agent start");
  for (const auto& w : m.walls) claim(w, "wall");
  for (const auto& [id, d] : m.door_cells) claim(d.cell, id);
  for (const auto& [id, k] : m.key_cells) claim(k.cell, id);
  for (const auto& [t, c] : m.trophy_cells) {
    check_bounds(c, "trophy '" + t + "'");
    if (auto it = solid.find(c); it != solid.end() && it->second != "agent start")
      out.push_back("trophy '" + t + "' shares cell " + cell_str(c) + " with " + it->second);
  }

  // Doors and locks.
  std::map<std::string, const DoorPlacement*> door_by_room;
  for (const auto& [id, d] : m.door_cells) {
    if (!ir.obstacles.count(d.room)) out.push_back("door '" + id + "' guards undeclared room '" + d.room + "'");
    door_by_room[d.room] = &d;
  }
  for (const auto& [room, locks] : ir.obstacles) {
    auto it = door_by_room.find(room);
    if (it == door_by_room.end()) {
      out.push_back("room '" + room + "' has no door");
      continue;
    }
    auto want = locks;
    auto have = it->second->locks;
    std::sort(want.begin(), want.end());
    std::sort(have.begin(), have.end());
    if (want != have) out.push_back("room '" + room + "' door locks [" + join(have) + "] differ from [" + join(want) + "]");
    if (static_cast<int>(have.size()) > ir.max_obstacle)
      out.push_back("room '" + room + "' has more than max_obstacle locks");
    // Enclosure: the room cell opens only onto its door.
    for (const auto& [cell, label] : m.room_membership) {
      if (label != room) continue;
      for (Direction dir : kAllDirections) {
        Cell n = step(cell, dir);
        if (in_bounds(m, n) && !m.walls.count(n) && n != it->second->cell)
          out.push_back("room '" + room + "' is open at " + cell_str(n));
      }
      if (manhattan(cell, it->second->cell) != 1) out.push_back("room '" + room + "' is not next to its door");
    }
  }

  // Trophies.
  for (const auto& t : ir.goals) {
    auto it = m.trophy_cells.find(t);
    if (it == m.trophy_cells.end()) {
      out.push_back("trophy '" + t + "' is not placed");
      continue;
    }
    auto member = m.room_membership.find(it->second);
    const std::string room = ir.room_of(t);
    if (room.empty() && member != m.room_membership.end())
      out.push_back("trophy '" + t + "' is behind a door but should not be");
    if (!room.empty() && (member == m.room_membership.end() || member->second != room))
      out.push_back("trophy '" + t + "' is not inside room '" + room + "'");
  }
  for (const auto& [t, c] : m.trophy_cells)
    if (std::find(ir.goals.begin(), ir.goals.end(), t) == ir.goals.end())
      out.push_back("trophy '" + t + "' is not a declared goal");

  // Keys.
  std::map<std::string, int> key_balance;
  for (const auto& k : ir.keys) ++key_balance[k];
  for (const auto& [id, k] : m.key_cells) --key_balance[k.color];
  for (const auto& [color, n] : key_balance) {
    if (n > 0) out.push_back("missing key color '" + color + "'");
    if (n < 0) out.push_back("unexpected key color '" + color + "'");
  }

  // Spatial layout.
  if (ir.variant == Variant::kSpatial) {
    if (!m.door_cells.empty() || !m.key_cells.empty() || !m.walls.empty())
      out.push_back("spatial map contains doors, keys or walls");
    std::string agent = ir.agent();
    std::transform(agent.begin(), agent.end(), agent.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& c : ir.spatial_constraints) {
      auto target = m.trophy_cells.find(c.target);
      Cell anchor = m.agent_start;
      if (c.anchor != agent) {
        auto a = m.trophy_cells.find(c.anchor);
        if (a == m.trophy_cells.end()) continue;
        anchor = a->second;
      }
      if (target != m.trophy_cells.end() && target->second != step(anchor, c.direction, c.steps))
        out.push_back("trophy '" + c.target + "' is not " + std::to_string(c.steps) + " steps " +
                      to_string(c.direction) + " of '" + c.anchor + "'");
    }
    std::set<Cell> seen = {m.agent_start};
    for (const auto& [t, c] : m.trophy_cells)
      if (!seen.insert(c).second) out.push_back("trophy '" + t + "' overlaps another object");
  }

  // Reachability: keys and door approaches without crossing doors, trophies with doors open.
  if (out.empty()) {
    auto closed = reachable(m, false);
    auto open = reachable(m, true);
    for (const auto& [id, k] : m.key_cells)
      if (!closed.count(k.cell)) out.push_back("key '" + id + "' is unreachable");
    for (const auto& [id, d] : m.door_cells) {
      bool approach = false;
      for (Direction dir : kAllDirections) approach = approach || closed.count(step(d.cell, dir));
      if (!approach) out.push_back("door '" + id + "' cannot be approached");
    }
    for (const auto& [t, c] : m.trophy_cells)
      if (!open.count(c)) out.push_back("trophy '" + t + "' is unreachable");
  }
  return out;
}

MapSample sample_map(const ScenarioIr& ir, std::uint64_t seed, const SamplerOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> last;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    auto proposal = ir.variant == Variant::kSpatial ? propose_spatial_map(ir, rng, options)
                                                    : propose_key_map(ir, rng, options);
    if (!proposal) {
      last = {"placement failed"};
      continue;
    }
    last = validate_map(ir, *proposal);
    if (last.empty()) return *proposal;
  }
  throw SamplingExhausted("no valid map after " + std::to_string(options.max_attempts) +
                          " attempts; last violation: " + (last.empty() ? "none" : last.front()));
}

std::string render_ascii(const MapSample& m) {
  std::vector<std::string> rows(static_cast<std::size_t>(m.height), std::string(static_cast<std::size_t>(m.width), '.'));
  auto put = [&](Cell c, char ch) {
    if (in_bounds(m, c)) rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = ch;
  };
  for (const auto& w : m.walls) put(w, '#');
  for (const auto& [id, d] : m.door_cells) put(d.cell, 'D');
  for (const auto& [id, k] : m.key_cells)
    put(k.cell, k.color == kColorless ? 'k' : static_cast<char>(std::tolower(static_cast<unsigned char>(k.color[0]))));
  for (const auto& [t, c] : m.trophy_cells) put(c, static_cast<char>(std::toupper(static_cast<unsigned char>(t[0]))));
  put(m.agent_start, 'A');
  std::ostringstream os;
  for (const auto& r : rows) os << r << '\n';
  os << "agent " << cell_str(m.agent_start) << '\n';
  for (const auto& [t, c] : m.trophy_cells) os << "trophy " << t << ' ' << cell_str(c) << '\n';
  for (const auto& [id, d] : m.door_cells)
    os << id << ' ' << cell_str(d.cell) << " room=\"" << d.room << "\" locks=[" << join(d.locks) << "]\n";
  for (const auto& [id, k] : m.key_cells) os << id << ' ' << cell_str(k.cell) << ' ' << k.color << '\n';
  return os.str();
}

}  // namespace goalinf::worldgen
