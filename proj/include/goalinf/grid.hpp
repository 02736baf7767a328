#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace goalinf {

// Grid coordinates: x grows East, y grows South.
struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

enum class Direction { kNorth, kEast, kSouth, kWest };

inline Cell step(Cell c, Direction d, int n = 1) {
  switch (d) {
    case Direction::kNorth: return {c.x, c.y - n};
    case Direction::kEast: return {c.x + n, c.y};
    case Direction::kSouth: return {c.x, c.y + n};
    case Direction::kWest: return {c.x - n, c.y};
  }
  return c;
}

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline constexpr Direction kAllDirections[] = {Direction::kNorth, Direction::kEast,
                                               Direction::kSouth, Direction::kWest};

std::string to_string(Direction d);
// Accepts N/E/S/W and the full names, case-insensitive.
bool parse_direction(const std::string& text, Direction& out);

}  // namespace goalinf
