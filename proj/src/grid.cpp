#include "goalinf/grid.hpp"

#include <algorithm>
#include <cctype>

namespace goalinf {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kNorth: return "north";
    case Direction::kEast: return "east";
    case Direction::kSouth: return "south";
    case Direction::kWest: return "west";
  }
  return "?";
}

bool parse_direction(const std::string& text, Direction& out) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "n" || t == "north") out = Direction::kNorth;
  else if (t == "e" || t == "east") out = Direction::kEast;
  else if (t == "s" || t == "south") out = Direction::kSouth;
  else if (t == "w" || t == "west") out = Direction::kWest;
  else return false;
  return true;
}

}  // namespace goalinf
