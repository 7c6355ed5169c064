#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace noteg {

struct GridPos {
  int col = 0;
  int row = 0;

  bool operator==(const GridPos&) const = default;
};

inline int manhattan(GridPos a, GridPos b) {
  return (a.col > b.col ? a.col - b.col : b.col - a.col) +
         (a.row > b.row ? a.row - b.row : b.row - a.row);
}

/// Read-only walkability view, so the search does not depend on Tilemap.
struct GridView {
  int cols = 0;
  int rows = 0;
  std::function<bool(GridPos)> walkable;

  bool contains(GridPos p) const { return p.col >= 0 && p.row >= 0 && p.col < cols && p.row < rows; }
};

/// Called once per expanded node; used by tests to audit the heuristic.
using ExpansionObserver = std::function<void(GridPos node, int g, int h)>;

/// 4-connected A* with unit step cost and the Manhattan heuristic.
///
/// Neighbours are generated in the order up, right, down, left. Among open
/// nodes with equal f the one pushed first is expanded first. Returns the
/// path from start to goal inclusive, or nullopt when the goal is
/// unreachable. Throws InvalidCell if either endpoint is outside the grid or
/// blocked.
std::optional<std::vector<GridPos>> find_path(const GridView& grid, GridPos start, GridPos goal,
                                              const ExpansionObserver& observer = {});

}  // namespace noteg
