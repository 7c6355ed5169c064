#include "noteg/pathfinding.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>

#include "noteg/error.hpp"

namespace noteg {

namespace {

struct OpenEntry {
  int f;
  std::uint64_t seq;  // push order; earlier wins among equal f
  int index;

  bool operator>(const OpenEntry& o) const { return f != o.f ? f > o.f : seq > o.seq; }
};

// up, right, down, left
constexpr std::array<GridPos, 4> kSteps = {GridPos{0, -1}, GridPos{1, 0}, GridPos{0, 1},
                                           GridPos{-1, 0}};

void require_open(const GridView& grid, GridPos p, const char* what) {
  if (!grid.contains(p) || !grid.walkable(p)) {
    throw Error(ErrorCode::InvalidCell, std::string(what) + " cell (" + std::to_string(p.col) +
                                            "," + std::to_string(p.row) +
                                            ") is outside the map or blocked");
  }
}

}  // namespace

std::optional<std::vector<GridPos>> find_path(const GridView& grid, GridPos start, GridPos goal,
                                              const ExpansionObserver& observer) {
  require_open(grid, start, "start");
  require_open(grid, goal, "goal");
  if (start == goal) return std::vector<GridPos>{start};

  const auto cells = static_cast<std::size_t>(grid.cols) * static_cast<std::size_t>(grid.rows);
  auto index_of = [&](GridPos p) { return p.row * grid.cols + p.col; };
  auto pos_of = [&](int i) { return GridPos{i % grid.cols, i / grid.cols}; };

  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> g(cells, kUnseen);
  std::vector<int> parent(cells, -1);
  std::vector<bool> closed(cells, false);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::uint64_t seq = 0;

  g[index_of(start)] = 0;
  open.push({manhattan(start, goal), seq++, index_of(start)});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = true;
    const GridPos node = pos_of(top.index);
    if (observer) observer(node, g[top.index], manhattan(node, goal));

    if (node == goal) {
      std::vector<GridPos> path;
      for (int i = top.index; i != -1; i = parent[i]) path.push_back(pos_of(i));
      std::reverse(path.begin(), path.end());
      return path;
    }

    for (const GridPos step : kSteps) {
      const GridPos nb{node.col + step.col, node.row + step.row};
      if (!grid.contains(nb) || !grid.walkable(nb)) continue;
      const int ni = index_of(nb);
      if (closed[ni]) continue;
      const int ng = g[top.index] + 1;
      if (ng < g[ni]) {
        g[ni] = ng;
        parent[ni] = top.index;
        open.push({ng + manhattan(nb, goal), seq++, ni});
      }
    }
  }
  return std::nullopt;
}

}  // namespace noteg
