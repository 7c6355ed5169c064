#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "noteg/scene.hpp"

namespace noteg {

/// Runs script behaviours for the engine. Implementations throw
/// noteg::RuntimeError when the script fails.
class ScriptHost {
 public:
  virtual ~ScriptHost() = default;
  virtual Value invoke(const Value& fn, std::vector<Value> args) = 0;
};

struct MoveOutcome {
  bool blocked_x = false;
  bool blocked_y = false;
  bool blocked() const { return blocked_x || blocked_y; }
};

/// Axis-separated AABB sweep: x first, then y. A blocked axis is clamped
/// flush against the first non-walkable tile or the scene edge and its
/// velocity component zeroed. Projectiles are left for the caller to
/// despawn.
MoveOutcome move_and_collide(Entity& entity, const Tilemap* map, double scene_w, double scene_h,
                             double dt);

/// One fixed 1/60 s step. Script errors quarantine the owning entity (or drop
/// the callback) and never escape. Returns the events emitted by this tick.
std::vector<EngineEvent> tick(Scene& scene, ScriptHost* host);

bool aabb_overlap(const Entity& a, const Entity& b);

/// Straight-line visibility between two points across walkable tiles.
bool line_of_sight(const Tilemap& map, Vec2 from, Vec2 to);

/// Spawns a projectile at the owner's centre heading along (dx, dy).
EntityId fire_projectile(Scene& scene, EntityId owner, Vec2 direction, double speed,
                         double damage);

}  // namespace noteg
