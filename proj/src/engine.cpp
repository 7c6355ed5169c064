#include "noteg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace noteg {

namespace {

constexpr double kEdgeEps = 1e-9;
constexpr double kArriveEps = 1e-6;

enum class Axis { X, Y };

double& along(Vec2& v, Axis a) { return a == Axis::X ? v.x : v.y; }
Axis other(Axis a) { return a == Axis::X ? Axis::Y : Axis::X; }

bool tile_blocked(const Tilemap& map, Axis a, int main, int cross) {
  return a == Axis::X ? !map.walkable(main, cross) : !map.walkable(cross, main);
}

// Moves `e` along one axis, stopping at the first blocked tile line or the
// scene edge. Returns true if the move was cut short.
bool sweep_axis(Entity& e, const Tilemap* map, double limit, double delta, Axis a) {
  double& lo = along(e.pos, a);
  const double ext = along(e.size, a);
  double target = lo + delta;
  bool blocked = false;

  if (map != nullptr && delta != 0) {
    const double ts = map->tile_size;
    const double cross_lo = along(e.pos, other(a));
    const double cross_hi = cross_lo + along(e.size, other(a));
    const int r0 = static_cast<int>(std::floor((cross_lo + kEdgeEps) / ts));
    const int r1 = static_cast<int>(std::ceil((cross_hi - kEdgeEps) / ts)) - 1;
    auto line_blocked = [&](int c) {
      for (int r = r0; r <= r1; ++r) {
        if (tile_blocked(*map, a, c, r)) return true;
      }
      return false;
    };

    if (delta > 0) {
      const double front = lo + ext;
      const int first = static_cast<int>(std::ceil((front - kEdgeEps) / ts));
      const int last = static_cast<int>(std::ceil((target + ext) / ts)) - 1;
      for (int c = first; c <= last; ++c) {
        if (line_blocked(c)) {
          target = c * ts - ext;
          blocked = true;
          break;
        }
      }
    } else {
      const int first = static_cast<int>(std::floor((lo + kEdgeEps) / ts)) - 1;
      const int last = static_cast<int>(std::floor(target / ts));
      for (int c = first; c >= last; --c) {
        if (line_blocked(c)) {
          target = (c + 1) * ts;
          blocked = true;
          break;
        }
      }
    }
  }

  if (target + ext > limit) {
    target = limit - ext;
    blocked = true;
  }
  if (target < 0) {
    target = 0;
    blocked = true;
  }
  lo = target;
  if (blocked) along(e.vel, a) = 0;
  return blocked;
}

Value custom_or(const Entity& e, const std::string& key, Value fallback) {
  auto it = e.custom.find(key);
  return it == e.custom.end() ? fallback : it->second;
}

[[noreturn]] void behaviour_fail(const Entity& e, const std::string& fn, const std::string& msg) {
  throw RuntimeError(msg, {TraceFrame{std::string(kind_name(e.kind)) + "." + fn, "<engine>", 0, 0}});
}

double config_number(const Entity& e, const std::string& key, double fallback) {
  Value v = custom_or(e, key, Value(fallback));
  if (!v.is<double>()) {
    behaviour_fail(e, "update", "type mismatch: field '" + key + "' must be a number, got " +
                                    type_name(v));
  }
  return v.as<double>();
}

Vec2 normalized(Vec2 v) {
  const double len = std::hypot(v.x, v.y);
  if (len == 0) return {};
  return {v.x / len, v.y / len};
}

void apply_input(Entity& player, const InputState& in) {
  double dx = (in.is_down(Key::Right) ? 1.0 : 0.0) - (in.is_down(Key::Left) ? 1.0 : 0.0);
  double dy = (in.is_down(Key::Down) ? 1.0 : 0.0) - (in.is_down(Key::Up) ? 1.0 : 0.0);
  if (dx != 0 && dy != 0) {
    dx *= 1.0 / std::numbers::sqrt2;
    dy *= 1.0 / std::numbers::sqrt2;
  }
  player.vel = {dx * player.speed, dy * player.speed};
}

bool aligned_for_step(const Tilemap& map, const Entity& e, GridPos from, GridPos to) {
  const Vec2 c = e.center();
  const Vec2 fc = map.cell_center(from);
  if (to.col != from.col) return std::abs(c.y - fc.y) < kArriveEps;
  return std::abs(c.x - fc.x) < kArriveEps;
}

void enemy_pursue(Scene& scene, Entity& self, const Entity& target) {
  const Tilemap& map = *scene.tilemap;
  PursuitState& ps = self.pursuit;
  const GridPos here = map.cell_of(self.center());
  const GridPos goal = map.cell_of(target.center());

  const bool due = ps.last_repath_tick < 0 ||
                   scene.tick_count - ps.last_repath_tick >= kEnemyRepathInterval ||
                   !ps.target_cell || *ps.target_cell != goal;
  if (due) {
    ps.last_repath_tick = scene.tick_count;
    ps.target_cell = goal;
    ps.path.clear();
    ps.next = 0;
    const GridView view = map.view();
    if (view.contains(here) && view.contains(goal) && map.walkable(here.col, here.row) &&
        map.walkable(goal.col, goal.row)) {
      if (auto path = find_path(view, here, goal)) ps.path = std::move(*path);
    }
    if (ps.path.size() >= 2 && aligned_for_step(map, self, ps.path[0], ps.path[1])) ps.next = 1;
  }

  // The final waypoint is the player's cell; stop one short of it.
  auto at_waypoint = [&](std::size_t i) {
    const Vec2 wp = map.cell_center(ps.path[i]);
    const Vec2 c = self.center();
    return std::hypot(wp.x - c.x, wp.y - c.y) < kArriveEps;
  };
  while (ps.next + 1 < ps.path.size() && at_waypoint(ps.next)) ++ps.next;
  if (ps.path.size() < 2 || ps.next + 1 >= ps.path.size()) {
    self.vel = {};
    return;
  }

  const Vec2 wp = map.cell_center(ps.path[ps.next]);
  const Vec2 c = self.center();
  const Vec2 dir{wp.x - c.x, wp.y - c.y};
  const double dist = std::hypot(dir.x, dir.y);
  const double v = std::min(self.speed, dist / kTickSeconds);
  self.vel = {dir.x / dist * v, dir.y / dist * v};
}

void enemy_fire(Scene& scene, Entity& self, const Entity& target) {
  const double interval = config_number(self, "fire_interval", kEnemyFireInterval);
  const double range = config_number(self, "fire_range", kEnemyFireRange);
  const double speed = config_number(self, "projectile_speed", kProjectileSpeed);
  const double damage = config_number(self, "damage", kProjectileDamage);
  if (self.pursuit.ticks_since_fire < interval) return;

  const Vec2 from = self.center();
  const Vec2 to = target.center();
  if (std::hypot(to.x - from.x, to.y - from.y) > range) return;
  if (scene.tilemap && !line_of_sight(*scene.tilemap, from, to)) return;
  if (from == to) return;
  fire_projectile(scene, self.id, {to.x - from.x, to.y - from.y}, speed, damage);
  self.pursuit.ticks_since_fire = 0;
}

void enemy_update(Scene& scene, Entity& self) {
  ++self.pursuit.ticks_since_fire;
  const Entity* target = scene.player();
  if (target == nullptr || !target->alive || !scene.tilemap) {
    self.vel = {};
    return;
  }
  enemy_pursue(scene, self, *target);
  enemy_fire(scene, self, *target);
}

void projectile_update(Entity& self) {
  const Vec2 dir = normalized(self.vel);
  self.vel = {dir.x * self.speed, dir.y * self.speed};
}

void builtin_update(Scene& scene, Entity& e) {
  switch (e.kind) {
    case EntityKind::Enemy: enemy_update(scene, e); break;
    case EntityKind::Projectile: projectile_update(e); break;
    case EntityKind::Player:
    case EntityKind::Trinket: break;
  }
}

void builtin_collide(Entity& self, Entity& other) {
  if (self.kind != EntityKind::Projectile) return;
  if (!other.has_health() || !other.alive) return;
  const Value owner = custom_or(self, "owner", Value());
  if (owner.is<EntityRef>() && owner.as<EntityRef>().id == other.id) return;
  const Value dmg = custom_or(self, "damage", Value(kProjectileDamage));
  if (!dmg.is<double>()) {
    behaviour_fail(self, "collide", "type mismatch: field 'damage' must be a number, got " +
                                        type_name(dmg));
  }
  other.health = std::max(0.0, other.health - dmg.as<double>());
  self.alive = false;
}

// Runs `body` on behalf of entity `owner`; a failure quarantines it.
template <typename F>
void guarded(Scene& scene, EntityId owner, F&& body) {
  std::string message;
  std::vector<TraceFrame> trace;
  try {
    body();
    return;
  } catch (const RuntimeError& e) {
    message = e.message();
    trace = e.trace();
  } catch (const Error& e) {
    message = e.what();
    trace = {TraceFrame{"<engine>", "<engine>", 0, 0}};
  }
  if (scene.find(owner) != nullptr) {
    quarantine(scene, owner, std::move(message), std::move(trace));
  } else {
    scene.emit(QuarantineEvent{QuarantineRecord{owner, scene.tick_count, message, trace}});
  }
}

Value call_slot(ScriptHost* host, const Value& fn, std::vector<Value> args) {
  if (host == nullptr) throw RuntimeError("no script host attached", {TraceFrame{"<engine>", "<engine>", 0, 0}});
  return host->invoke(fn, std::move(args));
}

std::vector<EntityId> live_ids(const Scene& scene) {
  std::vector<EntityId> ids;
  ids.reserve(scene.entities.size());
  for (const auto& [id, e] : scene.entities) ids.push_back(id);
  return ids;
}

Entity* live(Scene& scene, EntityId id) {
  Entity* e = scene.find(id);
  return e != nullptr && e->alive ? e : nullptr;
}

void dispatch_collide(Scene& scene, ScriptHost* host, EntityId self_id, EntityId other_id) {
  Entity* self = live(scene, self_id);
  Entity* other = live(scene, other_id);
  if (self == nullptr || other == nullptr) return;
  guarded(scene, self_id, [&] {
    if (!self->on_collide.is_nil()) {
      Value fn = self->on_collide;
      call_slot(host, fn, {Value(EntityRef{self_id}), Value(EntityRef{other_id})});
    } else {
      builtin_collide(*self, *other);
    }
  });
}

void run_callbacks(Scene& scene, ScriptHost* host) {
  std::vector<std::uint64_t> serials;
  for (const auto& cb : scene.callbacks) serials.push_back(cb.serial);

  for (std::uint64_t serial : serials) {
    auto it = std::find_if(scene.callbacks.begin(), scene.callbacks.end(),
                           [&](const Callback& c) { return c.serial == serial; });
    if (it == scene.callbacks.end()) continue;  // removed by an earlier callback
    const std::size_t index = static_cast<std::size_t>(it - scene.callbacks.begin());
    const Callback cb = *it;
    if (!(scene.rng.uniform() < cb.probability)) continue;
    scene.emit(CallbackFiredEvent{index});
    try {
      call_slot(host, cb.fn, {});
    } catch (const Error& e) {
      const auto* rt = dynamic_cast<const RuntimeError*>(&e);
      QuarantineRecord rec{std::nullopt, scene.tick_count, rt ? rt->message() : e.what(),
                           rt ? rt->trace() : std::vector<TraceFrame>{{"<callback>", "<engine>", 0, 0}}};
      std::erase_if(scene.callbacks, [&](const Callback& c) { return c.serial == serial; });
      scene.emit(QuarantineEvent{std::move(rec)});
    }
  }
}

}  // namespace

bool aabb_overlap(const Entity& a, const Entity& b) {
  return a.pos.x < b.pos.x + b.size.x && b.pos.x < a.pos.x + a.size.x &&
         a.pos.y < b.pos.y + b.size.y && b.pos.y < a.pos.y + a.size.y;
}

bool line_of_sight(const Tilemap& map, Vec2 from, Vec2 to) {
  const double len = std::hypot(to.x - from.x, to.y - from.y);
  const double step = std::max(1.0, map.tile_size / 4.0);
  const int n = static_cast<int>(std::ceil(len / step));
  for (int i = 0; i <= n; ++i) {
    const double t = n == 0 ? 0.0 : static_cast<double>(i) / n;
    const GridPos c = map.cell_of({from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t});
    if (!map.walkable(c.col, c.row)) return false;
  }
  return true;
}

EntityId fire_projectile(Scene& scene, EntityId owner, Vec2 direction, double speed,
                         double damage) {
  const Entity* src = scene.find(owner);
  if (src == nullptr) {
    throw Error(ErrorCode::UnknownEntity, "no entity with id " + std::to_string(owner));
  }
  const Vec2 dir = normalized(direction);
  if (dir.x == 0 && dir.y == 0) {
    throw Error(ErrorCode::TypeMismatch, "projectile direction must be non-zero");
  }
  const Vec2 c = src->center();
  EntitySpec spec;
  spec.kind = EntityKind::Projectile;
  spec.size = {kProjectileSize, kProjectileSize};
  spec.pos = {std::clamp(c.x - kProjectileSize / 2, 0.0, scene.width - kProjectileSize),
              std::clamp(c.y - kProjectileSize / 2, 0.0, scene.height - kProjectileSize)};
  spec.vel = {dir.x * speed, dir.y * speed};
  spec.speed = speed;
  spec.sprite = solid_color("#ffd700", static_cast<int>(kProjectileSize),
                            static_cast<int>(kProjectileSize));
  spec.custom["owner"] = Value(EntityRef{owner});
  spec.custom["damage"] = Value(damage);
  return spawn(scene, spec);
}

MoveOutcome move_and_collide(Entity& e, const Tilemap* map, double scene_w, double scene_h,
                             double dt) {
  MoveOutcome out;
  out.blocked_x = sweep_axis(e, map, scene_w, e.vel.x * dt, Axis::X);
  out.blocked_y = sweep_axis(e, map, scene_h, e.vel.y * dt, Axis::Y);
  return out;
}

std::vector<EngineEvent> tick(Scene& scene, ScriptHost* host) {
  const std::size_t mark = scene.events.size();
  scene.in_tick = true;
  const double dt = kTickSeconds;

  // 1. input
  for (auto& [id, e] : scene.entities) {
    if (e.kind == EntityKind::Player && e.alive) apply_input(e, scene.input);
  }

  // 2. behaviours, ascending id; entities spawned here wait for the next tick
  for (EntityId id : live_ids(scene)) {
    Entity* e = live(scene, id);
    if (e == nullptr) continue;
    guarded(scene, id, [&] {
      if (!e->on_update.is_nil()) {
        Value fn = e->on_update;
        call_slot(host, fn, {Value(EntityRef{id}), Value(dt)});
      } else {
        builtin_update(scene, *e);
      }
    });
  }

  // 3. movement
  const Tilemap* map = scene.tilemap ? &*scene.tilemap : nullptr;
  for (EntityId id : live_ids(scene)) {
    Entity* e = live(scene, id);
    if (e == nullptr) continue;
    const MoveOutcome moved = move_and_collide(*e, map, scene.width, scene.height, dt);
    if (e->kind == EntityKind::Projectile && moved.blocked()) e->alive = false;
  }

  // 4. overlaps in ascending (a, b) order
  const std::vector<EntityId> ids = live_ids(scene);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const Entity* a = live(scene, ids[i]);
      const Entity* b = live(scene, ids[j]);
      if (a == nullptr || b == nullptr || !aabb_overlap(*a, *b)) continue;
      dispatch_collide(scene, host, ids[i], ids[j]);
      dispatch_collide(scene, host, ids[j], ids[i]);
    }
  }

  // 5. probabilistic callbacks
  run_callbacks(scene, host);

  // 6. removals
  for (EntityId id : live_ids(scene)) {
    const Entity* e = scene.find(id);
    if (!e->alive || (e->has_health() && e->health <= 0)) remove_entity(scene, id);
  }

  // 7. clock
  ++scene.tick_count;
  scene.in_tick = false;

  std::vector<EngineEvent> out(std::make_move_iterator(scene.events.begin() + static_cast<std::ptrdiff_t>(mark)),
                               std::make_move_iterator(scene.events.end()));
  scene.events.resize(mark);
  return out;
}

}  // namespace noteg
