#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "noteg/assets.hpp"
#include "noteg/error.hpp"
#include "noteg/pathfinding.hpp"
#include "noteg/rng.hpp"
#include "noteg/value.hpp"

namespace noteg {

// Simulation constants. Enemy tuning is copied onto each enemy as custom
// fields so it can be changed live.
inline constexpr double kTickSeconds = 1.0 / 60.0;
inline constexpr double kDefaultHealth = 100.0;
inline constexpr double kPlayerSpeed = 120.0;
inline constexpr double kEnemySpeed = 60.0;
inline constexpr double kProjectileSpeed = 240.0;
inline constexpr double kProjectileDamage = 10.0;
inline constexpr double kProjectileSize = 8.0;
inline constexpr double kDefaultCharacterSize = 24.0;
inline constexpr double kDefaultTrinketSize = 16.0;
inline constexpr int kDefaultTileSize = 32;
inline constexpr int kEnemyFireInterval = 60;
inline constexpr double kEnemyFireRange = 300.0;
inline constexpr int kEnemyRepathInterval = 30;

enum class EntityKind { Player, Enemy, Trinket, Projectile };

std::string_view kind_name(EntityKind kind);
std::optional<EntityKind> parse_kind(std::string_view name);

struct Vec2 {
  double x = 0;
  double y = 0;

  bool operator==(const Vec2&) const = default;
};

/// Per-entity cache of the built-in enemy behaviour. Derived from history,
/// not part of the hashed state.
struct PursuitState {
  std::vector<GridPos> path;
  std::size_t next = 0;
  std::int64_t last_repath_tick = -1;
  std::optional<GridPos> target_cell;
  int ticks_since_fire = 0;
};

struct Entity {
  EntityId id = 0;
  std::optional<std::string> name;
  EntityKind kind = EntityKind::Trinket;
  Vec2 pos;
  Vec2 size;
  Vec2 vel;
  double health = kDefaultHealth;
  double speed = 0;
  SpriteRef sprite;
  Value on_update;
  Value on_collide;
  std::map<std::string, Value> custom;
  bool alive = true;

  PursuitState pursuit;

  Vec2 center() const { return {pos.x + size.x / 2, pos.y + size.y / 2}; }
  bool has_health() const { return kind == EntityKind::Player || kind == EntityKind::Enemy; }
};

/// Built-in field names; custom fields may never use these.
bool is_builtin_field(std::string_view name);

struct TileDef {
  SpriteRef sprite;
  bool walkable = true;
};

struct Tilemap {
  int cols = 0;
  int rows = 0;
  int tile_size = kDefaultTileSize;
  std::vector<int> grid;  // row-major, rows * cols
  std::map<int, TileDef> tileset;

  int at(int col, int row) const { return grid[static_cast<std::size_t>(row * cols + col)]; }
  /// Cells outside the grid count as walkable; scene bounds are enforced
  /// separately.
  bool walkable(int col, int row) const;
  GridPos cell_of(Vec2 point) const;
  Vec2 cell_center(GridPos cell) const;
  GridView view() const;
  /// True if the rectangle overlaps any blocked tile (open intervals).
  bool rect_blocked(Vec2 pos, Vec2 size) const;
};

struct QuarantineRecord {
  // Empty when the failing code was a probabilistic callback.
  std::optional<EntityId> entity_id;
  std::int64_t tick = 0;
  std::string error;
  std::vector<TraceFrame> trace;
};

enum class Key { Up, Down, Left, Right, Action };
std::string_view key_name(Key k);
std::optional<Key> parse_key(std::string_view name);

struct InputState {
  unsigned pressed = 0;  // bit per Key

  bool is_down(Key k) const { return (pressed >> static_cast<unsigned>(k)) & 1u; }
  void set(Key k, bool down);
  bool operator==(const InputState&) const = default;
};

struct SpawnEvent {
  EntityId id;
  EntityKind kind;
};
struct DespawnEvent {
  EntityId id;
};
struct QuarantineEvent {
  QuarantineRecord record;
};
struct PrintEvent {
  std::string text;
};
struct CallbackFiredEvent {
  std::size_t index;
};
using EngineEvent =
    std::variant<SpawnEvent, DespawnEvent, QuarantineEvent, PrintEvent, CallbackFiredEvent>;

struct Callback {
  Value fn;
  double probability = 0;
  std::uint64_t serial = 0;  // identity within the session, not hashed
};

/// Everything needed to place a new entity.
struct EntitySpec {
  EntityKind kind = EntityKind::Trinket;
  std::optional<std::string> name;
  Vec2 pos;
  Vec2 size{kDefaultCharacterSize, kDefaultCharacterSize};
  Vec2 vel;
  double health = kDefaultHealth;
  double speed = 0;
  SpriteRef sprite;
  std::map<std::string, Value> custom;
};

/// The authoritative simulation state. Single owner: mutated only by the
/// control loop at tick boundaries or inside tick().
struct Scene {
  Scene(int width, int height, std::string background, std::uint64_t seed);

  int width;
  int height;
  std::string background;
  bool started = false;
  std::optional<Tilemap> tilemap;
  std::map<EntityId, Entity> entities;
  EntityId next_id = 1;
  std::int64_t tick_count = 0;
  SplitMix64 rng;
  std::vector<Callback> callbacks;
  std::vector<QuarantineRecord> quarantine_log;
  InputState input;
  bool in_tick = false;
  std::uint64_t next_callback_serial = 1;

  // Outbox drained by the session.
  std::vector<EngineEvent> events;

  Entity* find(EntityId id);
  const Entity* find(EntityId id) const;
  Entity* player();
  std::vector<EngineEvent> take_events();
  void emit(EngineEvent e) { events.push_back(std::move(e)); }
};

/// Adds an entity with id = next_id. Throws SpawnOutOfBounds.
EntityId spawn(Scene& scene, const EntitySpec& spec);

/// Removes `id` and appends the record to the quarantine log. Throws
/// UnknownEntity.
QuarantineRecord quarantine(Scene& scene, EntityId id, std::string error,
                            std::vector<TraceFrame> trace);

/// Removes an entity now and emits a Despawn event. Returns false if absent.
bool remove_entity(Scene& scene, EntityId id);

/// Marks an entity dead; removal happens at the end of the current tick, or
/// immediately when called at a tick boundary.
void despawn(Scene& scene, EntityId id);

/// Removes every entity except the player and clears callbacks.
void refresh_scene(Scene& scene);

/// Canonical text serialization hashed by state_hash.
std::string canonical_state(const Scene& scene);
/// SHA-256 of canonical_state, lowercase hex.
std::string state_hash(const Scene& scene);

}  // namespace noteg
