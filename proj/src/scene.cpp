#include "noteg/scene.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "noteg/error.hpp"

namespace noteg {

namespace {

constexpr std::array<std::string_view, 12> kBuiltinFields = {
    "id", "name", "kind", "pos", "size", "vel", "health", "speed",
    "sprite", "on_update", "on_collide", "alive"};

constexpr double kEdgeEps = 1e-9;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string pair6(Vec2 v) { return format_fixed6(v.x) + " " + format_fixed6(v.y); }

}  // namespace

std::string_view kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::Player: return "player";
    case EntityKind::Enemy: return "enemy";
    case EntityKind::Trinket: return "trinket";
    case EntityKind::Projectile: return "projectile";
  }
  return "trinket";
}

std::optional<EntityKind> parse_kind(std::string_view name) {
  for (auto k : {EntityKind::Player, EntityKind::Enemy, EntityKind::Trinket,
                 EntityKind::Projectile}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_builtin_field(std::string_view name) {
  return std::find(kBuiltinFields.begin(), kBuiltinFields.end(), name) != kBuiltinFields.end();
}

std::string_view key_name(Key k) {
  switch (k) {
    case Key::Up: return "up";
    case Key::Down: return "down";
    case Key::Left: return "left";
    case Key::Right: return "right";
    case Key::Action: return "action";
  }
  return "up";
}

std::optional<Key> parse_key(std::string_view name) {
  for (auto k : {Key::Up, Key::Down, Key::Left, Key::Right, Key::Action}) {
    if (key_name(k) == name) return k;
  }
  return std::nullopt;
}

void InputState::set(Key k, bool down) {
  const unsigned bit = 1u << static_cast<unsigned>(k);
  pressed = down ? (pressed | bit) : (pressed & ~bit);
}

bool Tilemap::walkable(int col, int row) const {
  if (col < 0 || row < 0 || col >= cols || row >= rows) return true;
  auto it = tileset.find(at(col, row));
  return it == tileset.end() || it->second.walkable;
}

GridPos Tilemap::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor(p.x / tile_size)),
          static_cast<int>(std::floor(p.y / tile_size))};
}

Vec2 Tilemap::cell_center(GridPos c) const {
  return {(c.col + 0.5) * tile_size, (c.row + 0.5) * tile_size};
}

GridView Tilemap::view() const {
  return {cols, rows, [this](GridPos p) { return walkable(p.col, p.row); }};
}

bool Tilemap::rect_blocked(Vec2 pos, Vec2 size) const {
  const double ts = tile_size;
  const int c0 = static_cast<int>(std::floor((pos.x + kEdgeEps) / ts));
  const int c1 = static_cast<int>(std::ceil((pos.x + size.x - kEdgeEps) / ts)) - 1;
  const int r0 = static_cast<int>(std::floor((pos.y + kEdgeEps) / ts));
  const int r1 = static_cast<int>(std::ceil((pos.y + size.y - kEdgeEps) / ts)) - 1;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!walkable(c, r)) return true;
    }
  }
  return false;
}

Scene::Scene(int w, int h, std::string bg, std::uint64_t seed)
    : width(w), height(h), background(std::move(bg)), rng(seed) {}

Entity* Scene::find(EntityId id) {
  auto it = entities.find(id);
  return it == entities.end() ? nullptr : &it->second;
}

const Entity* Scene::find(EntityId id) const {
  auto it = entities.find(id);
  return it == entities.end() ? nullptr : &it->second;
}

Entity* Scene::player() {
  for (auto& [id, e] : entities) {
    if (e.kind == EntityKind::Player) return &e;
  }
  return nullptr;
}

std::vector<EngineEvent> Scene::take_events() {
  std::vector<EngineEvent> out;
  out.swap(events);
  return out;
}

EntityId spawn(Scene& scene, const EntitySpec& spec) {
  const bool finite = std::isfinite(spec.pos.x) && std::isfinite(spec.pos.y) &&
                      std::isfinite(spec.size.x) && std::isfinite(spec.size.y);
  if (!finite || spec.size.x <= 0 || spec.size.y <= 0) {
    throw Error(ErrorCode::BadDimensions, "entity size must be positive and finite");
  }
  if (spec.pos.x < 0 || spec.pos.y < 0 || spec.pos.x + spec.size.x > scene.width ||
      spec.pos.y + spec.size.y > scene.height) {
    std::ostringstream msg;
    msg << "AABB (" << format_number(spec.pos.x) << ", " << format_number(spec.pos.y) << ", "
        << format_number(spec.size.x) << "x" << format_number(spec.size.y)
        << ") is not inside the " << scene.width << "x" << scene.height << " scene";
    throw Error(ErrorCode::SpawnOutOfBounds, msg.str());
  }
  Entity e;
  e.id = scene.next_id++;
  e.name = spec.name;
  e.kind = spec.kind;
  e.pos = spec.pos;
  e.size = spec.size;
  e.vel = spec.vel;
  e.health = spec.health;
  e.speed = spec.speed;
  e.sprite = spec.sprite;
  e.custom = spec.custom;
  const EntityId id = e.id;
  scene.entities.emplace(id, std::move(e));
  scene.emit(SpawnEvent{id, spec.kind});
  return id;
}

QuarantineRecord quarantine(Scene& scene, EntityId id, std::string error,
                            std::vector<TraceFrame> trace) {
  if (scene.entities.erase(id) == 0) {
    throw Error(ErrorCode::UnknownEntity, "no entity with id " + std::to_string(id));
  }
  QuarantineRecord rec{id, scene.tick_count, std::move(error), std::move(trace)};
  scene.quarantine_log.push_back(rec);
  scene.emit(QuarantineEvent{rec});
  return rec;
}

bool remove_entity(Scene& scene, EntityId id) {
  if (scene.entities.erase(id) == 0) return false;
  scene.emit(DespawnEvent{id});
  return true;
}

void despawn(Scene& scene, EntityId id) {
  Entity* e = scene.find(id);
  if (e == nullptr) return;
  if (scene.in_tick) {
    e->alive = false;
  } else {
    remove_entity(scene, id);
  }
}

void refresh_scene(Scene& scene) {
  std::vector<EntityId> doomed;
  for (const auto& [id, e] : scene.entities) {
    if (e.kind != EntityKind::Player) doomed.push_back(id);
  }
  for (EntityId id : doomed) remove_entity(scene, id);
  scene.callbacks.clear();
}

std::string canonical_state(const Scene& scene) {
  std::ostringstream out;
  char rng_hex[17];
  std::snprintf(rng_hex, sizeof rng_hex, "%016llx",
                static_cast<unsigned long long>(scene.rng.state()));

  out << "noteg-scene 1\n";
  out << "scene " << scene.width << " " << scene.height << " " << scene.background << "\n";
  out << "tick " << scene.tick_count << "\n";
  out << "next_id " << scene.next_id << "\n";
  out << "rng " << rng_hex << "\n";

  std::string keys;
  for (auto k : {Key::Up, Key::Down, Key::Left, Key::Right, Key::Action}) {
    if (scene.input.is_down(k)) {
      if (!keys.empty()) keys += ',';
      keys += key_name(k);
    }
  }
  out << "input " << (keys.empty() ? "-" : keys) << "\n";

  if (!scene.tilemap) {
    out << "tilemap none\n";
  } else {
    const Tilemap& m = *scene.tilemap;
    out << "tilemap " << m.cols << " " << m.rows << " " << m.tile_size << "\n";
    for (int r = 0; r < m.rows; ++r) {
      out << "row";
      for (int c = 0; c < m.cols; ++c) out << " " << m.at(c, r);
      out << "\n";
    }
    for (const auto& [id, def] : m.tileset) {
      out << "tile " << id << " " << (def.walkable ? 1 : 0) << " " << canonical(Value(def.sprite))
          << "\n";
    }
  }

  out << "callbacks " << scene.callbacks.size() << "\n";
  for (const auto& cb : scene.callbacks) {
    out << "callback " << canonical(cb.fn) << " " << format_fixed6(cb.probability) << "\n";
  }

  out << "entities " << scene.entities.size() << "\n";
  for (const auto& [id, e] : scene.entities) {
    out << "entity " << id << "\n";
    out << "  name " << (e.name ? quote_string(*e.name) : std::string("nil")) << "\n";
    out << "  kind " << kind_name(e.kind) << "\n";
    out << "  pos " << pair6(e.pos) << "\n";
    out << "  size " << pair6(e.size) << "\n";
    out << "  vel " << pair6(e.vel) << "\n";
    out << "  health " << format_fixed6(e.health) << "\n";
    out << "  speed " << format_fixed6(e.speed) << "\n";
    out << "  sprite " << canonical(Value(e.sprite)) << "\n";
    out << "  on_update " << canonical(e.on_update) << "\n";
    out << "  on_collide " << canonical(e.on_collide) << "\n";
    out << "  custom " << e.custom.size() << "\n";
    for (const auto& [k, v] : e.custom) {
      out << "  field " << quote_string(k) << " " << canonical(v) << "\n";
    }
    out << "  alive " << (e.alive ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string state_hash(const Scene& scene) { return sha256_hex(canonical_state(scene)); }

}  // namespace noteg
