#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "noteg/assets.hpp"
#include "noteg/interpreter.hpp"
#include "noteg/scene.hpp"

namespace noteg {

inline constexpr int kDefaultSceneWidth = 800;
inline constexpr int kDefaultSceneHeight = 600;
inline constexpr const char* kDefaultBackground = "#000000";

// Game command operations on a scene. The DSL builtins are thin argument-checking
// wrappers around these.

/// Throws AlreadyStarted or InvalidColor.
void start_game(Scene& scene, int width, int height, std::string_view color);
/// Whole-scene walkable floor of ceil(w/ts) x ceil(h/ts) tiles.
void create_map(Scene& scene, const SpriteRef& floor, int tile_size = kDefaultTileSize);
/// Grid form: tile 0 is walkable floor, tile 1 is wall.
void create_map(Scene& scene, const std::vector<std::vector<int>>& grid, const SpriteRef& floor,
                const SpriteRef& wall, int tile_size = kDefaultTileSize);
EntityId create_player(Scene& scene, const std::string& name, const SpriteRef& sprite, double x,
                       double y);

struct TrinketSpec {
  enum class Look { Rect, Sprite };
  Look look = Look::Rect;
  std::string color;  // Rect
  SpriteRef sprite;   // Sprite
  Vec2 size{kDefaultTrinketSize, kDefaultTrinketSize};
  Vec2 pos;
};
EntityId add_trinket(Scene& scene, const TrinketSpec& spec);
EntityId spawn_enemy(Scene& scene, const SpriteRef& sprite, double x, double y);
/// Throws BadProbability or ArityMismatch (callbacks take no arguments).
void callback_prob(Scene& scene, const Value& fn, double p);

/// A scene, the interpreter bound to it and the notebook-level state the
/// builtins touch (asset manifest, hidden-cell requests). Not movable: the
/// interpreter and builtins hold references into it.
class Runtime {
 public:
  explicit Runtime(std::uint64_t seed, std::filesystem::path asset_root = {},
                   AssetManifest manifest = {});
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  Scene& scene() { return scene_; }
  const Scene& scene() const { return scene_; }
  Interpreter& interpreter() { return interp_; }
  AssetManifest& manifest() { return manifest_; }
  const AssetManifest& manifest() const { return manifest_; }
  SheetRegistry& sheets() { return sheets_; }

  /// Parses and evaluates one cell. Parse errors come back as a failed
  /// result with a single-frame trace.
  CellResult execute(const std::string& cell_id, std::string_view source);
  std::vector<EngineEvent> tick();
  void reseed(std::uint64_t seed) { scene_.rng = SplitMix64(seed); }

  /// Cells that called hide(), in call order.
  const std::set<std::string>& hidden_requests() const { return hidden_; }
  void request_hidden(const std::string& cell_id) { hidden_.insert(cell_id); }

  /// True once after each create_map, so the session can ship the map.
  bool take_map_dirty();

 private:
  AssetManifest manifest_;
  SheetRegistry sheets_;
  Scene scene_;
  Interpreter interp_;
  std::set<std::string> hidden_;
  bool map_dirty_ = false;

  friend void install_builtins(Runtime& rt);
};

/// Binds the command set into the interpreter's builtin scope.
void install_builtins(Runtime& rt);

/// Names installed by install_builtins, sorted.
std::vector<std::string> builtin_names();

}  // namespace noteg
