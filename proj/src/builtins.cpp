#include "noteg/builtins.hpp"

#include <algorithm>
#include <cmath>

#include "noteg/engine.hpp"
#include "noteg/parser.hpp"

namespace noteg {

namespace {

void require_started(const Scene& scene) {
  if (!scene.started) throw Error(ErrorCode::NoScene, "call start_game first");
}

Vec2 sprite_size(const SpriteRef& s, double fallback) {
  if (s.rect.w > 0 && s.rect.h > 0) return {static_cast<double>(s.rect.w), static_cast<double>(s.rect.h)};
  return {fallback, fallback};
}

Tilemap make_tilemap(int cols, int rows, int tile_size) {
  if (tile_size <= 0) throw Error(ErrorCode::BadDimensions, "tile size must be positive");
  Tilemap m;
  m.cols = cols;
  m.rows = rows;
  m.tile_size = tile_size;
  m.grid.assign(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows), 0);
  return m;
}

}  // namespace

void start_game(Scene& scene, int width, int height, std::string_view color) {
  if (scene.started) throw Error(ErrorCode::AlreadyStarted, "a game is already running");
  std::string bg = normalize_color(color);
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::BadDimensions, "window size must be positive");
  }
  scene.width = width;
  scene.height = height;
  scene.background = std::move(bg);
  scene.started = true;
}

void create_map(Scene& scene, const SpriteRef& floor, int tile_size) {
  require_started(scene);
  const int cols = (scene.width + tile_size - 1) / std::max(tile_size, 1);
  const int rows = (scene.height + tile_size - 1) / std::max(tile_size, 1);
  Tilemap m = make_tilemap(cols, rows, tile_size);
  m.tileset[0] = TileDef{floor, true};
  scene.tilemap = std::move(m);
}

void create_map(Scene& scene, const std::vector<std::vector<int>>& grid, const SpriteRef& floor,
                const SpriteRef& wall, int tile_size) {
  require_started(scene);
  if (grid.empty() || grid.front().empty()) {
    throw Error(ErrorCode::RaggedGrid, "grid must have at least one row and one column");
  }
  const std::size_t cols = grid.front().size();
  for (std::size_t r = 0; r < grid.size(); ++r) {
    if (grid[r].size() != cols) {
      throw Error(ErrorCode::RaggedGrid, "row " + std::to_string(r) + " has " +
                                             std::to_string(grid[r].size()) + " cells, expected " +
                                             std::to_string(cols));
    }
  }
  Tilemap m = make_tilemap(static_cast<int>(cols), static_cast<int>(grid.size()), tile_size);
  m.tileset[0] = TileDef{floor, true};
  m.tileset[1] = TileDef{wall, false};
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const int id = grid[r][c];
      if (!m.tileset.contains(id)) {
        throw Error(ErrorCode::UnknownTileId, "tile id " + std::to_string(id) + " at row " +
                                                  std::to_string(r) + ", col " + std::to_string(c));
      }
      m.grid[r * cols + c] = id;
    }
  }
  scene.tilemap = std::move(m);
}

EntityId create_player(Scene& scene, const std::string& name, const SpriteRef& sprite, double x,
                       double y) {
  require_started(scene);
  if (!scene.tilemap) throw Error(ErrorCode::NoMap, "call create_map first");
  if (scene.player() != nullptr) throw Error(ErrorCode::PlayerExists, "the scene already has a player");
  EntitySpec spec;
  spec.kind = EntityKind::Player;
  spec.name = name;
  spec.pos = {x, y};
  spec.size = sprite_size(sprite, kDefaultCharacterSize);
  spec.speed = kPlayerSpeed;
  spec.sprite = sprite;
  return spawn(scene, spec);
}

EntityId add_trinket(Scene& scene, const TrinketSpec& t) {
  require_started(scene);
  EntitySpec spec;
  spec.kind = EntityKind::Trinket;
  spec.pos = t.pos;
  spec.size = t.size;
  if (t.look == TrinketSpec::Look::Rect) {
    spec.sprite = solid_color(normalize_color(t.color), static_cast<int>(t.size.x),
                              static_cast<int>(t.size.y));
  } else {
    spec.sprite = t.sprite;
  }
  return spawn(scene, spec);
}

EntityId spawn_enemy(Scene& scene, const SpriteRef& sprite, double x, double y) {
  require_started(scene);
  if (scene.player() == nullptr) throw Error(ErrorCode::NoPlayer, "enemies need a player to chase");
  EntitySpec spec;
  spec.kind = EntityKind::Enemy;
  spec.pos = {x, y};
  spec.size = sprite_size(sprite, kDefaultCharacterSize);
  spec.speed = kEnemySpeed;
  spec.sprite = sprite;
  spec.custom["fire_interval"] = Value(kEnemyFireInterval);
  spec.custom["fire_range"] = Value(kEnemyFireRange);
  spec.custom["projectile_speed"] = Value(kProjectileSpeed);
  spec.custom["damage"] = Value(kProjectileDamage);
  return spawn(scene, spec);
}

void callback_prob(Scene& scene, const Value& fn, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::BadProbability, "probability must be in [0, 1], got " + format_number(p));
  }
  if (!fn.is_callable()) {
    throw Error(ErrorCode::TypeMismatch, "callback must be a function, got " + type_name(fn));
  }
  if (fn.is<FunctionPtr>() && !fn.as<FunctionPtr>()->params.empty()) {
    throw Error(ErrorCode::ArityMismatch, "callbacks take no arguments, got " +
                                              std::to_string(fn.as<FunctionPtr>()->params.size()));
  }
  if (fn.is<BuiltinPtr>() && fn.as<BuiltinPtr>()->min_arity > 0) {
    throw Error(ErrorCode::ArityMismatch, "callbacks take no arguments");
  }
  scene.callbacks.push_back(Callback{fn, p, scene.next_callback_serial++});
}

Runtime::Runtime(std::uint64_t seed, std::filesystem::path asset_root, AssetManifest manifest)
    : manifest_(std::move(manifest)),
      sheets_(std::move(asset_root), manifest_),
      scene_(kDefaultSceneWidth, kDefaultSceneHeight, kDefaultBackground, seed),
      interp_(scene_) {
  install_builtins(*this);
}

CellResult Runtime::execute(const std::string& cell_id, std::string_view source) {
  ast::Program program;
  try {
    program = parse(source, cell_id);
  } catch (const ParseError& e) {
    CellResult r;
    r.ok = false;
    r.error = RuntimeError(e.what(), {TraceFrame{"<parse>", cell_id, e.line(), e.col()}});
    return r;
  }
  return interp_.eval_cell(program);
}

std::vector<EngineEvent> Runtime::tick() { return noteg::tick(scene_, &interp_); }

bool Runtime::take_map_dirty() { return std::exchange(map_dirty_, false); }

namespace {

using Args = std::span<const Value>;

double num(Interpreter& in, Args a, std::size_t i, const char* what) {
  if (!a[i].is<double>()) in.fail("type mismatch: " + std::string(what) + " must be a number, got " + type_name(a[i]));
  const double d = a[i].as<double>();
  if (!std::isfinite(d)) in.fail("type mismatch: " + std::string(what) + " must be finite");
  return d;
}

int integer(Interpreter& in, Args a, std::size_t i, const char* what) {
  const double d = num(in, a, i, what);
  if (std::floor(d) != d || std::abs(d) > 1e9) in.fail("type mismatch: " + std::string(what) + " must be an integer");
  return static_cast<int>(d);
}

const std::string& str(Interpreter& in, Args a, std::size_t i, const char* what) {
  if (!a[i].is<std::string>()) in.fail("type mismatch: " + std::string(what) + " must be a string, got " + type_name(a[i]));
  return a[i].as<std::string>();
}

// A sprite argument may be a SpriteRef or a "#RRGGBB" colour of the given size.
SpriteRef sprite(Interpreter& in, Args a, std::size_t i, const char* what, int w, int h) {
  if (a[i].is<SpriteRef>()) return a[i].as<SpriteRef>();
  if (a[i].is<std::string>()) return solid_color(normalize_color(a[i].as<std::string>()), w, h);
  in.fail("type mismatch: " + std::string(what) + " must be a sprite or colour, got " + type_name(a[i]));
}

Entity& entity(Interpreter& in, Args a, std::size_t i) {
  if (!a[i].is<EntityRef>()) in.fail("type mismatch: expected an entity, got " + type_name(a[i]));
  const EntityId id = a[i].as<EntityRef>().id;
  Entity* e = in.scene().find(id);
  if (e == nullptr) in.fail("dangling entity-ref: #" + std::to_string(id));
  return *e;
}

// Entities measure from their centre, [x, y] lists are points.
Vec2 point(Interpreter& in, Args a, std::size_t i) {
  if (a[i].is<ListPtr>()) {
    const ValueList& l = *a[i].as<ListPtr>();
    if (l.size() == 2 && l[0].is<double>() && l[1].is<double>()) return {l[0].as<double>(), l[1].as<double>()};
    in.fail("type mismatch: a point must be [x, y]");
  }
  return entity(in, a, i).center();
}

std::vector<std::vector<int>> int_grid(Interpreter& in, const Value& v) {
  std::vector<std::vector<int>> grid;
  for (const Value& row : *v.as<ListPtr>()) {
    if (!row.is<ListPtr>()) in.fail("type mismatch: map grid rows must be lists");
    std::vector<int>& out = grid.emplace_back();
    for (const Value& cell : *row.as<ListPtr>()) {
      if (!cell.is<double>() || std::floor(cell.as<double>()) != cell.as<double>() ||
          std::abs(cell.as<double>()) > 1e9) {
        in.fail("type mismatch: map grid cells must be integers, got " + repr(cell));
      }
      out.push_back(static_cast<int>(cell.as<double>()));
    }
  }
  return grid;
}

}  // namespace

void install_builtins(Runtime& rt) {
  Interpreter& interp = rt.interp_;
  Scene& scene = rt.scene_;
  auto def = [&](const char* name, int min, int max, Builtin::Impl impl) {
    interp.define_builtin(name, min, max, std::move(impl));
  };

  // Game commands
  def("start_game", 3, 3, [&scene](Interpreter& in, Args a) {
    start_game(scene, integer(in, a, 0, "width"), integer(in, a, 1, "height"), str(in, a, 2, "colour"));
    return Value();
  });
  def("create_map", 1, 4, [&rt, &scene](Interpreter& in, Args a) {
    const int ts_default = kDefaultTileSize;
    if (a[0].is<ListPtr>()) {
      if (a.size() < 3) in.fail("arity mismatch: create_map(grid, floor, wall) expected 3, got " + std::to_string(a.size()));
      const int ts = a.size() == 4 ? integer(in, a, 3, "tile size") : ts_default;
      const auto grid = int_grid(in, a[0]);
      create_map(scene, grid, sprite(in, a, 1, "floor", ts, ts), sprite(in, a, 2, "wall", ts, ts), ts);
    } else {
      if (a.size() > 2) in.fail("arity mismatch: create_map(floor) expected 1 to 2, got " + std::to_string(a.size()));
      const int ts = a.size() == 2 ? integer(in, a, 1, "tile size") : ts_default;
      create_map(scene, sprite(in, a, 0, "floor", ts, ts), ts);
    }
    rt.map_dirty_ = true;
    return Value();
  });
  def("create_player", 4, 4, [&scene](Interpreter& in, Args a) {
    const std::string& name = str(in, a, 0, "name");
    const int d = static_cast<int>(kDefaultCharacterSize);
    const EntityId id = create_player(scene, name, sprite(in, a, 1, "sprite", d, d), num(in, a, 2, "x"), num(in, a, 3, "y"));
    const Value ref(EntityRef{id});
    in.globals().assign(name, ref);
    return ref;
  });
  def("add_trinket", 3, 5, [&scene](Interpreter& in, Args a) {
    if (a.size() == 4) in.fail("arity mismatch: add_trinket expected 3 or 5, got 4");
    TrinketSpec t;
    t.pos = {num(in, a, 1, "x"), num(in, a, 2, "y")};
    if (a.size() == 5) t.size = {num(in, a, 3, "width"), num(in, a, 4, "height")};
    if (a[0].is<SpriteRef>()) {
      t.look = TrinketSpec::Look::Sprite;
      t.sprite = a[0].as<SpriteRef>();
      if (a.size() == 3 && !t.sprite.is_color()) t.size = sprite_size(t.sprite, kDefaultTrinketSize);
    } else {
      t.look = TrinketSpec::Look::Rect;
      t.color = str(in, a, 0, "trinket look");
    }
    return Value(EntityRef{add_trinket(scene, t)});
  });
  def("spawn_enemy", 3, 3, [&scene](Interpreter& in, Args a) {
    const int d = static_cast<int>(kDefaultCharacterSize);
    return Value(EntityRef{spawn_enemy(scene, sprite(in, a, 0, "sprite", d, d), num(in, a, 1, "x"), num(in, a, 2, "y"))});
  });
  def("callback_prob", 2, 2, [&scene](Interpreter& in, Args a) {
    if (!a[1].is<double>()) in.fail("type mismatch: probability must be a number, got " + type_name(a[1]));
    callback_prob(scene, a[0], a[1].as<double>());
    return Value();
  });
  def("refresh_scene", 0, 0, [&scene](Interpreter&, Args) {
    require_started(scene);
    refresh_scene(scene);
    return Value();
  });

  // Scene utilities
  def("scene_list", 0, 0, [&scene](Interpreter&, Args) {
    ValueList out;
    for (const auto& [id, e] : scene.entities) out.push_back(Value(EntityRef{id}));
    return Value(make_list(std::move(out)));
  });
  def("player", 0, 0, [&scene](Interpreter&, Args) {
    const Entity* p = scene.player();
    return p ? Value(EntityRef{p->id}) : Value();
  });
  def("despawn", 1, 1, [&scene](Interpreter& in, Args a) {
    despawn(scene, entity(in, a, 0).id);
    return Value();
  });
  def("distance", 2, 2, [](Interpreter& in, Args a) {
    const Vec2 p = point(in, a, 0), q = point(in, a, 1);
    return Value(std::hypot(q.x - p.x, q.y - p.y));
  });
  def("spawn_projectile", 3, 3, [&scene](Interpreter& in, Args a) {
    const EntityId owner = entity(in, a, 0).id;
    const Vec2 dir{num(in, a, 1, "dx"), num(in, a, 2, "dy")};
    if (dir.x == 0 && dir.y == 0) in.fail("type mismatch: projectile direction must be non-zero");
    return Value(EntityRef{fire_projectile(scene, owner, dir, kProjectileSpeed, kProjectileDamage)});
  });
  def("rand", 0, 0, [&scene](Interpreter&, Args) { return Value(scene.rng.uniform()); });
  def("print", 0, -1, [&scene](Interpreter&, Args a) {
    std::string text;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i) text += ' ';
      text += to_text(a[i]);
    }
    scene.emit(PrintEvent{std::move(text)});
    return Value();
  });
  def("hide", 0, 0, [&rt](Interpreter& in, Args) {
    if (!in.current_cell().empty()) rt.request_hidden(in.current_cell());
    return Value();
  });

  // Assets
  def("load_sheet", 4, 4, [&rt](Interpreter& in, Args a) {
    return Value(rt.sheets_.load_sheet(str(in, a, 0, "sheet name"), str(in, a, 1, "path"),
                                       integer(in, a, 2, "tile width"), integer(in, a, 3, "tile height")));
  });
  def("sheet_sprite", 2, 2, [&rt](Interpreter& in, Args a) {
    std::string name;
    if (a[0].is<SpriteRef>()) {
      name = a[0].as<SpriteRef>().sheet;
    } else {
      name = str(in, a, 0, "sheet");
    }
    return Value(rt.sheets_.sprite(name, integer(in, a, 1, "index")));
  });

  // General
  def("len", 1, 1, [](Interpreter& in, Args a) {
    if (a[0].is<ListPtr>()) return Value(static_cast<double>(a[0].as<ListPtr>()->size()));
    if (a[0].is<std::string>()) return Value(static_cast<double>(a[0].as<std::string>().size()));
    in.fail("type mismatch: len expects a list or string, got " + type_name(a[0]));
  });
  def("push", 2, 2, [](Interpreter& in, Args a) {
    if (!a[0].is<ListPtr>()) in.fail("type mismatch: push expects a list, got " + type_name(a[0]));
    a[0].as<ListPtr>()->push_back(a[1]);
    return a[0];
  });
  def("str", 1, 1, [](Interpreter&, Args a) { return Value(to_text(a[0])); });
  def("floor", 1, 1, [](Interpreter& in, Args a) { return Value(std::floor(num(in, a, 0, "x"))); });
  def("abs", 1, 1, [](Interpreter& in, Args a) { return Value(std::abs(num(in, a, 0, "x"))); });
  def("sqrt", 1, 1, [](Interpreter& in, Args a) {
    const double x = num(in, a, 0, "x");
    if (x < 0) in.fail("type mismatch: sqrt of a negative number");
    return Value(std::sqrt(x));
  });
  def("min", 2, 2, [](Interpreter& in, Args a) { return Value(std::min(num(in, a, 0, "a"), num(in, a, 1, "b"))); });
  def("max", 2, 2, [](Interpreter& in, Args a) { return Value(std::max(num(in, a, 0, "a"), num(in, a, 1, "b"))); });
}

std::vector<std::string> builtin_names() {
  Runtime rt(0);
  std::vector<std::string> names;
  for (const auto& [name, v] : rt.interpreter().global_scope()->parent()->locals()) names.push_back(name);
  return names;
}

}  // namespace noteg
