#include <doctest.h>

#include "noteg/builtins.hpp"
#include "noteg/scene.hpp"
#include "support.hpp"

using namespace noteg;

namespace {

// Pinned by tests/oracles/scene_hash.py.
constexpr const char* kEmptySceneHash = "fbe268d80218e12ac2bfffacbfcdbe02a2a97df895442cb8bf38d8fa31f5d064";
constexpr const char* kPlayerMapHash = "f46f85736e2a2538a65f9e605ca593f743f83344ef9bfa1384cd0fd35d956e7d";

void run_ok(Runtime& rt, const std::string& src) {
  const CellResult r = rt.execute("c", src);
  REQUIRE_MESSAGE(r.ok, src << ": " << (r.error ? r.error->message() : ""));
}

}  // namespace

TEST_CASE("SplitMix64 reference outputs") {
  SplitMix64 g(1234567);
  CHECK(g.next() == 6457827717110365317ull);
  CHECK(g.next() == 3203168211198807973ull);
  CHECK(g.next() == 9817491932198370423ull);
  CHECK(g.next() == 4593380528125082431ull);
  CHECK(g.next() == 16408922859458223821ull);
  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0 && x < 1));
  }
}

TEST_CASE("fixed six-decimal formatting rounds half to even") {
  CHECK(format_fixed6(0.0078125) == "0.007812");
  CHECK(format_fixed6(0.0234375) == "0.023438");
  CHECK(format_fixed6(-0.0000001) == "0.000000");
  CHECK(format_fixed6(12) == "12.000000");
}

TEST_CASE("golden hashes") {
  Scene empty(kDefaultSceneWidth, kDefaultSceneHeight, kDefaultBackground, 42);
  CHECK(state_hash(empty) == kEmptySceneHash);

  Runtime rt(42);
  CHECK(state_hash(rt.scene()) == kEmptySceneHash);
  run_ok(rt,
         "start_game(800, 600, \"#000000\")\n"
         "create_map(\"#336633\")\n"
         "create_player(\"hero\", \"#3050ff\", 100, 100)\n"
         "add_trinket(\"#ffcc00\", 50, 60)\n");
  CHECK(state_hash(rt.scene()) == kPlayerMapHash);
}

TEST_CASE("canonical state layout") {
  Runtime rt(42);
  run_ok(rt,
         "start_game(64, 64, \"#000000\")\n"
         "create_map([[0, 1], [0, 0]], \"#112233\", \"#445566\")\n"
         "create_player(\"a\\\"b\", \"#3050ff\", 2, 40)\n");
  run_ok(rt, "p = player()\np.gold = 3");
  const std::string s = canonical_state(rt.scene());
  CHECK(s.rfind("noteg-scene 1\nscene 64 64 #000000\ntick 0\nnext_id 2\n", 0) == 0);
  CHECK(s.find("tilemap 2 2 32\nrow 0 1\nrow 0 0\n") != std::string::npos);
  CHECK(s.find("tile 1 0 sprite(\"#445566\",0,0,32,32,\"#445566\")\n") != std::string::npos);
  CHECK(s.find("  name \"a\\\"b\"\n") != std::string::npos);
  CHECK(s.find("  pos 2.000000 40.000000\n") != std::string::npos);
  CHECK(s.find("  field \"gold\" 3.000000\n") != std::string::npos);
  CHECK(s.back() == '\n');
}

TEST_CASE("quarantine log is excluded from the hash") {
  Runtime rt(42);
  run_ok(rt, "start_game(100, 100, \"#000000\")\ncreate_map(\"#000000\")");
  const std::string before = state_hash(rt.scene());
  rt.scene().quarantine_log.push_back(QuarantineRecord{7, 0, "x", {}});
  CHECK(state_hash(rt.scene()) == before);
}

TEST_CASE("refresh keeps only the player and the map, and is idempotent") {
  Runtime rt(42);
  run_ok(rt,
         "start_game(320, 240, \"#000000\")\n"
         "create_map(\"#224422\")\n"
         "create_player(\"hero\", \"#3050ff\", 10, 10)\n"
         "hero.health = 40\n"
         "for i in range(3) { spawn_enemy(\"#ff0000\", 100 + i * 40, 150) }\n"
         "add_trinket(\"#ffcc00\", 50, 60)\n"
         "add_trinket(\"#ffcc00\", 80, 60)\n"
         "spawn_projectile(hero, 1, 1)\n"
         "callback_prob(fn() { x = 1 }, 0.5)\n");
  rt.scene().quarantine_log.push_back(QuarantineRecord{99, 0, "old", {}});
  CHECK(rt.scene().entities.size() == 7);
  const auto map_before = canonical_state(rt.scene()).substr(0, canonical_state(rt.scene()).find("callbacks"));
  refresh_scene(rt.scene());
  REQUIRE(rt.scene().entities.size() == 1);
  const Entity* p = rt.scene().player();
  REQUIRE(p != nullptr);
  CHECK(p->pos == Vec2{10, 10});
  CHECK(p->health == 40);
  CHECK(rt.scene().callbacks.empty());
  CHECK(rt.scene().tilemap.has_value());
  CHECK(rt.scene().quarantine_log.size() == 1);
  const std::string once = state_hash(rt.scene());
  refresh_scene(rt.scene());
  CHECK(state_hash(rt.scene()) == once);
  const std::string after = canonical_state(rt.scene());
  CHECK(after.substr(0, after.find("callbacks")) == map_before);
}

TEST_CASE("refresh on a player-only scene only clears callbacks") {
  Runtime rt(42);
  run_ok(rt,
         "start_game(320, 240, \"#000000\")\n"
         "create_map(\"#224422\")\n"
         "create_player(\"hero\", \"#3050ff\", 10, 10)\n");
  const std::string plain = state_hash(rt.scene());
  run_ok(rt, "callback_prob(fn() { x = 1 }, 0.5)");
  CHECK(state_hash(rt.scene()) != plain);
  refresh_scene(rt.scene());
  CHECK(state_hash(rt.scene()) == plain);
}

TEST_CASE("names and keys") {
  for (auto k : {EntityKind::Player, EntityKind::Enemy, EntityKind::Trinket, EntityKind::Projectile}) {
    CHECK(parse_kind(kind_name(k)) == k);
  }
  for (auto k : {Key::Up, Key::Down, Key::Left, Key::Right, Key::Action}) {
    CHECK(parse_key(key_name(k)) == k);
  }
  CHECK_FALSE(parse_key("jump").has_value());
  CHECK(is_builtin_field("pos"));
  CHECK(is_builtin_field("on_update"));
  CHECK_FALSE(is_builtin_field("score"));
  InputState in;
  in.set(Key::Left, true);
  in.set(Key::Action, true);
  in.set(Key::Left, false);
  CHECK(in.is_down(Key::Action));
  CHECK_FALSE(in.is_down(Key::Left));
}

TEST_CASE("tilemap geometry") {
  Tilemap m;
  m.cols = 3;
  m.rows = 2;
  m.tile_size = 10;
  m.grid = {0, 1, 0, 0, 0, 0};
  m.tileset[0] = TileDef{solid_color("#000000", 10, 10), true};
  m.tileset[1] = TileDef{solid_color("#ffffff", 10, 10), false};
  CHECK(m.cell_of({15, 5}) == GridPos{1, 0});
  CHECK(m.cell_center({2, 1}) == Vec2{25, 15});
  CHECK_FALSE(m.walkable(1, 0));
  CHECK(m.walkable(5, 5));
  CHECK(m.rect_blocked({5, 0}, {6, 5}));
  CHECK_FALSE(m.rect_blocked({0, 0}, {10, 10}));
  CHECK_FALSE(m.rect_blocked({20, 0}, {10, 10}));
}
