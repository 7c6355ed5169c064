#include <doctest.h>

#include <filesystem>

#include "noteg/session.hpp"
#include "support.hpp"

using namespace noteg;

namespace {

constexpr const char* kEmptySceneHash = "fbe268d80218e12ac2bfffacbfcdbe02a2a97df895442cb8bf38d8fa31f5d064";

json exec(const std::string& id, const std::string& src) {
  return {{"type", "execute"}, {"cell_id", id}, {"source", src}};
}

json find_type(const std::vector<json>& msgs, const std::string& type) {
  for (const auto& m : msgs) {
    if (m["type"] == type) return m;
  }
  return nullptr;
}

const char* kArena =
    "start_game(320, 240, \"#000000\")\n"
    "create_map(\"#224422\")\n"
    "create_player(\"hero\", \"#3050ff\", 200, 100)\n";

ReplaySchedule fixture_schedule(const std::string& name) {
  return parse_schedule(testing::read_text(testing::fixture_path(name)));
}

Notebook fixture_notebook(const std::string& name) { return read_notebook_file(testing::fixture_path(name)); }

}  // namespace

TEST_CASE("execute replies with a result") {
  Session s(testing::notebook({{"c1", "1 + 1"}}));
  auto out = s.handle_message(json{{"type", "execute"}, {"cell_id", "c1"}});
  REQUIRE(out.size() == 1);
  CHECK(out[0] == json{{"type", "result"}, {"cell_id", "c1"}, {"ok", true}, {"value_repr", "2"}});

  out = s.handle_message(exec("c1", "x = 1\nx.y"));
  const json r = find_type(out, "result");
  CHECK(r["ok"] == false);
  CHECK(!r["error"]["trace"].empty());
  CHECK(s.notebook().find("c1")->source == "x = 1\nx.y");
}

TEST_CASE("unknown and doc cells") {
  Notebook nb = testing::notebook({{"c1", "1"}});
  nb.cells.push_back({"d1", CellKind::Doc, false, "1 / 0"});
  Session s(nb);
  auto out = s.handle_message(json{{"type", "execute"}, {"cell_id", "zz"}});
  REQUIRE(out.size() == 1);
  CHECK(out[0]["type"] == "error");
  CHECK(out[0]["message"].get<std::string>().rfind("UnknownCell", 0) == 0);

  out = s.handle_message(json{{"type", "execute"}, {"cell_id", "d1"}});
  CHECK(out[0]["type"] == "error");

  out = s.handle_message(exec("new", "3 * 3"));
  CHECK(find_type(out, "result")["value_repr"] == "9");
  REQUIRE(s.notebook().find("new") != nullptr);
  CHECK(s.notebook().cells.back().id == "new");
}

TEST_CASE("held key moves the player 120 px per second") {
  Session s(testing::notebook({{"c1", kArena}}));
  s.handle_message(json{{"type", "execute"}, {"cell_id", "c1"}});
  s.handle_message(json{{"type", "input"}, {"key", "left"}, {"state", "down"}});
  for (int i = 0; i < 60; ++i) s.tick_once();
  CHECK(s.runtime().scene().player()->pos.x == doctest::Approx(80));
  s.handle_message(json{{"type", "input"}, {"key", "left"}, {"state", "up"}});
  for (int i = 0; i < 10; ++i) s.tick_once();
  CHECK(s.runtime().scene().player()->pos.x == doctest::Approx(80));
}

TEST_CASE("clock controls") {
  Session s(testing::notebook({}));
  CHECK(s.running());
  s.advance();
  CHECK(s.runtime().scene().tick_count == 1);
  s.handle_message(json{{"type", "control"}, {"action", "pause"}});
  s.advance();
  CHECK(s.runtime().scene().tick_count == 1);
  s.handle_message(json{{"type", "control"}, {"action", "step"}});
  CHECK(s.runtime().scene().tick_count == 2);
  s.handle_message(json{{"type", "control"}, {"action", "start"}});
  s.advance();
  CHECK(s.runtime().scene().tick_count == 3);

  auto out = s.handle_message(json{{"type", "control"}, {"action", "refresh"}});
  REQUIRE(out.size() == 1);
  CHECK(out[0]["type"] == "error");
  s.handle_message(exec("c", std::string(kArena) + "add_trinket(\"#ffcc00\", 10, 10)"));
  s.handle_message(json{{"type", "control"}, {"action", "refresh"}});
  CHECK(s.runtime().scene().entities.size() == 1);

  s.handle_message(json{{"type", "control"}, {"action", "set_seed"}, {"seed", 5}});
  CHECK(s.runtime().scene().rng.state() == 5);
}

TEST_CASE("map, print and quarantine messages come before the result") {
  Session s(testing::notebook({}));
  auto out = s.handle_message(exec("c", std::string(kArena) + "print(\"hello\")"));
  REQUIRE(out.size() == 3);
  CHECK(out[0]["type"] == "print");
  CHECK(out[1]["type"] == "map");
  CHECK(out[2]["type"] == "result");
  CHECK(find_type(s.handle_message(exec("d", "1")), "map").is_null());

  s.handle_message(exec("e", "t = add_trinket(\"#ffcc00\", 10, 10)\nt.on_update = fn(self, dt) { self.x = 1 + nil }"));
  out = s.tick_once();
  const json q = find_type(out, "quarantine");
  REQUIRE(!q.is_null());
  CHECK(q["entity_id"] == 2);
  CHECK(q["trace"][0]["cell_id"] == "e");
}

TEST_CASE("live sessions emit snapshots matching the scene list") {
  SessionOptions opts;
  opts.headless = false;
  Session s(testing::notebook({{"c1", std::string(kArena) + "spawn_enemy(\"#ff0000\", 20, 20)"}}), opts);
  s.handle_message(json{{"type", "execute"}, {"cell_id", "c1"}});
  int snapshots = 0;
  for (int t = 0; t < 120; ++t) {
    for (const auto& m : s.tick_once()) {
      if (m["type"] != "snapshot") continue;
      ++snapshots;
      const Scene& scene = s.runtime().scene();
      CHECK(m["tick"] == scene.tick_count);
      REQUIRE(m["entities"].size() == scene.entities.size());
      std::size_t i = 0;
      for (const auto& [id, e] : scene.entities) {
        const json& je = m["entities"][i++];
        CHECK(je["id"] == id);
        CHECK(je["x"].get<double>() == std::stod(format_fixed6(e.pos.x)));
        CHECK(je["y"].get<double>() == std::stod(format_fixed6(e.pos.y)));
      }
    }
  }
  CHECK(snapshots == 60);

  Session headless(testing::notebook({}));
  CHECK(find_type(headless.tick_once(), "snapshot").is_null());
}

TEST_CASE("driver and observers") {
  Session s(testing::notebook({{"c1", "41 + 1"}}));
  const ClientId a = s.connect();
  const ClientId b = s.connect();
  CHECK(s.is_driver(a));
  CHECK_FALSE(s.is_driver(b));

  auto out = s.handle_frame(b, R"({"type": "execute", "cell_id": "c1"})");
  REQUIRE(out.size() == 1);
  CHECK(out[0].to == b);
  CHECK(out[0].message["type"] == "error");

  out = s.handle_frame(a, R"({"type": "execute", "cell_id": "c1"})");
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].to.has_value());
  CHECK(out[0].message["value_repr"] == "42");

  s.disconnect(a);
  CHECK(s.is_driver(b));
}

TEST_CASE("malformed frames never end the session") {
  Session s(testing::notebook({{"c1", "1"}}));
  const ClientId a = s.connect();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    std::string f;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) f += static_cast<char>(rng() % 256);
    if (i % 3 == 0) f = "{\"type\": \"execute\", \"cell_id\": " + f + "}";
    auto out = s.handle_frame(a, f);
    CHECK(!out.empty());
  }
  auto out = s.handle_frame(a, R"({"type": "execute", "cell_id": "c1", "source": "2 + 2"})");
  CHECK(out.back().message["value_repr"] == "4");
}

TEST_CASE("hide marks the cell in the saved notebook") {
  Session s(testing::notebook({{"c1", "x = 1"}, {"c3", "hide()"}}));
  s.handle_message(json{{"type", "execute"}, {"cell_id", "c3"}});
  const Notebook nb = s.notebook();
  CHECK(nb.find("c3")->hidden);
  CHECK_FALSE(nb.find("c1")->hidden);
  CHECK(load_notebook(save_notebook(nb)).find("c3")->hidden);
}

TEST_CASE("schedules") {
  const auto sched = parse_schedule(R"({"actions": [
    {"tick": 0, "type": "execute", "cell_id": "c1"},
    {"tick": 3, "type": "input", "key": "up", "state": "down"},
    {"tick": 3, "type": "control", "action": "refresh"}]})");
  REQUIRE(sched.actions.size() == 3);
  CHECK(sched.actions[1].tick == 3);
  CHECK(schedule_from_json(schedule_to_json(sched)).actions.size() == 3);
  CHECK(schedule_to_json(schedule_from_json(schedule_to_json(sched))) == schedule_to_json(sched));

  for (const char* bad : {"nope", "{}", R"({"actions": [{"type": "execute", "cell_id": "a"}]})",
                          R"({"actions": [{"tick": -1, "type": "execute", "cell_id": "a"}]})",
                          R"({"actions": [{"tick": 2, "type": "execute", "cell_id": "a"}, {"tick": 1, "type": "execute", "cell_id": "a"}]})",
                          R"({"actions": [{"tick": 0, "type": "fly"}]})"}) {
    CAPTURE(bad);
    try {
      parse_schedule(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Schedule);
    }
  }

  const Notebook nb = testing::notebook({{"c1", "1"}});
  ReplaySchedule unknown;
  unknown.actions.push_back({0, ExecuteMsg{"zz", std::nullopt}});
  CHECK_THROWS_AS(run_replay(nb, unknown, 1), Error);
  CHECK_THROWS_AS(run_replay(nb, {}, -1), Error);

  Notebook mixed = testing::notebook({{"a", "1"}, {"b", "2"}});
  mixed.cells.insert(mixed.cells.begin() + 1, Cell{"doc", CellKind::Doc, false, "text"});
  const auto all = run_all_cells(mixed);
  REQUIRE(all.actions.size() == 2);
  CHECK(std::get<ExecuteMsg>(all.actions[1].action).cell_id == "b");
}

TEST_CASE("replay") {
  CHECK(run_replay(testing::notebook({}), {}, 0) == kEmptySceneHash);

  const Notebook nb = fixture_notebook("determinism.noteg.json");
  const ReplaySchedule sched = fixture_schedule("determinism.schedule.json");
  const auto a = run_replay_detailed(nb, sched, 240);
  const auto b = run_replay_detailed(nb, sched, 240);
  CHECK(a.hash == b.hash);
  CHECK(a.messages == b.messages);

  ReplaySchedule shifted = sched;
  for (auto& act : shifted.actions) {
    if (std::holds_alternative<InputMsg>(act.action) && act.tick == 20) act.tick = 21;
  }
  CHECK(run_replay(nb, shifted, 240) != a.hash);

  int ticks_seen = 0;
  ReplayOptions opts;
  opts.on_tick = [&](const Scene& scene) { CHECK(scene.tick_count == ++ticks_seen); };
  run_replay(nb, sched, 50, opts);
  CHECK(ticks_seen == 50);
}

TEST_CASE("actions at the final tick apply before the hash") {
  const Notebook nb = testing::notebook({{"c1", "start_game(100, 100, \"#000000\")"}});
  ReplaySchedule sched;
  sched.actions.push_back({5, ExecuteMsg{"c1", std::nullopt}});
  const auto out = run_replay_detailed(nb, sched, 5);
  CHECK(out.messages.size() == 1);
  CHECK(out.hash != run_replay(nb, {}, 5));
}

TEST_CASE("example notebooks run cleanly") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(NOTEG_NOTEBOOKS)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    CAPTURE(entry.path().filename().string());
    const Notebook nb = read_notebook_file(entry.path());
    const auto outcome = run_replay_detailed(nb, run_all_cells(nb), 600);
    CHECK(outcome.quarantined == 0);
    for (const auto& m : outcome.messages) {
      if (m.value("type", "") == "result") CHECK_MESSAGE(m.value("ok", false), m.dump());
    }
  }
  CHECK(seen >= 4);
}
