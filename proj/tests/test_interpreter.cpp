#include <doctest.h>

#include "noteg/builtins.hpp"
#include "support.hpp"

using namespace noteg;

namespace {

Value run_ok(Runtime& rt, const std::string& src, const std::string& cell = "c") {
  const CellResult r = rt.execute(cell, src);
  if (!r.ok) FAIL_CHECK(src << " failed: " << r.error->message());
  return r.value;
}

std::string run_err(Runtime& rt, const std::string& src, const std::string& cell = "c") {
  const CellResult r = rt.execute(cell, src);
  REQUIRE_MESSAGE(!r.ok, src);
  REQUIRE(r.error.has_value());
  CHECK(!r.error->trace().empty());
  return r.error->message();
}

std::string eval_repr(Runtime& rt, const std::string& src) { return repr(run_ok(rt, src)); }

const char* kArena =
    "start_game(320, 240, \"#000000\")\n"
    "create_map(\"#224422\")\n"
    "create_player(\"hero\", \"#3050ff\", 16, 16)\n";

}  // namespace

TEST_CASE("global scope persists across cells") {
  Runtime rt(42);
  run_ok(rt, "x = 2", "c1");
  CHECK(repr(run_ok(rt, "x * 21", "c2")) == "42");
}

TEST_CASE("arithmetic, strings and lists") {
  Runtime rt(42);
  CHECK(eval_repr(rt, "7 % 3") == "1");
  CHECK(eval_repr(rt, "-7 % 3") == "2");
  CHECK(eval_repr(rt, "7 % -3") == "-2");
  CHECK(eval_repr(rt, "1 / 4") == "0.25");
  CHECK(eval_repr(rt, "\"ab\" + \"cd\"") == "\"abcd\"");
  CHECK(eval_repr(rt, "[1, 2] + [3]") == "[1, 2, 3]");
  CHECK(eval_repr(rt, "l = [1, 2, 3]\nl[1] = 9\nl") == "[1, 9, 3]");
  CHECK(eval_repr(rt, "\"abc\"[2]") == "\"c\"");
  CHECK(eval_repr(rt, "\"a\" < \"b\"") == "true");
  CHECK(eval_repr(rt, "[1, [2]] == [1, [2]]") == "true");
  CHECK(eval_repr(rt, "nil == false") == "false");
}

TEST_CASE("and / or return an operand and short-circuit") {
  Runtime rt(42);
  CHECK(eval_repr(rt, "nil or 5") == "5");
  CHECK(eval_repr(rt, "0 and 5") == "0");
  CHECK(eval_repr(rt, "1 and 5") == "5");
  CHECK(eval_repr(rt, "false and undefined_name") == "false");
  CHECK(eval_repr(rt, "1 or undefined_name") == "1");
  CHECK(eval_repr(rt, "not nil") == "true");
}

TEST_CASE("control flow") {
  Runtime rt(42);
  CHECK(eval_repr(rt, "s = 0\nfor i in range(5) { s = s + i }\ns") == "10");
  CHECK(eval_repr(rt, "n = 0\nwhile n < 7 { n = n + 2 }\nn") == "8");
  CHECK(eval_repr(rt, "x = 3\nif x > 5 { y = 1 } else if x > 2 { y = 2 } else { y = 3 }\ny") == "2");
  CHECK(eval_repr(rt, "f = fn(n) { if n <= 1 { return 1 } return n * f(n - 1) }\nf(10)") == "3628800");
}

TEST_CASE("call_function and arity") {
  Runtime rt(42);
  const Value add = run_ok(rt, "fn(a, b) { return a + b }");
  CHECK(repr(rt.interpreter().call_function(add, {Value(2), Value(3)})) == "5");
  CHECK(run_err(rt, "g = fn(a) { return a }\ng()") == "arity mismatch: expected 1, got 0");
}

TEST_CASE("closure counter counts up") {
  Runtime rt(42);
  run_ok(rt, "make = fn() { n = 0\n return fn() { n = n + 1\n return n } }\nc = make()");
  for (int expected = 1; expected <= 5; ++expected) {
    CHECK(repr(run_ok(rt, "c()")) == std::to_string(expected));
  }
  run_ok(rt, "d = make()");
  CHECK(repr(run_ok(rt, "d()")) == "1");
  CHECK(repr(run_ok(rt, "c()")) == "6");
}

TEST_CASE("assignment rebinds the nearest binding, otherwise creates a local") {
  Runtime rt(42);
  run_ok(rt, "g = 1\nset_g = fn() { g = 5 }\nset_g()");
  CHECK(eval_repr(rt, "g") == "5");
  run_ok(rt, "f = fn() { fresh = 1\n return fresh }\nf()");
  CHECK(run_err(rt, "fresh") == "unknown name: fresh");
}

TEST_CASE("user bindings shadow builtins without replacing them") {
  Runtime rt(42);
  run_ok(rt, "len = 3");
  CHECK(eval_repr(rt, "len") == "3");
  run_ok(rt, "f = fn() { return 1 }");
  CHECK(eval_repr(rt, "str(12)") == "\"12\"");
}

TEST_CASE("runtime error messages") {
  Runtime rt(42);
  CHECK(run_err(rt, "nope") == "unknown name: nope");
  CHECK(run_err(rt, "1 / 0") == "division by zero");
  CHECK(run_err(rt, "1 % 0") == "division by zero");
  CHECK(run_err(rt, "1 + \"a\"").rfind("type mismatch", 0) == 0);
  CHECK(run_err(rt, "[1][3]").rfind("index out of range", 0) == 0);
  CHECK(run_err(rt, "5()").rfind("type mismatch", 0) == 0);
  CHECK(run_err(rt, "r = fn(n) { return r(n + 1) }\nr(0)").rfind("recursion depth exceeded", 0) == 0);
}

TEST_CASE("step budget stops runaway loops") {
  Runtime rt(42);
  rt.interpreter().set_step_budget(10000);
  CHECK(run_err(rt, "while true { }") == "step budget exceeded");
  CHECK(eval_repr(rt, "1 + 1") == "2");
}

TEST_CASE("traceback lists frames innermost first") {
  Runtime rt(42);
  run_ok(rt, "inner = fn() {\n  return missing\n}", "lib");
  run_ok(rt, "outer = fn() { return inner() }", "mid");
  const CellResult r = rt.execute("top", "x = 1\nouter()");
  REQUIRE(!r.ok);
  const auto& t = r.error->trace();
  REQUIRE(t.size() == 3);
  CHECK(t[0] == TraceFrame{"inner", "lib", 2, 10});
  CHECK(t[1].fn == "outer");
  CHECK(t[1].cell_id == "mid");
  CHECK(t[1].line == 1);
  CHECK(t[2] == TraceFrame{"<cell>", "top", 2, 1});
}

TEST_CASE("parse errors come back as failed results") {
  Runtime rt(42);
  const CellResult r = rt.execute("c9", "if { }");
  REQUIRE(!r.ok);
  REQUIRE(r.error->trace().size() == 1);
  CHECK(r.error->trace()[0] == TraceFrame{"<parse>", "c9", 1, 4});
  CHECK(r.error->message().find("expected expression") != std::string::npos);
}

TEST_CASE("earlier statements keep their effects when a later one fails") {
  const std::string stmts[] = {
      "start_game(320, 240, \"#101010\")", "create_map(\"#224422\")",
      "create_player(\"hero\", \"#3050ff\", 40, 40)", "t = add_trinket(\"#ffcc00\", 100, 100)",
      "hero.health = 50", "t.value = 3"};
  const int n = static_cast<int>(std::size(stmts));
  for (int j = 0; j < n; ++j) {
    std::string prefix, with_fault;
    for (int k = 0; k < j; ++k) prefix += stmts[k] + "\n";
    // Statement j fails on a dangling reference, then more work follows.
    with_fault = prefix + "ghost.health = 1\n";
    for (int k = j; k < n; ++k) with_fault += stmts[k] + "\n";

    Runtime a(42), b(42);
    const CellResult ra = a.execute("c", with_fault);
    CHECK(!ra.ok);
    if (!prefix.empty()) CHECK(b.execute("c", prefix).ok);
    CHECK(state_hash(a.scene()) == state_hash(b.scene()));
  }
}

TEST_CASE("entity fields type-check and custom fields are created on assignment") {
  Runtime rt(42);
  run_ok(rt, kArena);
  CHECK(eval_repr(rt, "hero.health") == "100");
  CHECK(eval_repr(rt, "hero.kind") == "\"player\"");
  CHECK(eval_repr(rt, "hero.pos") == "[16, 16]");
  CHECK(run_err(rt, "hero.health = \"lots\"").rfind("type mismatch", 0) == 0);
  CHECK(run_err(rt, "hero.pos.z = 1") == "unknown field: pos.z");
  CHECK(run_err(rt, "hero.id = 9") == "read-only field: id");
  CHECK(run_err(rt, "hero.shield") == "unknown field: shield");
  run_ok(rt, "hero.score = 0\nhero.score = hero.score + 2");
  CHECK(eval_repr(rt, "hero.score") == "2");
  run_ok(rt, "hero.health = -20");
  CHECK(eval_repr(rt, "hero.health") == "0");
  run_ok(rt, "hero.size.w = 20\nhero.pos = [30, 40]");
  CHECK(eval_repr(rt, "[hero.size.w, hero.pos.y]") == "[20, 40]");
  CHECK(run_err(rt, "hero.on_update = fn(self) { }").rfind("arity mismatch", 0) == 0);
  CHECK(run_err(rt, "hero.on_update = 3").rfind("type mismatch", 0) == 0);
}

TEST_CASE("dangling entity references are runtime errors") {
  Runtime rt(42);
  run_ok(rt, kArena);
  run_ok(rt, "t = add_trinket(\"#ffffff\", 100, 100)\ndespawn(t)");
  CHECK(run_err(rt, "t.pos") == "dangling entity-ref: #2");
  CHECK(run_err(rt, "t.pos.x = 3") == "dangling entity-ref: #2");
}

TEST_CASE("on_update hot-swap moves the entity from the next tick") {
  Runtime rt(42);
  run_ok(rt, kArena);
  run_ok(rt, "e = add_trinket(\"#ff00ff\", 100, 100)\n"
             "e.on_update = fn(self, dt) { self.pos.x = self.pos.x + 1 }");
  // Assigned between ticks: not called until the next tick runs.
  CHECK(eval_repr(rt, "e.pos.x") == "100");
  for (int i = 0; i < 60; ++i) rt.tick();
  CHECK(eval_repr(rt, "e.pos.x") == "160");
}

TEST_CASE("bullet speed changes take effect live") {
  Runtime rt(42);
  run_ok(rt, kArena);
  run_ok(rt, "bullet = spawn_projectile(hero, 1, 0)");
  CHECK(eval_repr(rt, "bullet.speed") == "240");
  rt.tick();
  const double x1 = run_ok(rt, "bullet.pos.x").as<double>();
  run_ok(rt, "bullet.speed = 400");
  rt.tick();
  const double x2 = run_ok(rt, "bullet.pos.x").as<double>();
  CHECK(x2 - x1 == doctest::Approx(400.0 / 60.0));
  CHECK(eval_repr(rt, "bullet.vel") == "[400, 0]");
}

TEST_CASE("functions keep their defining cell for tracebacks") {
  Runtime rt(42);
  run_ok(rt, kArena);
  run_ok(rt, "t = add_trinket(\"#ffffff\", 100, 100)", "c2");
  run_ok(rt, "t.on_update = fn(self, dt) {\n  self.nope = self.missing\n}", "c3");
  rt.tick();
  REQUIRE(rt.scene().quarantine_log.size() == 1);
  const auto& rec = rt.scene().quarantine_log[0];
  CHECK(rec.entity_id == 2);
  CHECK(rec.error == "unknown field: missing");
  REQUIRE(rec.trace.size() == 1);
  CHECK(rec.trace[0] == TraceFrame{"t.on_update", "c3", 2, 15});
}

TEST_CASE("precedence matches the parenthesized oracle") {
  Runtime rt(42);
  testing::ExprGen gen(2024);
  auto outcome = [&](const std::string& src) {
    const CellResult r = rt.execute("p", src);
    return r.ok ? repr(r.value) : "error: " + r.error->message();
  };
  for (int i = 0; i < 300; ++i) {
    const auto e = gen.make(12);
    CHECK_MESSAGE(outcome(e.flat) == outcome(e.full), e.flat << "  vs  " << e.full);
    CHECK_MESSAGE(testing::matches(rt.execute("p", e.flat), e.value), e.flat << " -> " << outcome(e.flat));
  }
}
