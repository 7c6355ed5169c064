#include <doctest.h>

#include <random>

#include "noteg/lexer.hpp"
#include "noteg/parser.hpp"

using namespace noteg;

namespace {

std::string dump_expr(const std::string& src) {
  const auto prog = parse(src, "t");
  REQUIRE(prog.stmts.size() == 1);
  return ast::dump(*prog.stmts[0]);
}

ParseError parse_error(const std::string& src) {
  try {
    parse(src, "t");
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for: " << src);
  throw;
}

}  // namespace

TEST_CASE("tokenize positions and kinds") {
  const auto toks = tokenize("x = 12.5 # note\n  \"a\\tb\"", "c1");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].text == "x");
  CHECK(toks[2].text == "12.5");
  CHECK(toks[3].kind == TokenKind::String);
  CHECK(toks[3].text == "a\tb");
  CHECK(toks[3].line == 2);
  CHECK(toks[3].col == 3);
  CHECK(toks[3].newline_before);
  CHECK(toks[4].kind == TokenKind::Eof);
}

TEST_CASE("lexer rejects bad input with a position") {
  auto e = parse_error("x = \"open");
  CHECK(e.line() == 1);
  CHECK(e.col() == 5);
  e = parse_error("a ! b");
  CHECK(e.col() == 3);
  e = parse_error("s = \"\\q\"");
  CHECK(e.line() == 1);
}

TEST_CASE("precedence and associativity") {
  CHECK(dump_expr("1 + 2 * 3") == "BinOp(+, 1, BinOp(*, 2, 3))");
  CHECK(dump_expr("1 - 2 - 3") == "BinOp(-, BinOp(-, 1, 2), 3)");
  CHECK(dump_expr("-2 * 3") == "BinOp(*, Unary(-, 2), 3)");
  CHECK(dump_expr("not a == b") == "Unary(not, BinOp(==, a, b))");
  CHECK(dump_expr("a or b and c") == "BinOp(or, a, BinOp(and, b, c))");
  CHECK(dump_expr("a.b[1](2)") == "Call(Index(Field(a, b), 1), 2)");
}

TEST_CASE("function literal") {
  CHECK(dump_expr("fn(a) { return a }") == "Fn(a) [Return(a)]");
  CHECK(dump_expr("fn() { }") == "Fn() []");
}

TEST_CASE("missing condition reports the brace") {
  const auto e = parse_error("if { }");
  CHECK(e.line() == 1);
  CHECK(e.col() == 4);
  CHECK(e.detail() == "expected expression");
  CHECK(e.token() == "{");
}

TEST_CASE("statements split on newlines or semicolons") {
  CHECK(parse("x = 1\n-2", "t").stmts.size() == 2);
  CHECK(parse("x = 1; y = 2", "t").stmts.size() == 2);
  CHECK(parse("x = 1 y = 2", "t").stmts.size() == 2);
  CHECK(parse("f = (1\n+ 2)", "t").stmts.size() == 1);
  CHECK(parse("l = [1,\n 2,\n 3]", "t").stmts.size() == 1);
  CHECK(parse("a\n  .b", "t").stmts.size() == 1);
}

TEST_CASE("control flow shapes") {
  const auto prog = parse(
      "if a { x = 1 } else if b { x = 2 } else { x = 3 }\n"
      "while x < 10 { x = x + 1 }\n"
      "for i in range(3) { print(i) }",
      "t");
  REQUIRE(prog.stmts.size() == 3);
  CHECK(std::holds_alternative<ast::If>(prog.stmts[0]->node));
  CHECK(std::holds_alternative<ast::While>(prog.stmts[1]->node));
  CHECK(std::holds_alternative<ast::ForRange>(prog.stmts[2]->node));
  CHECK(prog.stmts[2]->span.line == 3);
}

TEST_CASE("invalid assignment targets") {
  CHECK_THROWS_AS(parse("1 = 2", "t"), ParseError);
  CHECK_THROWS_AS(parse("f() = 2", "t"), ParseError);
  CHECK_NOTHROW(parse("a.b[0].c = 2", "t"));
}

TEST_CASE("deep nesting is a parse error, not a crash") {
  const std::string deep = std::string(5000, '(') + "1" + std::string(5000, ')');
  CHECK_THROWS_AS(parse(deep, "t"), ParseError);
  const std::string ok = std::string(50, '(') + "1" + std::string(50, ')');
  CHECK_NOTHROW(parse(ok, "t"));
}

TEST_CASE("random token soup never escapes as anything but ParseError") {
  static const char* pieces[] = {"fn", "(", ")", "{", "}", "[", "]", "if", "else", "while", "for",
                                 "in", "range", "return", "=", "==", "+", "-", "*", "/", "%", ".",
                                 ",", ";", "\n", "x", "1", "2.5", "\"s\"", "and", "or", "not",
                                 "nil", "true", "<", ">=", "!=", "#c\n", " "};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string src;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) src += std::string(pieces[pick(rng)]) + " ";
    try {
      parse(src, "fuzz");
    } catch (const ParseError&) {
    }
  }
}

TEST_CASE("random bytes never escape as anything but ParseError") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    std::string bytes(rng() % 64, '\0');
    for (auto& b : bytes) b = static_cast<char>(rng() & 0xff);
    try {
      parse(bytes, "bytes");
    } catch (const ParseError&) {
    }
  }
}
