#include "noteg/parser.hpp"

#include <cstdlib>
#include <utility>

namespace noteg {

namespace {

using namespace ast;

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::string& cell_id)
      : toks_(std::move(tokens)), cell_id_(cell_id) {}

  Program program() {
    Program prog;
    prog.cell_id = cell_id_;
    skip_separators();
    while (!check(TokenKind::Eof)) {
      prog.stmts.push_back(statement());
      skip_separators();
    }
    return prog;
  }

 private:
  class DepthGuard {
   public:
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxParseDepth) p_.fail("nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;

   private:
    Parser& p_;
  };

  // Newlines are insignificant inside () and [] but end expressions elsewhere.
  class BracketScope {
   public:
    BracketScope(Parser& p, int value) : p_(p), saved_(p.bracket_depth_) { p_.bracket_depth_ = value; }
    ~BracketScope() { p_.bracket_depth_ = saved_; }
    BracketScope(const BracketScope&) = delete;
    BracketScope& operator=(const BracketScope&) = delete;

   private:
    Parser& p_;
    int saved_;
  };

  const Token& cur() const { return toks_[pos_]; }
  const Token& next_tok() const { return toks_[pos_ + 1 < toks_.size() ? pos_ + 1 : pos_]; }
  bool check(TokenKind k) const { return cur().kind == k; }
  bool check(TokenKind k, std::string_view text) const {
    return cur().kind == k && cur().text == text;
  }
  bool check_punct(std::string_view text) const { return check(TokenKind::Punct, text); }
  bool check_op(std::string_view text) const { return check(TokenKind::Operator, text); }
  bool check_kw(std::string_view text) const { return check(TokenKind::Keyword, text); }
  // Continuation tokens must sit on the same line unless inside brackets.
  bool continues() const { return bracket_depth_ > 0 || !cur().newline_before; }

  Token take() {
    Token t = cur();
    if (t.kind != TokenKind::Eof) ++pos_;
    return t;
  }
  Span span() const { return {cur().line, cur().col}; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = cur();
    std::string text = t.kind == TokenKind::Eof ? "<eof>" : t.text;
    if (t.kind == TokenKind::String) text = "\"" + text + "\"";
    throw ParseError(cell_id_, t.line, t.col, text, msg);
  }

  void expect_punct(std::string_view text) {
    if (!check_punct(text)) fail("expected '" + std::string(text) + "'");
    take();
  }

  void skip_separators() {
    while (check_punct(";")) take();
  }

  StmtPtr make_stmt(Span s, auto&& node) {
    auto st = std::make_unique<Stmt>();
    st->span = s;
    st->node = std::forward<decltype(node)>(node);
    return st;
  }
  ExprPtr make_expr(Span s, auto&& node) {
    auto e = std::make_unique<Expr>();
    e->span = s;
    e->node = std::forward<decltype(node)>(node);
    return e;
  }

  Block block() {
    DepthGuard guard(*this);
    BracketScope brackets(*this, 0);
    Block b;
    b.span = span();
    expect_punct("{");
    skip_separators();
    while (!check_punct("}")) {
      if (check(TokenKind::Eof)) fail("expected '}'");
      b.stmts.push_back(statement());
      skip_separators();
    }
    take();
    return b;
  }

  StmtPtr statement() {
    DepthGuard guard(*this);
    const Span s = span();
    if (check_kw("return")) {
      take();
      Return r;
      if (!check_punct("}") && !check_punct(";") && !check(TokenKind::Eof) &&
          !cur().newline_before) {
        r.value = expression();
      }
      return make_stmt(s, std::move(r));
    }
    if (check_kw("if")) return if_statement();
    if (check_kw("while")) {
      take();
      While w;
      w.cond = expression();
      w.body = block();
      return make_stmt(s, std::move(w));
    }
    if (check_kw("for")) {
      take();
      if (!check(TokenKind::Ident)) fail("expected loop variable");
      ForRange f;
      f.var = take().text;
      if (!check_kw("in")) fail("expected 'in'");
      take();
      if (!check_kw("range")) fail("expected 'range'");
      take();
      {
        BracketScope brackets(*this, 1);
        expect_punct("(");
        f.count = expression();
        expect_punct(")");
      }
      f.body = block();
      return make_stmt(s, std::move(f));
    }

    ExprPtr e = expression();
    if (check_op("=")) {
      if (!is_target(*e)) fail("invalid assignment target");
      take();
      Assign a;
      a.value = expression();
      if (auto* fn = std::get_if<FunctionLit>(&a.value->node)) fn->name_hint = target_text(*e);
      a.target = std::move(e);
      return make_stmt(s, std::move(a));
    }
    return make_stmt(s, ExprStmt{std::move(e)});
  }

  StmtPtr if_statement() {
    const Span s = span();
    take();  // if
    If node;
    node.cond = expression();
    node.then_branch = block();
    if (check_kw("else")) {
      take();
      auto els = std::make_unique<Block>();
      els->span = span();
      if (check_kw("if")) {
        DepthGuard guard(*this);
        els->stmts.push_back(if_statement());
      } else {
        *els = block();
      }
      node.else_branch = std::move(els);
    }
    return make_stmt(s, std::move(node));
  }

  static bool is_target(const Expr& e) {
    return std::holds_alternative<Identifier>(e.node) ||
           std::holds_alternative<FieldAccess>(e.node) || std::holds_alternative<Index>(e.node);
  }

  static std::string target_text(const Expr& e) {
    if (auto* id = std::get_if<Identifier>(&e.node)) return id->name;
    if (auto* f = std::get_if<FieldAccess>(&e.node)) return target_text(*f->object) + "." + f->field;
    if (auto* ix = std::get_if<Index>(&e.node)) return target_text(*ix->object) + "[]";
    return "<anonymous>";
  }

  ExprPtr expression() {
    DepthGuard guard(*this);
    return or_expr();
  }

  ExprPtr binary(Span s, BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return make_expr(s, Binary{op, std::move(lhs), std::move(rhs)});
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (check_kw("or") && continues()) {
      const Span s = span();
      take();
      lhs = binary(s, BinaryOp::Or, std::move(lhs), and_expr());
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (check_kw("and") && continues()) {
      const Span s = span();
      take();
      lhs = binary(s, BinaryOp::And, std::move(lhs), not_expr());
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (check_kw("not")) {
      DepthGuard guard(*this);
      const Span s = span();
      take();
      return make_expr(s, Unary{UnaryOp::Not, not_expr()});
    }
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    for (;;) {
      if (!check(TokenKind::Operator) || !continues()) return lhs;
      const std::string& t = cur().text;
      BinaryOp op;
      if (t == "==") op = BinaryOp::Eq;
      else if (t == "!=") op = BinaryOp::Ne;
      else if (t == "<") op = BinaryOp::Lt;
      else if (t == "<=") op = BinaryOp::Le;
      else if (t == ">") op = BinaryOp::Gt;
      else if (t == ">=") op = BinaryOp::Ge;
      else return lhs;
      const Span s = span();
      take();
      lhs = binary(s, op, std::move(lhs), additive());
    }
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while ((check_op("+") || check_op("-")) && continues()) {
      const Span s = span();
      const BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      lhs = binary(s, op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while ((check_op("*") || check_op("/") || check_op("%")) && continues()) {
      const Span s = span();
      const std::string t = take().text;
      const BinaryOp op = t == "*" ? BinaryOp::Mul : t == "/" ? BinaryOp::Div : BinaryOp::Mod;
      lhs = binary(s, op, std::move(lhs), unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (check_op("-")) {
      DepthGuard guard(*this);
      const Span s = span();
      take();
      return make_expr(s, Unary{UnaryOp::Neg, unary()});
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    for (;;) {
      if (check_punct("(") && continues()) {
        const Span s = e->span;
        take();
        Call call;
        call.callee = std::move(e);
        {
          BracketScope brackets(*this, 1);
          if (!check_punct(")")) {
            for (;;) {
              call.args.push_back(expression());
              if (check_punct(",")) {
                take();
                continue;
              }
              break;
            }
          }
          expect_punct(")");
        }
        e = make_expr(s, std::move(call));
      } else if (check_punct("[") && continues()) {
        const Span s = e->span;
        take();
        Index ix;
        ix.object = std::move(e);
        {
          BracketScope brackets(*this, 1);
          ix.index = expression();
          expect_punct("]");
        }
        e = make_expr(s, std::move(ix));
      } else if (check_punct(".")) {
        const Span s = e->span;
        take();
        if (!check(TokenKind::Ident)) fail("expected field name");
        e = make_expr(s, FieldAccess{std::move(e), take().text});
      } else {
        return e;
      }
    }
  }

  ExprPtr atom() {
    DepthGuard guard(*this);
    const Span s = span();
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Number: {
        const double v = std::strtod(t.text.c_str(), nullptr);
        take();
        return make_expr(s, NumberLit{v});
      }
      case TokenKind::String:
        return make_expr(s, StringLit{take().text});
      case TokenKind::Ident:
        return make_expr(s, Identifier{take().text});
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") {
          return make_expr(s, BoolLit{take().text == "true"});
        }
        if (t.text == "nil") {
          take();
          return make_expr(s, NilLit{});
        }
        if (t.text == "fn") return function_literal();
        break;
      case TokenKind::Punct:
        if (t.text == "(") {
          BracketScope brackets(*this, 1);
          take();
          ExprPtr inner = expression();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          BracketScope brackets(*this, 1);
          take();
          ListLit list;
          if (!check_punct("]")) {
            for (;;) {
              list.items.push_back(expression());
              if (check_punct(",")) {
                take();
                if (check_punct("]")) break;  // trailing comma
                continue;
              }
              break;
            }
          }
          expect_punct("]");
          return make_expr(s, std::move(list));
        }
        break;
      default:
        break;
    }
    fail("expected expression");
  }

  ExprPtr function_literal() {
    const Span s = span();
    take();  // fn
    FunctionLit fn;
    {
      BracketScope brackets(*this, 1);
      expect_punct("(");
      if (!check_punct(")")) {
        for (;;) {
          if (!check(TokenKind::Ident)) fail("expected parameter name");
          std::string name = take().text;
          for (const auto& p : fn.params) {
            if (p == name) fail("duplicate parameter '" + name + "'");
          }
          fn.params.push_back(std::move(name));
          if (check_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
      expect_punct(")");
    }
    fn.body = std::make_shared<const Block>(block());
    fn.name_hint = "<anonymous>";
    return make_expr(s, std::move(fn));
  }

  std::vector<Token> toks_;
  const std::string& cell_id_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  int bracket_depth_ = 0;
};

}  // namespace

ast::Program parse(std::string_view source, const std::string& cell_id) {
  return Parser(tokenize(source, cell_id), cell_id).program();
}

}  // namespace noteg
