#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace noteg::ast {

struct Span {
  int line = 1;
  int col = 1;
};

struct Expr;
struct Stmt;
struct Block;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

struct NumberLit {
  double value = 0;
};
struct StringLit {
  std::string value;
};
struct BoolLit {
  bool value = false;
};
struct NilLit {};
struct ListLit {
  std::vector<ExprPtr> items;
};
struct Identifier {
  std::string name;
};
struct FieldAccess {
  ExprPtr object;
  std::string field;
};
struct Index {
  ExprPtr object;
  ExprPtr index;
};
struct Call {
  ExprPtr callee;
  std::vector<ExprPtr> args;
};

enum class UnaryOp { Neg, Not };
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct FunctionLit {
  std::vector<std::string> params;
  // Shared so that function values outlive the cell program that defined them.
  std::shared_ptr<const Block> body;
  // Name of the assignment target, used in tracebacks.
  std::string name_hint;
};

struct Expr {
  Span span;
  std::variant<NumberLit, StringLit, BoolLit, NilLit, ListLit, Identifier, FieldAccess, Index,
               Call, Unary, Binary, FunctionLit>
      node;
};

struct Block {
  Span span;
  std::vector<StmtPtr> stmts;
};

struct Assign {
  ExprPtr target;
  ExprPtr value;
};
struct Return {
  ExprPtr value;  // may be null
};
struct If {
  ExprPtr cond;
  Block then_branch;
  // `else if` is stored as an else block holding a single If.
  std::unique_ptr<Block> else_branch;
};
struct While {
  ExprPtr cond;
  Block body;
};
struct ForRange {
  std::string var;
  ExprPtr count;
  Block body;
};
struct ExprStmt {
  ExprPtr expr;
};

struct Stmt {
  Span span;
  std::variant<Assign, Return, If, While, ForRange, ExprStmt> node;
};

struct Program {
  std::string cell_id;
  std::vector<StmtPtr> stmts;
};

std::string_view op_symbol(BinaryOp op);
std::string_view op_symbol(UnaryOp op);

/// Compact s-expression dump used by tests and `check --dump`, e.g.
/// "BinOp(+, 1, BinOp(*, 2, 3))".
std::string dump(const Expr& e);
std::string dump(const Stmt& s);
std::string dump(const Program& p);

}  // namespace noteg::ast
