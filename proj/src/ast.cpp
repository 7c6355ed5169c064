#include "noteg/ast.hpp"

#include "noteg/value.hpp"

namespace noteg::ast {

namespace {

std::string dump_block(const Block& b) {
  std::string out = "[";
  for (std::size_t i = 0; i < b.stmts.size(); ++i) {
    if (i) out += "; ";
    out += dump(*b.stmts[i]);
  }
  return out + "]";
}

}  // namespace

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

std::string_view op_symbol(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "not"; }

std::string dump(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          return format_number(n.value);
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return quote_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, NilLit>) {
          return "nil";
        } else if constexpr (std::is_same_v<T, ListLit>) {
          std::string out = "List(";
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            out += dump(*n.items[i]);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, Identifier>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          return "Field(" + dump(*n.object) + ", " + n.field + ")";
        } else if constexpr (std::is_same_v<T, Index>) {
          return "Index(" + dump(*n.object) + ", " + dump(*n.index) + ")";
        } else if constexpr (std::is_same_v<T, Call>) {
          std::string out = "Call(" + dump(*n.callee);
          for (const auto& a : n.args) out += ", " + dump(*a);
          return out + ")";
        } else if constexpr (std::is_same_v<T, Unary>) {
          return "Unary(" + std::string(op_symbol(n.op)) + ", " + dump(*n.operand) + ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          return "BinOp(" + std::string(op_symbol(n.op)) + ", " + dump(*n.lhs) + ", " +
                 dump(*n.rhs) + ")";
        } else {
          std::string out = "Fn(";
          for (std::size_t i = 0; i < n.params.size(); ++i) {
            if (i) out += ", ";
            out += n.params[i];
          }
          return out + ") " + dump_block(*n.body);
        }
      },
      e.node);
}

std::string dump(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          return "Assign(" + dump(*n.target) + ", " + dump(*n.value) + ")";
        } else if constexpr (std::is_same_v<T, Return>) {
          return n.value ? "Return(" + dump(*n.value) + ")" : "Return()";
        } else if constexpr (std::is_same_v<T, If>) {
          std::string out = "If(" + dump(*n.cond) + ", " + dump_block(n.then_branch);
          if (n.else_branch) out += ", " + dump_block(*n.else_branch);
          return out + ")";
        } else if constexpr (std::is_same_v<T, While>) {
          return "While(" + dump(*n.cond) + ", " + dump_block(n.body) + ")";
        } else if constexpr (std::is_same_v<T, ForRange>) {
          return "For(" + n.var + ", " + dump(*n.count) + ", " + dump_block(n.body) + ")";
        } else {
          return dump(*n.expr);
        }
      },
      s.node);
}

std::string dump(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    if (i) out += "\n";
    out += dump(*p.stmts[i]);
  }
  return out;
}

}  // namespace noteg::ast
