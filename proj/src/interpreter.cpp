#include "noteg/interpreter.hpp"

#include <cmath>
#include <utility>

namespace noteg {

using namespace ast;

struct Interpreter::Place {
  enum class Kind { Var, EntityField, EntityAxis, ListElem, Computed };
  Kind kind = Kind::Computed;
  ScopePtr scope;
  std::string name;  // variable or entity field
  EntityId id = 0;
  std::string axis;
  ListPtr list;
  double index = 0;
  Value value;
};

class Interpreter::FrameGuard {
 public:
  FrameGuard(Interpreter& in, Frame frame) : in_(in) { in_.frames_.push_back(std::move(frame)); }
  ~FrameGuard() { in_.frames_.pop_back(); }
  FrameGuard(const FrameGuard&) = delete;
  FrameGuard& operator=(const FrameGuard&) = delete;

 private:
  Interpreter& in_;
};

namespace {

bool is_vector_field(std::string_view f) { return f == "pos" || f == "vel" || f == "size"; }

// size uses w/h, the others x/y
int axis_index(std::string_view field, std::string_view axis) {
  if (field == "size") return axis == "w" ? 0 : axis == "h" ? 1 : -1;
  return axis == "x" ? 0 : axis == "y" ? 1 : -1;
}

Vec2& vector_field(Entity& e, std::string_view f) {
  return f == "pos" ? e.pos : f == "vel" ? e.vel : e.size;
}
const Vec2& vector_field(const Entity& e, std::string_view f) {
  return f == "pos" ? e.pos : f == "vel" ? e.vel : e.size;
}

std::string arity_text(int min, int max) {
  if (max < 0) return "at least " + std::to_string(min);
  if (min == max) return std::to_string(min);
  return std::to_string(min) + " to " + std::to_string(max);
}

}  // namespace

Interpreter::Interpreter(Scene& scene)
    : scene_(&scene),
      builtins_(std::make_shared<Scope>(nullptr, /*sealed=*/true)),
      globals_(std::make_shared<Scope>(builtins_)) {}

void Interpreter::define_builtin(std::string name, int min_arity, int max_arity,
                                 Builtin::Impl impl) {
  auto b = std::make_shared<const Builtin>(Builtin{name, min_arity, max_arity, std::move(impl)});
  builtins_->define(name, Value(BuiltinPtr(b)));
}

std::vector<TraceFrame> Interpreter::trace_at(Span at) const {
  std::vector<TraceFrame> trace;
  Span pos = at;
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    trace.push_back({it->fn, it->cell_id, pos.line, pos.col});
    pos = it->call_site;
  }
  if (trace.empty()) trace.push_back({"<engine>", "<engine>", at.line, at.col});
  return trace;
}

void Interpreter::fail_at(Span at, const std::string& message) const {
  throw RuntimeError(message, trace_at(at));
}

void Interpreter::fail(const std::string& message) const { fail_at(builtin_site_, message); }

void Interpreter::step(Span at) {
  if (++steps_ > step_budget_) fail_at(at, "step budget exceeded");
}

void Interpreter::begin_entry() { steps_ = 0; }

CellResult Interpreter::eval_cell(const Program& program) {
  CellResult result;
  current_cell_ = program.cell_id;
  begin_entry();
  try {
    FrameGuard frame(*this, Frame{"<cell>", program.cell_id, {}});
    for (const auto& stmt : program.stmts) {
      step(stmt->span);
      if (const auto* es = std::get_if<ExprStmt>(&stmt->node)) {
        result.value = eval(*es->expr, globals_);
        continue;
      }
      result.value = Value();
      Value ret;
      if (exec(*stmt, globals_, ret) == Flow::Return) {
        result.value = ret;
        break;
      }
    }
  } catch (const RuntimeError& e) {
    result.ok = false;
    result.value = Value();
    result.error = e;
  }
  current_cell_.clear();
  return result;
}

Value Interpreter::call_function(const Value& fn, std::vector<Value> args) {
  if (frames_.empty()) {
    begin_entry();
    if (fn.is<BuiltinPtr>()) {
      FrameGuard frame(*this, Frame{fn.as<BuiltinPtr>()->name, "<builtin>", {}});
      return call_at({0, 0}, fn, std::move(args));
    }
  }
  return call_at({0, 0}, fn, std::move(args));
}

Value Interpreter::call_at(Span site, const Value& fn, std::vector<Value> args) {
  if (fn.is<FunctionPtr>()) {
    const Function& f = *fn.as<FunctionPtr>();
    if (args.size() != f.params.size()) {
      fail_at(site, "arity mismatch: expected " + std::to_string(f.params.size()) + ", got " +
                        std::to_string(args.size()));
    }
    if (static_cast<int>(frames_.size()) >= kMaxCallDepth) {
      fail_at(site, "recursion depth exceeded (" + std::to_string(kMaxCallDepth) + ")");
    }
    auto scope = std::make_shared<Scope>(f.closure);
    for (std::size_t i = 0; i < args.size(); ++i) scope->define(f.params[i], std::move(args[i]));
    FrameGuard frame(*this, Frame{f.name, f.cell_id, site});
    Value ret;
    exec_block(*f.body, scope, ret);
    return ret;
  }
  if (fn.is<BuiltinPtr>()) {
    const Builtin& b = *fn.as<BuiltinPtr>();
    const int n = static_cast<int>(args.size());
    if (n < b.min_arity || (b.max_arity >= 0 && n > b.max_arity)) {
      fail_at(site, "arity mismatch: " + b.name + " expected " +
                        arity_text(b.min_arity, b.max_arity) + ", got " + std::to_string(n));
    }
    const Span saved = builtin_site_;
    builtin_site_ = site;
    try {
      Value out = b.impl(*this, args);
      builtin_site_ = saved;
      return out;
    } catch (const RuntimeError&) {
      builtin_site_ = saved;
      throw;
    } catch (const Error& e) {
      builtin_site_ = saved;
      fail_at(site, e.what());
    }
  }
  fail_at(site, "type mismatch: " + type_name(fn) + " is not callable");
}

Interpreter::Flow Interpreter::exec_block(const Block& block, const ScopePtr& scope, Value& ret) {
  for (const auto& stmt : block.stmts) {
    step(stmt->span);
    if (exec(*stmt, scope, ret) == Flow::Return) return Flow::Return;
  }
  return Flow::Normal;
}

Interpreter::Flow Interpreter::exec(const Stmt& stmt, const ScopePtr& scope, Value& ret) {
  return std::visit(
      [&](const auto& n) -> Flow {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprStmt>) {
          eval(*n.expr, scope);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, Assign>) {
          Value v = eval(*n.value, scope);
          const Place place = resolve(*n.target, scope);
          write(place, std::move(v), n.target->span);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, Return>) {
          ret = n.value ? eval(*n.value, scope) : Value();
          return Flow::Return;
        } else if constexpr (std::is_same_v<T, If>) {
          if (truthy(eval(*n.cond, scope))) return exec_block(n.then_branch, scope, ret);
          if (n.else_branch) return exec_block(*n.else_branch, scope, ret);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, While>) {
          while (truthy(eval(*n.cond, scope))) {
            step(stmt.span);
            if (exec_block(n.body, scope, ret) == Flow::Return) return Flow::Return;
          }
          return Flow::Normal;
        } else {
          const double count = require_number(eval(*n.count, scope), "range count", n.count->span);
          if (!std::isfinite(count)) fail_at(n.count->span, "type mismatch: range count must be finite");
          for (double i = 0; i < std::floor(count); i += 1) {
            step(stmt.span);
            scope->assign(n.var, Value(i));
            if (exec_block(n.body, scope, ret) == Flow::Return) return Flow::Return;
          }
          return Flow::Normal;
        }
      },
      stmt.node);
}

Value Interpreter::eval(const Expr& expr, const ScopePtr& scope) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, NilLit>) {
          return Value();
        } else if constexpr (std::is_same_v<T, ListLit>) {
          ValueList items;
          items.reserve(n.items.size());
          for (const auto& item : n.items) items.push_back(eval(*item, scope));
          return Value(make_list(std::move(items)));
        } else if constexpr (std::is_same_v<T, Identifier>) {
          const Value* v = scope->lookup(n.name);
          if (v == nullptr) fail_at(expr.span, "unknown name: " + n.name);
          return *v;
        } else if constexpr (std::is_same_v<T, FieldAccess> || std::is_same_v<T, Index>) {
          return read(resolve(expr, scope), expr.span);
        } else if constexpr (std::is_same_v<T, Call>) {
          Value callee = eval(*n.callee, scope);
          std::vector<Value> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(eval(*a, scope));
          return call_at(expr.span, callee, std::move(args));
        } else if constexpr (std::is_same_v<T, Unary>) {
          Value v = eval(*n.operand, scope);
          if (n.op == UnaryOp::Not) return Value(!truthy(v));
          if (!v.is<double>()) fail_at(expr.span, "type mismatch: cannot negate " + type_name(v));
          return Value(-v.as<double>());
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(expr, n, scope);
        } else {
          auto f = std::make_shared<Function>();
          f->name = n.name_hint;
          f->params = n.params;
          f->body = n.body;
          f->closure = scope;
          f->cell_id = frames_.empty() ? current_cell_ : frames_.back().cell_id;
          f->line = expr.span.line;
          f->col = expr.span.col;
          return Value(FunctionPtr(std::move(f)));
        }
      },
      expr.node);
}

Value Interpreter::eval_binary(const Expr& expr, const Binary& bin, const ScopePtr& scope) {
  if (bin.op == BinaryOp::And) {
    Value lhs = eval(*bin.lhs, scope);
    return truthy(lhs) ? eval(*bin.rhs, scope) : lhs;
  }
  if (bin.op == BinaryOp::Or) {
    Value lhs = eval(*bin.lhs, scope);
    return truthy(lhs) ? lhs : eval(*bin.rhs, scope);
  }
  const Value a = eval(*bin.lhs, scope);
  const Value b = eval(*bin.rhs, scope);
  auto mismatch = [&]() -> Value {
    fail_at(expr.span, "type mismatch: cannot apply '" + std::string(op_symbol(bin.op)) + "' to " +
                           type_name(a) + " and " + type_name(b));
  };

  switch (bin.op) {
    case BinaryOp::Eq: return Value(values_equal(a, b));
    case BinaryOp::Ne: return Value(!values_equal(a, b));
    case BinaryOp::Add:
      if (a.is<double>() && b.is<double>()) return Value(a.as<double>() + b.as<double>());
      if (a.is<std::string>() && b.is<std::string>()) return Value(a.as<std::string>() + b.as<std::string>());
      if (a.is<ListPtr>() && b.is<ListPtr>()) {
        ValueList out = *a.as<ListPtr>();
        const ValueList& rhs = *b.as<ListPtr>();
        out.insert(out.end(), rhs.begin(), rhs.end());
        return Value(make_list(std::move(out)));
      }
      return mismatch();
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
      int cmp;
      if (a.is<double>() && b.is<double>()) {
        const double x = a.as<double>(), y = b.as<double>();
        if (std::isnan(x) || std::isnan(y)) return Value(false);
        cmp = x < y ? -1 : x > y ? 1 : 0;
      } else if (a.is<std::string>() && b.is<std::string>()) {
        const int c = a.as<std::string>().compare(b.as<std::string>());
        cmp = c < 0 ? -1 : c > 0 ? 1 : 0;
      } else {
        return mismatch();
      }
      switch (bin.op) {
        case BinaryOp::Lt: return Value(cmp < 0);
        case BinaryOp::Le: return Value(cmp <= 0);
        case BinaryOp::Gt: return Value(cmp > 0);
        default: return Value(cmp >= 0);
      }
    }
    default:
      break;
  }

  if (!a.is<double>() || !b.is<double>()) return mismatch();
  const double x = a.as<double>(), y = b.as<double>();
  switch (bin.op) {
    case BinaryOp::Sub: return Value(x - y);
    case BinaryOp::Mul: return Value(x * y);
    case BinaryOp::Div:
      if (y == 0) fail_at(expr.span, "division by zero");
      return Value(x / y);
    case BinaryOp::Mod:
      if (y == 0) fail_at(expr.span, "division by zero");
      return Value(x - y * std::floor(x / y));  // sign follows the divisor
    default:
      return mismatch();
  }
}

Interpreter::Place Interpreter::resolve(const Expr& expr, const ScopePtr& scope) {
  Place p;
  if (const auto* id = std::get_if<Identifier>(&expr.node)) {
    p.kind = Place::Kind::Var;
    p.scope = scope;
    p.name = id->name;
    return p;
  }
  if (const auto* fa = std::get_if<FieldAccess>(&expr.node)) {
    Value base;
    if (std::holds_alternative<FieldAccess>(fa->object->node)) {
      Place inner = resolve(*fa->object, scope);
      if (inner.kind == Place::Kind::EntityField && is_vector_field(inner.name)) {
        if (axis_index(inner.name, fa->field) < 0) {
          fail_at(expr.span, "unknown field: " + inner.name + "." + fa->field);
        }
        p.kind = Place::Kind::EntityAxis;
        p.id = inner.id;
        p.name = inner.name;
        p.axis = fa->field;
        return p;
      }
      base = read(inner, fa->object->span);
    } else {
      base = eval(*fa->object, scope);
    }
    if (base.is<EntityRef>()) {
      p.kind = Place::Kind::EntityField;
      p.id = base.as<EntityRef>().id;
      p.name = fa->field;
      return p;
    }
    if (base.is<SpriteRef>()) {
      const SpriteRef& s = base.as<SpriteRef>();
      const std::string& f = fa->field;
      p.kind = Place::Kind::Computed;
      if (f == "sheet") p.value = Value(s.sheet);
      else if (f == "name") p.value = Value(s.name);
      else if (f == "x") p.value = Value(s.rect.x);
      else if (f == "y") p.value = Value(s.rect.y);
      else if (f == "w") p.value = Value(s.rect.w);
      else if (f == "h") p.value = Value(s.rect.h);
      else fail_at(expr.span, "unknown field: " + f);
      p.name = f;
      return p;
    }
    fail_at(expr.span, "type mismatch: cannot access field '" + fa->field + "' of " + type_name(base));
  }
  if (const auto* ix = std::get_if<Index>(&expr.node)) {
    Value base = eval(*ix->object, scope);
    Value key = eval(*ix->index, scope);
    if (!key.is<double>() || std::floor(key.as<double>()) != key.as<double>()) {
      fail_at(ix->index->span, "type mismatch: index must be an integer, got " + repr(key));
    }
    const double i = key.as<double>();
    if (base.is<ListPtr>()) {
      p.kind = Place::Kind::ListElem;
      p.list = base.as<ListPtr>();
      p.index = i;
      return p;
    }
    if (base.is<std::string>()) {
      const std::string& s = base.as<std::string>();
      if (i < 0 || i >= static_cast<double>(s.size())) fail_at(expr.span, "index out of range: " + format_number(i));
      p.kind = Place::Kind::Computed;
      p.value = Value(std::string(1, s[static_cast<std::size_t>(i)]));
      return p;
    }
    fail_at(expr.span, "type mismatch: cannot index " + type_name(base));
  }
  p.kind = Place::Kind::Computed;
  p.value = eval(expr, scope);
  return p;
}

Value Interpreter::read(const Place& p, Span at) {
  switch (p.kind) {
    case Place::Kind::Var: {
      const Value* v = p.scope->lookup(p.name);
      if (v == nullptr) fail_at(at, "unknown name: " + p.name);
      return *v;
    }
    case Place::Kind::EntityField:
      return read_entity_field(entity_at(p.id, at), p.name, at);
    case Place::Kind::EntityAxis: {
      const Vec2& v = vector_field(entity_at(p.id, at), p.name);
      return Value(axis_index(p.name, p.axis) == 0 ? v.x : v.y);
    }
    case Place::Kind::ListElem:
      if (p.index < 0 || p.index >= static_cast<double>(p.list->size())) {
        fail_at(at, "index out of range: " + format_number(p.index));
      }
      return (*p.list)[static_cast<std::size_t>(p.index)];
    case Place::Kind::Computed:
      return p.value;
  }
  return Value();
}

void Interpreter::write(const Place& p, Value v, Span at) {
  switch (p.kind) {
    case Place::Kind::Var:
      p.scope->assign(p.name, std::move(v));
      return;
    case Place::Kind::EntityField:
      write_entity_field(entity_at(p.id, at), p.name, std::move(v), at);
      return;
    case Place::Kind::EntityAxis:
      write_entity_axis(entity_at(p.id, at), p.name, p.axis, std::move(v), at);
      return;
    case Place::Kind::ListElem:
      if (p.index < 0 || p.index >= static_cast<double>(p.list->size())) {
        fail_at(at, "index out of range: " + format_number(p.index));
      }
      (*p.list)[static_cast<std::size_t>(p.index)] = std::move(v);
      return;
    case Place::Kind::Computed:
      fail_at(at, p.name.empty() ? "invalid assignment target" : "read-only field: " + p.name);
  }
}

Entity& Interpreter::entity_at(EntityId id, Span at) {
  Entity* e = scene_->find(id);
  if (e == nullptr) fail_at(at, "dangling entity-ref: #" + std::to_string(id));
  return *e;
}

Value Interpreter::read_entity_field(const Entity& e, const std::string& f, Span at) {
  if (f == "id") return Value(e.id);
  if (f == "name") return e.name ? Value(*e.name) : Value();
  if (f == "kind") return Value(std::string(kind_name(e.kind)));
  if (is_vector_field(f)) {
    const Vec2& v = vector_field(e, f);
    return Value(make_list({Value(v.x), Value(v.y)}));
  }
  if (f == "health") return Value(e.health);
  if (f == "speed") return Value(e.speed);
  if (f == "sprite") return Value(e.sprite);
  if (f == "on_update") return e.on_update;
  if (f == "on_collide") return e.on_collide;
  if (f == "alive") return Value(e.alive);
  auto it = e.custom.find(f);
  if (it == e.custom.end()) fail_at(at, "unknown field: " + f);
  return it->second;
}

double Interpreter::require_number(const Value& v, const std::string& what, Span at) const {
  if (!v.is<double>()) fail_at(at, "type mismatch: " + what + " must be a number, got " + type_name(v));
  return v.as<double>();
}

void Interpreter::write_entity_field(Entity& e, const std::string& f, Value v, Span at) {
  if (f == "id" || f == "kind" || f == "alive") fail_at(at, "read-only field: " + f);
  if (f == "name") {
    if (v.is_nil()) {
      e.name.reset();
    } else if (v.is<std::string>()) {
      e.name = v.as<std::string>();
    } else {
      fail_at(at, "type mismatch: name must be a string or nil, got " + type_name(v));
    }
    return;
  }
  if (is_vector_field(f)) {
    if (!v.is<ListPtr>() || v.as<ListPtr>()->size() != 2) {
      fail_at(at, "type mismatch: " + f + " must be a list of two numbers");
    }
    const ValueList& l = *v.as<ListPtr>();
    const double x = require_number(l[0], f, at);
    const double y = require_number(l[1], f, at);
    if (!std::isfinite(x) || !std::isfinite(y)) fail_at(at, "type mismatch: " + f + " must be finite");
    if (f == "size" && (x <= 0 || y <= 0)) fail_at(at, "type mismatch: size must be positive");
    vector_field(e, f) = {x, y};
    return;
  }
  if (f == "health") {
    const double h = require_number(v, "health", at);
    if (std::isnan(h)) fail_at(at, "type mismatch: health must not be NaN");
    e.health = e.has_health() ? std::max(0.0, h) : h;
    return;
  }
  if (f == "speed") {
    const double s = require_number(v, "speed", at);
    if (!std::isfinite(s)) fail_at(at, "type mismatch: speed must be finite");
    e.speed = s;
    return;
  }
  if (f == "sprite") {
    if (v.is<SpriteRef>()) {
      e.sprite = v.as<SpriteRef>();
    } else if (v.is<std::string>() && is_color_literal(v.as<std::string>())) {
      e.sprite = solid_color(v.as<std::string>(), static_cast<int>(e.size.x), static_cast<int>(e.size.y));
    } else {
      fail_at(at, "type mismatch: sprite must be a sprite or \"#RRGGBB\" colour, got " + type_name(v));
    }
    return;
  }
  if (f == "on_update" || f == "on_collide") {
    if (!v.is_nil() && !v.is_callable()) {
      fail_at(at, "type mismatch: " + f + " must be a function or nil, got " + type_name(v));
    }
    if (v.is<FunctionPtr>() && v.as<FunctionPtr>()->params.size() != 2) {
      fail_at(at, "arity mismatch: " + f + " takes 2 parameters (" +
                      (f == "on_update" ? "self, dt" : "self, other") + "), got " +
                      std::to_string(v.as<FunctionPtr>()->params.size()));
    }
    (f == "on_update" ? e.on_update : e.on_collide) = std::move(v);
    return;
  }
  e.custom[f] = std::move(v);
}

void Interpreter::write_entity_axis(Entity& e, const std::string& f, const std::string& axis,
                                    Value v, Span at) {
  const double d = require_number(v, f + "." + axis, at);
  if (!std::isfinite(d)) fail_at(at, "type mismatch: " + f + "." + axis + " must be finite");
  if (f == "size" && d <= 0) fail_at(at, "type mismatch: size must be positive");
  Vec2& vec = vector_field(e, f);
  (axis_index(f, axis) == 0 ? vec.x : vec.y) = d;
}

}  // namespace noteg
