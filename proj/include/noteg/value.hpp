#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "noteg/assets.hpp"

namespace noteg {

namespace ast {
struct Block;
}

class Scope;
class Interpreter;

using EntityId = std::int64_t;

struct Value;
using ValueList = std::vector<Value>;
/// Lists have reference semantics: copies of a Value share the list.
using ListPtr = std::shared_ptr<ValueList>;

struct Nil {
  bool operator==(const Nil&) const = default;
};

/// Reference to a scene entity by id. May dangle after the entity despawns.
struct EntityRef {
  EntityId id = 0;
  bool operator==(const EntityRef&) const = default;
};

struct Function {
  std::string name;
  std::vector<std::string> params;
  std::shared_ptr<const ast::Block> body;
  std::shared_ptr<Scope> closure;
  std::string cell_id;
  int line = 0;
  int col = 0;
};
using FunctionPtr = std::shared_ptr<const Function>;

struct Builtin {
  using Impl = std::function<Value(Interpreter&, std::span<const Value>)>;

  std::string name;
  int min_arity = 0;
  int max_arity = 0;  // -1 for variadic
  Impl impl;
};
using BuiltinPtr = std::shared_ptr<const Builtin>;

struct Value {
  using Storage = std::variant<Nil, bool, double, std::string, ListPtr, EntityRef, SpriteRef,
                               FunctionPtr, BuiltinPtr>;
  Storage data;

  Value() = default;
  Value(Nil) {}
  Value(bool b) : data(b) {}
  Value(double d) : data(d) {}
  Value(int i) : data(static_cast<double>(i)) {}
  Value(std::int64_t i) : data(static_cast<double>(i)) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(ListPtr l) : data(std::move(l)) {}
  Value(EntityRef e) : data(e) {}
  Value(SpriteRef s) : data(std::move(s)) {}
  Value(FunctionPtr f) : data(std::move(f)) {}
  Value(BuiltinPtr b) : data(std::move(b)) {}

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(data);
  }

  bool is_nil() const { return is<Nil>(); }
  bool is_callable() const { return is<FunctionPtr>() || is<BuiltinPtr>(); }
};

ListPtr make_list(ValueList items = {});

/// "number", "string", "list", "entity", ...
std::string type_name(const Value& v);
bool truthy(const Value& v);
/// Structural equality; functions compare by identity.
bool values_equal(const Value& a, const Value& b);

/// Notebook display form: strings quoted, integral numbers without decimals.
std::string repr(const Value& v);
/// print() form: like repr but strings are emitted raw.
std::string to_text(const Value& v);
/// Stable form used by the scene serialization (numbers fixed at 6 places).
std::string canonical(const Value& v);

std::string format_number(double d);
/// "%.6f" with "-0.000000" folded to "0.000000".
std::string format_fixed6(double d);
std::string quote_string(std::string_view s);

}  // namespace noteg
