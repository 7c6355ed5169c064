#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noteg/ast.hpp"
#include "noteg/engine.hpp"
#include "noteg/error.hpp"
#include "noteg/scene.hpp"
#include "noteg/scope.hpp"
#include "noteg/value.hpp"

namespace noteg {

inline constexpr int kMaxCallDepth = 256;
inline constexpr std::uint64_t kDefaultStepBudget = 5'000'000;

struct CellResult {
  bool ok = true;
  Value value;  // last expression statement, nil otherwise
  std::optional<RuntimeError> error;
};

/// Tree-walking evaluator. The global scope persists across cells; builtins
/// live in a sealed parent scope so user bindings shadow rather than replace
/// them. Not reentrant across threads.
class Interpreter : public ScriptHost {
 public:
  explicit Interpreter(Scene& scene);

  Scene& scene() { return *scene_; }
  Scope& globals() { return *globals_; }
  const std::shared_ptr<Scope>& global_scope() const { return globals_; }

  void define_builtin(std::string name, int min_arity, int max_arity, Builtin::Impl impl);

  /// Runs the statements in order. Effects of statements before a failure
  /// remain in place.
  CellResult eval_cell(const ast::Program& program);

  /// Calls a function or builtin value. Throws RuntimeError.
  Value call_function(const Value& fn, std::vector<Value> args);

  Value invoke(const Value& fn, std::vector<Value> args) override {
    return call_function(fn, std::move(args));
  }

  /// Cell currently being evaluated, empty while the engine runs behaviours.
  const std::string& current_cell() const { return current_cell_; }

  void set_step_budget(std::uint64_t steps) { step_budget_ = steps; }

  /// Raises a RuntimeError located at the innermost active call site.
  [[noreturn]] void fail(const std::string& message) const;

 private:
  using ScopePtr = std::shared_ptr<Scope>;
  struct Frame {
    std::string fn;
    std::string cell_id;
    ast::Span call_site;  // where the caller invoked this frame
  };
  enum class Flow { Normal, Return };
  struct Place;
  class FrameGuard;

  [[noreturn]] void fail_at(ast::Span at, const std::string& message) const;
  std::vector<TraceFrame> trace_at(ast::Span at) const;

  Flow exec_block(const ast::Block& block, const ScopePtr& scope, Value& ret);
  Flow exec(const ast::Stmt& stmt, const ScopePtr& scope, Value& ret);
  Value eval(const ast::Expr& expr, const ScopePtr& scope);
  Value eval_binary(const ast::Expr& expr, const ast::Binary& bin, const ScopePtr& scope);
  Value call_at(ast::Span site, const Value& fn, std::vector<Value> args);

  Place resolve(const ast::Expr& expr, const ScopePtr& scope);
  Value read(const Place& place, ast::Span at);
  void write(const Place& place, Value v, ast::Span at);

  Entity& entity_at(EntityId id, ast::Span at);
  Value read_entity_field(const Entity& e, const std::string& field, ast::Span at);
  void write_entity_field(Entity& e, const std::string& field, Value v, ast::Span at);
  void write_entity_axis(Entity& e, const std::string& field, const std::string& axis, Value v,
                         ast::Span at);
  double require_number(const Value& v, const std::string& what, ast::Span at) const;
  void step(ast::Span at);
  void begin_entry();

  Scene* scene_;
  std::shared_ptr<Scope> builtins_;
  std::shared_ptr<Scope> globals_;
  std::vector<Frame> frames_;
  std::string current_cell_;
  std::uint64_t step_budget_ = kDefaultStepBudget;
  std::uint64_t steps_ = 0;
  ast::Span builtin_site_;
};

}  // namespace noteg
