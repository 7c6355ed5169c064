#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "noteg/value.hpp"

namespace noteg {

/// One link of an environment chain. Assignment rebinds the nearest existing
/// binding (skipping sealed scopes) and otherwise creates a local one, which
/// is what lets closures update captured variables.
class Scope {
 public:
  explicit Scope(std::shared_ptr<Scope> parent = nullptr, bool sealed = false)
      : parent_(std::move(parent)), sealed_(sealed) {}

  const Value* lookup(std::string_view name) const;
  void define(const std::string& name, Value v);
  void assign(const std::string& name, Value v);
  bool has_local(std::string_view name) const;

  const std::shared_ptr<Scope>& parent() const { return parent_; }
  const std::map<std::string, Value, std::less<>>& locals() const { return vars_; }

 private:
  Value* find_assignable(std::string_view name);

  std::map<std::string, Value, std::less<>> vars_;
  std::shared_ptr<Scope> parent_;
  bool sealed_;
};

}  // namespace noteg
