#include "noteg/scope.hpp"

namespace noteg {

const Value* Scope::lookup(std::string_view name) const {
  for (const Scope* s = this; s != nullptr; s = s->parent_.get()) {
    auto it = s->vars_.find(name);
    if (it != s->vars_.end()) return &it->second;
  }
  return nullptr;
}

Value* Scope::find_assignable(std::string_view name) {
  for (Scope* s = this; s != nullptr; s = s->parent_.get()) {
    if (s->sealed_) continue;
    auto it = s->vars_.find(name);
    if (it != s->vars_.end()) return &it->second;
  }
  return nullptr;
}

void Scope::define(const std::string& name, Value v) { vars_[name] = std::move(v); }

void Scope::assign(const std::string& name, Value v) {
  if (Value* slot = find_assignable(name)) {
    *slot = std::move(v);
  } else {
    vars_[name] = std::move(v);
  }
}

bool Scope::has_local(std::string_view name) const { return vars_.find(name) != vars_.end(); }

}  // namespace noteg
