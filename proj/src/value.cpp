#include "noteg/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace noteg {

namespace {

constexpr int kMaxReprDepth = 32;

std::string join_params(const std::vector<std::string>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i];
  }
  return out;
}

std::string render(const Value& v, bool quote_strings, int depth) {
  if (depth > kMaxReprDepth) return "[...]";
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Nil>) {
          return "nil";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote_strings ? quote_string(x) : x;
        } else if constexpr (std::is_same_v<T, ListPtr>) {
          std::string out = "[";
          for (std::size_t i = 0; i < x->size(); ++i) {
            if (i) out += ", ";
            out += render((*x)[i], true, depth + 1);
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, EntityRef>) {
          return "<entity#" + std::to_string(x.id) + ">";
        } else if constexpr (std::is_same_v<T, SpriteRef>) {
          return "<sprite " + (x.name.empty() ? x.sheet : x.name) + ">";
        } else if constexpr (std::is_same_v<T, FunctionPtr>) {
          return "<fn " + x->name + "(" + join_params(x->params) + ")>";
        } else {
          return "<builtin " + x->name + ">";
        }
      },
      v.data);
}

std::string canonical_impl(const Value& v, int depth) {
  if (depth > kMaxReprDepth) return "[...]";
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Nil>) {
          return "nil";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_fixed6(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote_string(x);
        } else if constexpr (std::is_same_v<T, ListPtr>) {
          std::string out = "[";
          for (std::size_t i = 0; i < x->size(); ++i) {
            if (i) out += ',';
            out += canonical_impl((*x)[i], depth + 1);
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, EntityRef>) {
          return "entity#" + std::to_string(x.id);
        } else if constexpr (std::is_same_v<T, SpriteRef>) {
          return "sprite(" + quote_string(x.sheet) + "," + std::to_string(x.rect.x) + "," +
                 std::to_string(x.rect.y) + "," + std::to_string(x.rect.w) + "," +
                 std::to_string(x.rect.h) + "," + quote_string(x.name) + ")";
        } else if constexpr (std::is_same_v<T, FunctionPtr>) {
          return "fn(" + join_params(x->params) + ")@" + x->cell_id + ":" +
                 std::to_string(x->line) + ":" + std::to_string(x->col);
        } else {
          return "builtin:" + x->name;
        }
      },
      v.data);
}

}  // namespace

ListPtr make_list(ValueList items) { return std::make_shared<ValueList>(std::move(items)); }

std::string type_name(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Nil>) return "nil";
        else if constexpr (std::is_same_v<T, bool>) return "boolean";
        else if constexpr (std::is_same_v<T, double>) return "number";
        else if constexpr (std::is_same_v<T, std::string>) return "string";
        else if constexpr (std::is_same_v<T, ListPtr>) return "list";
        else if constexpr (std::is_same_v<T, EntityRef>) return "entity";
        else if constexpr (std::is_same_v<T, SpriteRef>) return "sprite";
        else if constexpr (std::is_same_v<T, FunctionPtr>) return "function";
        else return "builtin";
      },
      v.data);
}

bool truthy(const Value& v) {
  if (v.is<Nil>()) return false;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<double>()) return v.as<double>() != 0.0;
  if (v.is<std::string>()) return !v.as<std::string>().empty();
  if (v.is<ListPtr>()) return !v.as<ListPtr>()->empty();
  return true;
}

bool values_equal(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (a.is<ListPtr>()) {
    const auto& la = *a.as<ListPtr>();
    const auto& lb = *b.as<ListPtr>();
    if (&la == &lb) return true;
    if (la.size() != lb.size()) return false;
    for (std::size_t i = 0; i < la.size(); ++i) {
      if (!values_equal(la[i], lb[i])) return false;
    }
    return true;
  }
  return a.data == b.data;
}

std::string repr(const Value& v) { return render(v, true, 0); }
std::string to_text(const Value& v) { return render(v, false, 0); }
std::string canonical(const Value& v) { return canonical_impl(v, 0); }

std::string format_number(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  if (d == 0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

std::string format_fixed6(double d) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.6f", d);
  std::string s(buf);
  if (s == "-0.000000") return "0.000000";
  return s;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

}  // namespace noteg
