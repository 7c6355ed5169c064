#pragma once

#include <string>
#include <string_view>

#include "noteg/ast.hpp"
#include "noteg/lexer.hpp"

namespace noteg {

/// Maximum bracket/block nesting accepted before a ParseError.
inline constexpr int kMaxParseDepth = 200;

/// Parses one cell. Never crashes on arbitrary bytes: every failure is a
/// ParseError carrying line, column and the offending token.
ast::Program parse(std::string_view source, const std::string& cell_id);

}  // namespace noteg
