#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "noteg/error.hpp"

namespace noteg {

enum class TokenKind { Number, String, Ident, Keyword, Operator, Punct, Eof };

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string text;  // decoded value for strings
  int line = 1;
  int col = 1;
  // True when a line break separates this token from the previous one.
  bool newline_before = false;
};

class ParseError : public Error {
 public:
  ParseError(std::string cell_id, int line, int col, std::string token, std::string message);

  const std::string& cell_id() const { return cell_id_; }
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& token() const { return token_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string cell_id_;
  int line_;
  int col_;
  std::string token_;
  std::string detail_;
};

bool is_keyword(std::string_view word);

/// Splits `source` into tokens ending with an Eof token. Comments run from
/// '#' to end of line.
std::vector<Token> tokenize(std::string_view source, const std::string& cell_id);

}  // namespace noteg
