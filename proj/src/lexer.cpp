#include "noteg/lexer.hpp"

#include <array>
#include <cstdlib>

namespace noteg {

namespace {

constexpr std::array<std::string_view, 14> kKeywords = {
    "fn", "return", "if", "else", "while", "for", "in",
    "range", "true", "false", "nil", "and", "or", "not"};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  if (u >= 0x20 && u < 0x7F) return std::string(1, c);
  static constexpr char hex[] = "0123456789abcdef";
  return std::string("\\x") + hex[u >> 4] + hex[u & 0xF];
}

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& cell_id) : src_(src), cell_id_(cell_id) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool newline = false;
    for (;;) {
      newline = skip_space_and_comments() || newline;
      Token t;
      t.line = line_;
      t.col = col_;
      t.newline_before = newline;
      newline = false;
      if (at_end()) {
        t.kind = TokenKind::Eof;
        out.push_back(std::move(t));
        return out;
      }
      const char c = peek();
      if (is_digit(c)) {
        lex_number(t);
      } else if (is_ident_start(c)) {
        while (!at_end() && (is_ident_start(peek()) || is_digit(peek()))) t.text += advance();
        t.kind = is_keyword(t.text) ? TokenKind::Keyword : TokenKind::Ident;
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_symbol(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(int line, int col, const std::string& tok, const std::string& msg) const {
    throw ParseError(cell_id_, line, col, tok, msg);
  }

  // Returns true if a line break was skipped.
  bool skip_space_and_comments() {
    bool newline = false;
    while (!at_end()) {
      const char c = peek();
      if (c == '\n') {
        newline = true;
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
    return newline;
  }

  void lex_number(Token& t) {
    t.kind = TokenKind::Number;
    while (is_digit(peek())) t.text += advance();
    if (peek() == '.' && is_digit(peek(1))) {
      t.text += advance();
      while (is_digit(peek())) t.text += advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
      t.text += advance();
      if (peek() == '+' || peek() == '-') t.text += advance();
      while (is_digit(peek())) t.text += advance();
    }
    if (is_ident_start(peek())) {
      fail(t.line, t.col, t.text + peek(), "malformed number");
    }
  }

  void lex_string(Token& t) {
    t.kind = TokenKind::String;
    advance();  // opening quote
    for (;;) {
      if (at_end() || peek() == '\n') fail(t.line, t.col, "\"", "unterminated string");
      const char c = advance();
      if (c == '"') return;
      if (c != '\\') {
        t.text += c;
        continue;
      }
      if (at_end()) fail(t.line, t.col, "\"", "unterminated string");
      const int el = line_, ec = col_ - 1;
      const char e = advance();
      switch (e) {
        case '"': t.text += '"'; break;
        case '\\': t.text += '\\'; break;
        case 'n': t.text += '\n'; break;
        case 't': t.text += '\t'; break;
        default: fail(el, ec, std::string("\\") + describe_byte(e), "unknown escape");
      }
    }
  }

  void lex_symbol(Token& t) {
    const char c = advance();
    const char n = peek();
    auto two = [&](char second) {
      if (n == second) {
        advance();
        return true;
      }
      return false;
    };
    switch (c) {
      case '+': case '-': case '*': case '/': case '%':
        t.kind = TokenKind::Operator;
        t.text = std::string(1, c);
        return;
      case '=': case '<': case '>':
        t.kind = TokenKind::Operator;
        t.text = std::string(1, c);
        if (two('=')) t.text += '=';
        return;
      case '!':
        if (two('=')) {
          t.kind = TokenKind::Operator;
          t.text = "!=";
          return;
        }
        fail(t.line, t.col, "!", "unexpected character (use 'not')");
      case '(': case ')': case '{': case '}': case '[': case ']': case ',': case '.': case ';':
        t.kind = TokenKind::Punct;
        t.text = std::string(1, c);
        return;
      default:
        fail(t.line, t.col, describe_byte(c), "unexpected character");
    }
  }

  std::string_view src_;
  const std::string& cell_id_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

ParseError::ParseError(std::string cell_id, int line, int col, std::string token,
                       std::string message)
    : Error(ErrorCode::Parse, cell_id + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                  ": " + message + " (at '" + token + "')"),
      cell_id_(std::move(cell_id)),
      line_(line),
      col_(col),
      token_(std::move(token)),
      detail_(std::move(message)) {}

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view source, const std::string& cell_id) {
  return Lexer(source, cell_id).run();
}

}  // namespace noteg
