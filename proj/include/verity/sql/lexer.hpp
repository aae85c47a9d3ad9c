#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace verity::sql {

enum class TokenType {
  Identifier,  // lower-cased; never a reserved keyword
  Keyword,     // upper-cased reserved word
  Integer,
  Decimal,
  String,
  Symbol,  // ( ) , . ; * + - / = <> < <= > >=
  End,
};

struct Token {
  TokenType type;
  std::string text;
  std::size_t position;  // byte offset into the source

  bool is_keyword(std::string_view kw) const {
    return type == TokenType::Keyword && text == kw;
  }
  bool is_symbol(std::string_view sym) const {
    return type == TokenType::Symbol && text == sym;
  }
};

/// Splits SQL text into tokens. `!=` is folded into `<>`. Both single- and
/// double-quoted strings are string literals (doubling the quote escapes it).
/// Throws SyntaxError on an unterminated string or an unexpected character.
std::vector<Token> tokenize(std::string_view sql);

/// True if `word` (upper-case) is reserved and cannot be used as an identifier.
bool is_reserved(std::string_view word);

/// Reserved words that belong to SQL features the gateway rejects explicitly.
bool is_unsupported_keyword(std::string_view word);

std::string describe(const Token& token);

}  // namespace verity::sql
