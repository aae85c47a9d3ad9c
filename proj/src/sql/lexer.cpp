#include "verity/sql/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "verity/errors.hpp"

namespace verity::sql {
namespace {

constexpr std::array kSupportedKeywords = {
    "SELECT", "FROM",   "WHERE",  "AND", "OR",     "NOT",    "LIKE", "AS",
    "INSERT", "INTO",   "VALUES", "UPDATE", "SET", "DELETE", "NULL", "CREATE",
    "TABLE",
};

constexpr std::array kUnsupportedKeywords = {
    "IN",    "ANY",   "SOME",  "ALL",   "EXISTS", "GROUP", "HAVING", "JOIN",
    "LEFT",  "RIGHT", "FULL",  "OUTER", "INNER",  "CROSS", "ON",     "ORDER",
    "LIMIT", "DISTINCT", "UNION", "BETWEEN", "IS", "CASE", "BY",
};

bool contains(const auto& list, std::string_view word) {
  return std::find(list.begin(), list.end(), word) != list.end();
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

bool is_reserved(std::string_view word) {
  return contains(kSupportedKeywords, word) || contains(kUnsupportedKeywords, word);
}

bool is_unsupported_keyword(std::string_view word) {
  return contains(kUnsupportedKeywords, word);
}

std::string describe(const Token& token) {
  switch (token.type) {
    case TokenType::End:
      return "end of input";
    case TokenType::String:
      return "string '" + token.text + "'";
    default:
      return "'" + token.text + "'";
  }
}

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  while (i < n) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {  // line comment
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_char(sql[i])) ++i;
      std::string word(sql.substr(start, i - start));
      std::string upper = word;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      if (is_reserved(upper)) {
        out.push_back({TokenType::Keyword, std::move(upper), start});
      } else {
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        out.push_back({TokenType::Identifier, std::move(word), start});
      }
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < n && digit(sql[i + 1]))) {
      bool seen_dot = false;
      while (i < n && (digit(sql[i]) || (sql[i] == '.' && !seen_dot))) {
        if (sql[i] == '.') seen_dot = true;
        ++i;
      }
      if (i < n && ident_start(sql[i])) {
        throw SyntaxError(i, {}, "malformed number at position " + std::to_string(start));
      }
      out.push_back({seen_dot ? TokenType::Decimal : TokenType::Integer,
                     std::string(sql.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'' || c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == c) {
          if (i + 1 < n && sql[i + 1] == c) {
            text.push_back(c);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        text.push_back(sql[i++]);
      }
      if (!closed) {
        throw SyntaxError(start, {}, "unterminated string literal at position " +
                                         std::to_string(start));
      }
      out.push_back({TokenType::String, std::move(text), start});
      continue;
    }
    auto two = sql.substr(i, 2);
    if (two == "<>" || two == "<=" || two == ">=" || two == "!=") {
      out.push_back({TokenType::Symbol, two == "!=" ? "<>" : std::string(two), start});
      i += 2;
      continue;
    }
    if (std::string_view("(),.;*+-/=<>").find(c) != std::string_view::npos) {
      out.push_back({TokenType::Symbol, std::string(1, c), start});
      ++i;
      continue;
    }
    throw SyntaxError(start, {},
                      std::string("unexpected character '") + c + "' at position " +
                          std::to_string(start));
  }
  out.push_back({TokenType::End, "", n});
  return out;
}

}  // namespace verity::sql
