#include "verity/sql/parser.hpp"

#include <set>
#include <utility>

#include "verity/errors.hpp"
#include "verity/sql/lexer.hpp"

namespace verity::sql {
namespace {

std::optional<AggregateFn> aggregate_named(std::string_view name) {
  if (name == "sum") return AggregateFn::Sum;
  if (name == "count") return AggregateFn::Count;
  if (name == "avg") return AggregateFn::Avg;
  if (name == "max") return AggregateFn::Max;
  if (name == "min") return AggregateFn::Min;
  return std::nullopt;
}

std::string feature_name(std::string_view keyword) {
  if (keyword == "GROUP" || keyword == "BY") return "GROUP BY";
  if (keyword == "SOME" || keyword == "ALL") return "ANY";
  if (keyword == "LEFT" || keyword == "RIGHT" || keyword == "FULL" || keyword == "OUTER")
    return "OUTER JOIN";
  if (keyword == "INNER" || keyword == "CROSS" || keyword == "ON") return "JOIN";
  if (keyword == "ORDER") return "ORDER BY";
  return std::string(keyword);
}

class Parser {
 public:
  explicit Parser(std::string_view sql) : tokens_(tokenize(sql)) {}

  Query statement() {
    Query q;
    const Token& t = peek();
    if (t.is_keyword("SELECT")) {
      q.statement = select();
    } else if (t.is_keyword("INSERT")) {
      q.statement = insert();
    } else if (t.is_keyword("UPDATE")) {
      q.statement = update();
    } else if (t.is_keyword("DELETE")) {
      q.statement = remove();
    } else {
      fail({"SELECT", "INSERT", "UPDATE", "DELETE"});
    }
    finish();
    return q;
  }

  SelectQuery standalone_select() {
    if (!peek().is_keyword("SELECT")) fail({"SELECT"});
    SelectQuery q = select();
    finish();
    return q;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) return false;
    advance();
    return true;
  }
  bool accept_symbol(std::string_view sym) {
    if (!peek().is_symbol(sym)) return false;
    advance();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail({std::string(kw)});
  }
  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail({"'" + std::string(sym) + "'"});
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    if (t.type == TokenType::Keyword && is_unsupported_keyword(t.text)) {
      throw UnsupportedFeature(feature_name(t.text), t.position);
    }
    std::string msg = "syntax error at position " + std::to_string(t.position) + ": found " +
                      describe(t) + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " or ";
      msg += expected[i];
    }
    throw SyntaxError(t.position, std::move(expected), msg);
  }

  void finish() {
    accept_symbol(";");
    if (peek().type != TokenType::End) {
      if (peek().is_keyword("SELECT") || peek().is_keyword("INSERT") ||
          peek().is_keyword("UPDATE") || peek().is_keyword("DELETE")) {
        throw SyntaxError(peek().position, {"end of input"},
                          "multiple statements are not accepted; found a second statement at "
                          "position " +
                              std::to_string(peek().position));
      }
      fail({"end of input"});
    }
  }

  std::string identifier(std::string_view what) {
    if (peek().type != TokenType::Identifier) fail({std::string(what)});
    return advance().text;
  }

  // ---- SELECT ----

  SelectQuery select() {
    expect_keyword("SELECT");
    if (peek().is_keyword("DISTINCT")) fail({"projection"});
    SelectQuery q;
    do {
      q.projections.push_back(projection_item());
    } while (accept_symbol(","));
    expect_keyword("FROM");
    std::set<std::string> aliases;
    do {
      const std::size_t at = peek().position;
      FromItem item = from_item();
      if (!aliases.insert(item.visible_name()).second) {
        throw SyntaxError(at, {}, "duplicate table alias '" + item.visible_name() +
                                      "' at position " + std::to_string(at));
      }
      q.from_items.push_back(std::move(item));
    } while (accept_symbol(","));
    if (accept_keyword("WHERE")) q.where = predicate();
    return q;
  }

  ProjectionItem projection_item() {
    if (accept_symbol("*")) return ProjectionItem{};
    if (peek().is_symbol("(") && !peek(1).is_keyword("SELECT")) {
      // Parenthesised `(expr AS alias)` form; fall back to a plain expression.
      const std::size_t saved = pos_;
      try {
        advance();
        Expr e = expr();
        if (accept_keyword("AS")) {
          std::string alias = identifier("alias");
          expect_symbol(")");
          return ProjectionItem{std::move(e), std::move(alias)};
        }
      } catch (const SyntaxError&) {
      }
      pos_ = saved;
    }
    ProjectionItem item{expr(), std::nullopt};
    if (accept_keyword("AS")) {
      item.alias = identifier("alias");
    } else if (peek().type == TokenType::Identifier) {
      item.alias = advance().text;
    }
    return item;
  }

  FromItem from_item() {
    if (accept_symbol("(")) {
      if (peek().is_keyword("SELECT")) {
        SelectQuery sub = select();
        expect_symbol(")");
        accept_keyword("AS");
        if (peek().type != TokenType::Identifier) fail({"derived table alias"});
        return FromItem{DerivedTable{std::move(sub), advance().text}};
      }
      FromItem inner = from_item();
      expect_symbol(")");
      if (auto* base = std::get_if<BaseTable>(&inner.source); base && !base->alias) {
        if (accept_keyword("AS")) {
          base->alias = identifier("alias");
        } else if (peek().type == TokenType::Identifier) {
          base->alias = advance().text;
        }
      }
      return inner;
    }
    BaseTable t{identifier("table name"), std::nullopt};
    if (accept_keyword("AS")) {
      t.alias = identifier("alias");
    } else if (peek().type == TokenType::Identifier) {
      t.alias = advance().text;
    }
    return FromItem{std::move(t)};
  }

  // ---- expressions ----

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      BinaryOp op;
      if (accept_symbol("+")) {
        op = BinaryOp::Add;
      } else if (accept_symbol("-")) {
        op = BinaryOp::Sub;
      } else {
        return lhs;
      }
      lhs = Expr{Binary{op, std::move(lhs), term()}};
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      BinaryOp op;
      if (accept_symbol("*")) {
        op = BinaryOp::Mul;
      } else if (accept_symbol("/")) {
        op = BinaryOp::Div;
      } else {
        return lhs;
      }
      lhs = Expr{Binary{op, std::move(lhs), unary()}};
    }
  }

  Expr unary() {
    if (accept_symbol("-")) return Expr{Negate{unary()}};
    if (accept_symbol("+")) return unary();
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.type) {
      case TokenType::Integer:
        return Expr{Literal{LiteralKind::Integer, advance().text}};
      case TokenType::Decimal:
        return Expr{Literal{LiteralKind::Decimal, advance().text}};
      case TokenType::String:
        return Expr{Literal{LiteralKind::String, advance().text}};
      case TokenType::Keyword:
        if (accept_keyword("NULL")) return Expr{Literal{LiteralKind::Null, ""}};
        if (t.is_keyword("SELECT")) {
          throw UnsupportedFeature("nested SELECT in expression", t.position);
        }
        break;
      case TokenType::Identifier: {
        std::string name = advance().text;
        if (name == "date" && peek().type == TokenType::String) {
          return Expr{Literal{LiteralKind::Date, advance().text}};
        }
        if (peek().is_symbol("(")) return call(std::move(name), t.position);
        if (accept_symbol(".")) {
          return Expr{ColumnRef{std::move(name), identifier("column name")}};
        }
        return Expr{ColumnRef{"", std::move(name)}};
      }
      case TokenType::Symbol:
        if (t.is_symbol("(")) {
          if (peek(1).is_keyword("SELECT")) {
            throw UnsupportedFeature("nested SELECT in expression", peek(1).position);
          }
          advance();
          Expr inner = expr();
          expect_symbol(")");
          return inner;
        }
        break;
      case TokenType::End:
        break;
    }
    fail({"expression"});
  }

  Expr call(std::string name, std::size_t position) {
    auto fn = aggregate_named(name);
    if (!fn) throw UnsupportedFeature("function " + name, position);
    expect_symbol("(");
    if (peek().is_keyword("DISTINCT")) fail({"expression"});
    Aggregate agg{*fn, std::nullopt};
    if (*fn == AggregateFn::Count && accept_symbol("*")) {
      expect_symbol(")");
      return Expr{std::move(agg)};
    }
    agg.argument = expr();
    expect_symbol(")");
    return Expr{std::move(agg)};
  }

  // ---- predicates ----

  Predicate predicate() {
    Predicate lhs = conjunction();
    while (accept_keyword("OR")) lhs = Predicate{Or{std::move(lhs), conjunction()}};
    return lhs;
  }

  Predicate conjunction() {
    Predicate lhs = atom();
    while (accept_keyword("AND")) lhs = Predicate{And{std::move(lhs), atom()}};
    return lhs;
  }

  static bool continues_expression(const Token& t) {
    if (t.type == TokenType::Symbol) {
      return t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/" ||
             t.text == "=" || t.text == "<>" || t.text == "<" || t.text == "<=" ||
             t.text == ">" || t.text == ">=";
    }
    return t.is_keyword("LIKE") || t.is_keyword("NOT") || t.is_keyword("IN") ||
           t.is_keyword("IS") || t.is_keyword("BETWEEN");
  }

  Predicate atom() {
    if (peek().is_keyword("EXISTS")) throw UnsupportedFeature("EXISTS", peek().position);
    if (peek().is_keyword("NOT")) throw UnsupportedFeature("NOT", peek().position);
    if (peek().is_symbol("(") && !peek(1).is_keyword("SELECT")) {
      const std::size_t saved = pos_;
      try {
        advance();
        Predicate inner = predicate();
        expect_symbol(")");
        if (!continues_expression(peek())) return inner;
      } catch (const SyntaxError&) {
      }
      pos_ = saved;
    }
    return comparison();
  }

  Predicate comparison() {
    Expr lhs = expr();
    const Token& t = peek();
    if (t.is_keyword("NOT")) {
      advance();
      if (peek().is_keyword("IN")) throw UnsupportedFeature("IN", peek().position);
      expect_keyword("LIKE");
      return Predicate{Like{std::move(lhs), expr(), true}};
    }
    if (accept_keyword("LIKE")) return Predicate{Like{std::move(lhs), expr(), false}};
    CompareOp op;
    if (t.is_symbol("=")) {
      op = CompareOp::Eq;
    } else if (t.is_symbol("<>")) {
      op = CompareOp::Ne;
    } else if (t.is_symbol("<")) {
      op = CompareOp::Lt;
    } else if (t.is_symbol("<=")) {
      op = CompareOp::Le;
    } else if (t.is_symbol(">")) {
      op = CompareOp::Gt;
    } else if (t.is_symbol(">=")) {
      op = CompareOp::Ge;
    } else {
      fail({"comparison operator", "LIKE"});
    }
    advance();
    if (peek().is_keyword("ANY") || peek().is_keyword("SOME") || peek().is_keyword("ALL")) {
      throw UnsupportedFeature("ANY", peek().position);
    }
    if (peek().is_symbol("(") && peek(1).is_keyword("SELECT")) {
      throw UnsupportedFeature("nested SELECT in WHERE", peek(1).position);
    }
    return Predicate{Comparison{op, std::move(lhs), expr()}};
  }

  // ---- INSERT / UPDATE / DELETE ----

  InsertQuery insert() {
    expect_keyword("INSERT");
    expect_keyword("INTO");
    InsertQuery q;
    q.table = identifier("table name");
    if (peek().is_symbol("(") && !peek(1).is_keyword("SELECT")) {
      advance();
      do {
        q.columns.push_back(identifier("column name"));
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    if (accept_keyword("VALUES")) {
      ValuesRows rows;
      do {
        expect_symbol("(");
        std::vector<Expr> row;
        do {
          row.push_back(expr());
        } while (accept_symbol(","));
        expect_symbol(")");
        rows.push_back(std::move(row));
      } while (accept_symbol(","));
      q.source = std::move(rows);
    } else if (peek().is_keyword("SELECT")) {
      q.source = Box<SelectQuery>(select());
    } else if (peek().is_symbol("(") && peek(1).is_keyword("SELECT")) {
      advance();
      q.source = Box<SelectQuery>(select());
      expect_symbol(")");
    } else {
      fail({"VALUES", "SELECT"});
    }
    return q;
  }

  UpdateQuery update() {
    expect_keyword("UPDATE");
    UpdateQuery q;
    q.table = identifier("table name");
    expect_keyword("SET");
    do {
      SetClause clause;
      std::string first = identifier("column name");
      if (accept_symbol(".")) {
        clause.column = ColumnRef{std::move(first), identifier("column name")};
      } else {
        clause.column = ColumnRef{"", std::move(first)};
      }
      expect_symbol("=");
      if (peek().is_symbol("(") && peek(1).is_keyword("SELECT")) {
        advance();
        clause.value = Box<SelectQuery>(select());
        expect_symbol(")");
      } else {
        clause.value = expr();
      }
      q.set_clauses.push_back(std::move(clause));
    } while (accept_symbol(","));
    if (accept_keyword("WHERE")) q.where = predicate();
    return q;
  }

  DeleteQuery remove() {
    expect_keyword("DELETE");
    expect_keyword("FROM");
    DeleteQuery q;
    q.table = identifier("table name");
    if (accept_keyword("WHERE")) q.where = predicate();
    return q;
  }
};

}  // namespace

Query parse(std::string_view sql) { return Parser(sql).statement(); }

SelectQuery parse_select(std::string_view sql) { return Parser(sql).standalone_select(); }

}  // namespace verity::sql
