#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "verity/sql/box.hpp"

namespace verity::sql {

struct Expr;
struct Predicate;
struct SelectQuery;

enum class LiteralKind { Integer, Decimal, String, Date, Null };

struct Literal {
  LiteralKind kind = LiteralKind::Null;
  std::string text;  // digits for numbers, raw content for strings/dates

  friend bool operator==(const Literal&, const Literal&) = default;
};

/// `qualifier.name` or bare `name`; both lower-cased by the lexer.
struct ColumnRef {
  std::string qualifier;
  std::string name;

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

/// Positional reference into a materialized row. Never produced by the parser;
/// the rewriter uses it to address columns of a widened result.
struct Slot {
  std::size_t index = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct Negate {
  Box<Expr> operand;

  friend bool operator==(const Negate&, const Negate&) = default;
};

enum class BinaryOp { Add, Sub, Mul, Div };

struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;

  friend bool operator==(const Binary&, const Binary&) = default;
};

enum class AggregateFn { Sum, Count, Avg, Max, Min };

struct Aggregate {
  AggregateFn fn;
  std::optional<Box<Expr>> argument;  // empty for COUNT(*)

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct Expr {
  std::variant<Literal, ColumnRef, Slot, Negate, Binary, Aggregate> node;

  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Comparison {
  CompareOp op;
  Expr lhs;
  Expr rhs;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct Like {
  Expr value;
  Expr pattern;
  bool negated = false;

  friend bool operator==(const Like&, const Like&) = default;
};

struct And {
  Box<Predicate> lhs;
  Box<Predicate> rhs;

  friend bool operator==(const And&, const And&) = default;
};

struct Or {
  Box<Predicate> lhs;
  Box<Predicate> rhs;

  friend bool operator==(const Or&, const Or&) = default;
};

struct Predicate {
  std::variant<Comparison, Like, And, Or> node;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// A projection item. An empty `expr` denotes `*`.
struct ProjectionItem {
  std::optional<Expr> expr;
  std::optional<std::string> alias;

  bool is_star() const noexcept { return !expr.has_value(); }

  friend bool operator==(const ProjectionItem&, const ProjectionItem&) = default;
};

struct BaseTable {
  std::string name;
  std::optional<std::string> alias;

  friend bool operator==(const BaseTable&, const BaseTable&) = default;
};

struct DerivedTable {
  Box<SelectQuery> subquery;
  std::string alias;

  friend bool operator==(const DerivedTable&, const DerivedTable&) = default;
};

struct FromItem {
  std::variant<BaseTable, DerivedTable> source;

  /// Name under which the item's columns are visible at its query level.
  const std::string& visible_name() const;

  friend bool operator==(const FromItem&, const FromItem&) = default;
};

struct SelectQuery {
  std::vector<ProjectionItem> projections;
  std::vector<FromItem> from_items;
  std::optional<Predicate> where;

  friend bool operator==(const SelectQuery&, const SelectQuery&) = default;
};

struct SetClause {
  ColumnRef column;
  std::variant<Expr, Box<SelectQuery>> value;

  friend bool operator==(const SetClause&, const SetClause&) = default;
};

struct UpdateQuery {
  std::string table;
  std::vector<SetClause> set_clauses;
  std::optional<Predicate> where;

  friend bool operator==(const UpdateQuery&, const UpdateQuery&) = default;
};

using ValuesRows = std::vector<std::vector<Expr>>;

struct InsertQuery {
  std::string table;
  std::vector<std::string> columns;  // empty: every column in schema order
  std::variant<ValuesRows, Box<SelectQuery>> source;

  friend bool operator==(const InsertQuery&, const InsertQuery&) = default;
};

struct DeleteQuery {
  std::string table;
  std::optional<Predicate> where;

  friend bool operator==(const DeleteQuery&, const DeleteQuery&) = default;
};

struct Query {
  std::variant<SelectQuery, InsertQuery, UpdateQuery, DeleteQuery> statement;

  friend bool operator==(const Query&, const Query&) = default;
};

enum class QueryKind { Select, Insert, Update, Delete };

/// Kind of the outermost statement.
QueryKind classify(const Query& query) noexcept;

const char* to_string(QueryKind kind) noexcept;

/// Number of SelectQuery nodes anywhere in the tree.
std::size_t count_selects(const Query& query);
std::size_t count_selects(const SelectQuery& query);

bool contains_aggregate(const Expr& expr);

// Convenience constructors used by the rewriter and tests.
Expr make_column(std::string qualifier, std::string name);
Expr make_slot(std::size_t index);
Predicate make_and(Predicate lhs, Predicate rhs);

}  // namespace verity::sql
