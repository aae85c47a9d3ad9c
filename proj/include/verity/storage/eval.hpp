#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "verity/sql/ast.hpp"
#include "verity/storage/value.hpp"

namespace verity::storage {

/// Position of a column inside a row combination: which FROM source, which column.
struct ColumnSlot {
  std::size_t source = 0;
  std::size_t column = 0;
};

/// Name resolution for expression binding.
class Scope {
 public:
  virtual ~Scope() = default;
  /// Throws UnknownTable / UnknownColumn / AmbiguousColumn.
  virtual ColumnSlot resolve(const sql::ColumnRef& ref) const = 0;
  /// Positional `Slot` references address source 0 unless overridden.
  virtual ColumnSlot resolve_slot(std::size_t index) const { return {0, index}; }
};

/// Expression with column references resolved to slots.
struct BoundExpr {
  enum class Op { Literal, Column, Negate, Add, Sub, Mul, Div, Sum, Count, CountStar, Avg, Max, Min };
  Op op = Op::Literal;
  Value literal;
  ColumnSlot slot;
  std::vector<BoundExpr> args;

  bool is_aggregate() const noexcept { return op >= Op::Sum; }
  bool has_aggregate() const;
};

struct BoundPredicate {
  enum class Op { Eq, Ne, Lt, Le, Gt, Ge, Like, NotLike, And, Or };
  Op op = Op::Eq;
  std::vector<BoundExpr> operands;       // comparisons and LIKE
  std::vector<BoundPredicate> children;  // AND / OR
};

/// One row pointer per FROM source.
using Binding = std::span<const Row* const>;

/// Flattened list of row combinations, `width` pointers each.
struct Combos {
  std::size_t width = 0;
  std::vector<const Row*> rows;

  std::size_t size() const noexcept { return width == 0 ? 0 : rows.size() / width; }
  Binding at(std::size_t i) const { return Binding(rows.data() + i * width, width); }
};

Value literal_value(const sql::Literal& literal);

/// Throws EvalError if `allow_aggregates` is false and the expression holds an
/// aggregate, or if aggregates nest.
BoundExpr bind(const sql::Expr& expr, const Scope& scope, bool allow_aggregates);
/// Predicates never admit aggregates.
BoundPredicate bind(const sql::Predicate& predicate, const Scope& scope);

Value evaluate(const BoundExpr& expr, Binding row);
/// Evaluates over a whole set: aggregates fold every combination, bare column
/// references read the last combination (Null when the set is empty).
Value evaluate_over(const BoundExpr& expr, const Combos& combos);
/// Comparisons involving Null are false; so is LIKE / NOT LIKE over Null.
bool holds(const BoundPredicate& predicate, Binding row);

/// Highest source index referenced, or nullopt for a constant predicate.
std::optional<std::size_t> max_source(const BoundPredicate& predicate);

Value arithmetic(sql::BinaryOp op, const Value& a, const Value& b);
/// SQL LIKE with `%` (any run) and `_` (one byte); case-sensitive.
bool like_match(std::string_view value, std::string_view pattern);

}  // namespace verity::storage
