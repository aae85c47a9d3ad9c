#include "verity/sql/ast.hpp"

#include <type_traits>

namespace verity::sql {

const std::string& FromItem::visible_name() const {
  if (const auto* base = std::get_if<BaseTable>(&source)) {
    return base->alias ? *base->alias : base->name;
  }
  return std::get<DerivedTable>(source).alias;
}

QueryKind classify(const Query& query) noexcept {
  return static_cast<QueryKind>(query.statement.index());
}

const char* to_string(QueryKind kind) noexcept {
  switch (kind) {
    case QueryKind::Select:
      return "SELECT";
    case QueryKind::Insert:
      return "INSERT";
    case QueryKind::Update:
      return "UPDATE";
    case QueryKind::Delete:
      return "DELETE";
  }
  return "?";
}

std::size_t count_selects(const SelectQuery& query) {
  std::size_t n = 1;
  for (const auto& item : query.from_items) {
    if (const auto* derived = std::get_if<DerivedTable>(&item.source)) {
      n += count_selects(*derived->subquery);
    }
  }
  return n;
}

std::size_t count_selects(const Query& query) {
  return std::visit(
      [](const auto& stmt) -> std::size_t {
        using T = std::decay_t<decltype(stmt)>;
        if constexpr (std::is_same_v<T, SelectQuery>) {
          return count_selects(stmt);
        } else if constexpr (std::is_same_v<T, InsertQuery>) {
          if (const auto* sub = std::get_if<Box<SelectQuery>>(&stmt.source)) {
            return count_selects(**sub);
          }
          return 0;
        } else if constexpr (std::is_same_v<T, UpdateQuery>) {
          std::size_t n = 0;
          for (const auto& clause : stmt.set_clauses) {
            if (const auto* sub = std::get_if<Box<SelectQuery>>(&clause.value)) {
              n += count_selects(**sub);
            }
          }
          return n;
        } else {
          return 0;
        }
      },
      query.statement);
}

bool contains_aggregate(const Expr& expr) {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Aggregate>) {
          return true;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return contains_aggregate(*node.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return contains_aggregate(*node.lhs) || contains_aggregate(*node.rhs);
        } else {
          return false;
        }
      },
      expr.node);
}

Expr make_column(std::string qualifier, std::string name) {
  return Expr{ColumnRef{std::move(qualifier), std::move(name)}};
}

Expr make_slot(std::size_t index) { return Expr{Slot{index}}; }

Predicate make_and(Predicate lhs, Predicate rhs) {
  return Predicate{And{std::move(lhs), std::move(rhs)}};
}

}  // namespace verity::sql
