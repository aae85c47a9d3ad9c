#include <string>
#include <type_traits>

#include "verity/sql/parser.hpp"

namespace verity::sql {
namespace {

std::string quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  }
  return 3;
}

const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
      return " + ";
    case BinaryOp::Sub:
      return " - ";
    case BinaryOp::Mul:
      return " * ";
    case BinaryOp::Div:
      return " / ";
  }
  return " ? ";
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq:
      return " = ";
    case CompareOp::Ne:
      return " <> ";
    case CompareOp::Lt:
      return " < ";
    case CompareOp::Le:
      return " <= ";
    case CompareOp::Gt:
      return " > ";
    case CompareOp::Ge:
      return " >= ";
  }
  return " ? ";
}

const char* fn_text(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::Sum:
      return "SUM";
    case AggregateFn::Count:
      return "COUNT";
    case AggregateFn::Avg:
      return "AVG";
    case AggregateFn::Max:
      return "MAX";
    case AggregateFn::Min:
      return "MIN";
  }
  return "?";
}

std::string render_expr(const Expr& e);

std::string wrap_if(const Expr& e, bool wrap) {
  return wrap ? "(" + render_expr(e) + ")" : render_expr(e);
}

std::string render_expr(const Expr& e) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Literal>) {
          switch (node.kind) {
            case LiteralKind::Integer:
            case LiteralKind::Decimal:
              return node.text;
            case LiteralKind::String:
              return quote(node.text);
            case LiteralKind::Date:
              return "DATE " + quote(node.text);
            case LiteralKind::Null:
              return "NULL";
          }
          return "";
        } else if constexpr (std::is_same_v<T, ColumnRef>) {
          return node.qualifier.empty() ? node.name : node.qualifier + "." + node.name;
        } else if constexpr (std::is_same_v<T, Slot>) {
          return "$" + std::to_string(node.index);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "-" + wrap_if(*node.operand, precedence(*node.operand) < 3 ||
                                                  std::holds_alternative<Negate>(node.operand->node));
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int mine = precedence(e);
          return wrap_if(*node.lhs, precedence(*node.lhs) < mine) + op_text(node.op) +
                 wrap_if(*node.rhs, precedence(*node.rhs) <= mine);
        } else {
          std::string out = fn_text(node.fn);
          out += "(";
          out += node.argument ? render_expr(**node.argument) : std::string("*");
          out += ")";
          return out;
        }
      },
      e.node);
}

std::string render_pred(const Predicate& p);

std::string render_pred(const Predicate& p) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          return render_expr(node.lhs) + op_text(node.op) + render_expr(node.rhs);
        } else if constexpr (std::is_same_v<T, Like>) {
          return render_expr(node.value) + (node.negated ? " NOT LIKE " : " LIKE ") +
                 render_expr(node.pattern);
        } else if constexpr (std::is_same_v<T, And>) {
          const bool wrap_lhs = std::holds_alternative<Or>(node.lhs->node);
          const bool wrap_rhs = std::holds_alternative<Or>(node.rhs->node) ||
                                std::holds_alternative<And>(node.rhs->node);
          std::string l = render_pred(*node.lhs);
          std::string r = render_pred(*node.rhs);
          return (wrap_lhs ? "(" + l + ")" : l) + " AND " + (wrap_rhs ? "(" + r + ")" : r);
        } else {
          const bool wrap_rhs = std::holds_alternative<Or>(node.rhs->node);
          std::string r = render_pred(*node.rhs);
          return render_pred(*node.lhs) + " OR " + (wrap_rhs ? "(" + r + ")" : r);
        }
      },
      p.node);
}

std::string render_select(const SelectQuery& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.projections.size(); ++i) {
    if (i) out += ", ";
    const auto& item = q.projections[i];
    if (item.is_star()) {
      out += "*";
      continue;
    }
    out += render_expr(*item.expr);
    if (item.alias) out += " AS " + *item.alias;
  }
  out += " FROM ";
  for (std::size_t i = 0; i < q.from_items.size(); ++i) {
    if (i) out += ", ";
    const auto& item = q.from_items[i];
    if (const auto* base = std::get_if<BaseTable>(&item.source)) {
      out += base->name;
      if (base->alias) out += " AS " + *base->alias;
    } else {
      const auto& derived = std::get<DerivedTable>(item.source);
      out += "(" + render_select(*derived.subquery) + ") AS " + derived.alias;
    }
  }
  if (q.where) out += " WHERE " + render_pred(*q.where);
  return out;
}

}  // namespace

std::string render(const Expr& expr) { return render_expr(expr); }
std::string render(const Predicate& predicate) { return render_pred(predicate); }
std::string render(const SelectQuery& query) { return render_select(query); }

std::string render(const Query& query) {
  return std::visit(
      [](const auto& stmt) -> std::string {
        using T = std::decay_t<decltype(stmt)>;
        if constexpr (std::is_same_v<T, SelectQuery>) {
          return render_select(stmt);
        } else if constexpr (std::is_same_v<T, InsertQuery>) {
          std::string out = "INSERT INTO " + stmt.table;
          if (!stmt.columns.empty()) {
            out += " (";
            for (std::size_t i = 0; i < stmt.columns.size(); ++i) {
              if (i) out += ", ";
              out += stmt.columns[i];
            }
            out += ")";
          }
          if (const auto* rows = std::get_if<ValuesRows>(&stmt.source)) {
            out += " VALUES ";
            for (std::size_t r = 0; r < rows->size(); ++r) {
              if (r) out += ", ";
              out += "(";
              for (std::size_t i = 0; i < (*rows)[r].size(); ++i) {
                if (i) out += ", ";
                out += render_expr((*rows)[r][i]);
              }
              out += ")";
            }
          } else {
            out += " " + render_select(*std::get<Box<SelectQuery>>(stmt.source));
          }
          return out;
        } else if constexpr (std::is_same_v<T, UpdateQuery>) {
          std::string out = "UPDATE " + stmt.table + " SET ";
          for (std::size_t i = 0; i < stmt.set_clauses.size(); ++i) {
            if (i) out += ", ";
            const auto& clause = stmt.set_clauses[i];
            out += render_expr(Expr{clause.column}) + " = ";
            if (const auto* e = std::get_if<Expr>(&clause.value)) {
              out += render_expr(*e);
            } else {
              out += "(" + render_select(*std::get<Box<SelectQuery>>(clause.value)) + ")";
            }
          }
          if (stmt.where) out += " WHERE " + render_pred(*stmt.where);
          return out;
        } else {
          std::string out = "DELETE FROM " + stmt.table;
          if (stmt.where) out += " WHERE " + render_pred(*stmt.where);
          return out;
        }
      },
      query.statement);
}

}  // namespace verity::sql
