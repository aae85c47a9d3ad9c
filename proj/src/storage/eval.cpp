#include "verity/storage/eval.hpp"

#include <charconv>
#include <limits>
#include <type_traits>

#include "verity/errors.hpp"

namespace verity::storage {
namespace {

BoundExpr::Op aggregate_op(sql::AggregateFn fn, bool star) {
  switch (fn) {
    case sql::AggregateFn::Sum:
      return BoundExpr::Op::Sum;
    case sql::AggregateFn::Count:
      return star ? BoundExpr::Op::CountStar : BoundExpr::Op::Count;
    case sql::AggregateFn::Avg:
      return BoundExpr::Op::Avg;
    case sql::AggregateFn::Max:
      return BoundExpr::Op::Max;
    case sql::AggregateFn::Min:
      return BoundExpr::Op::Min;
  }
  return BoundExpr::Op::Count;
}

BoundExpr::Op binary_op(sql::BinaryOp op) {
  switch (op) {
    case sql::BinaryOp::Add:
      return BoundExpr::Op::Add;
    case sql::BinaryOp::Sub:
      return BoundExpr::Op::Sub;
    case sql::BinaryOp::Mul:
      return BoundExpr::Op::Mul;
    case sql::BinaryOp::Div:
      return BoundExpr::Op::Div;
  }
  return BoundExpr::Op::Add;
}

sql::BinaryOp to_sql(BoundExpr::Op op) {
  switch (op) {
    case BoundExpr::Op::Sub:
      return sql::BinaryOp::Sub;
    case BoundExpr::Op::Mul:
      return sql::BinaryOp::Mul;
    case BoundExpr::Op::Div:
      return sql::BinaryOp::Div;
    default:
      return sql::BinaryOp::Add;
  }
}

BoundExpr bind_impl(const sql::Expr& expr, const Scope& scope, bool allow_aggregates,
                    bool inside_aggregate) {
  return std::visit(
      [&](const auto& node) -> BoundExpr {
        using T = std::decay_t<decltype(node)>;
        BoundExpr out;
        if constexpr (std::is_same_v<T, sql::Literal>) {
          out.op = BoundExpr::Op::Literal;
          out.literal = literal_value(node);
        } else if constexpr (std::is_same_v<T, sql::ColumnRef>) {
          out.op = BoundExpr::Op::Column;
          out.slot = scope.resolve(node);
        } else if constexpr (std::is_same_v<T, sql::Slot>) {
          out.op = BoundExpr::Op::Column;
          out.slot = scope.resolve_slot(node.index);
        } else if constexpr (std::is_same_v<T, sql::Negate>) {
          out.op = BoundExpr::Op::Negate;
          out.args.push_back(bind_impl(*node.operand, scope, allow_aggregates, inside_aggregate));
        } else if constexpr (std::is_same_v<T, sql::Binary>) {
          out.op = binary_op(node.op);
          out.args.push_back(bind_impl(*node.lhs, scope, allow_aggregates, inside_aggregate));
          out.args.push_back(bind_impl(*node.rhs, scope, allow_aggregates, inside_aggregate));
        } else {
          if (!allow_aggregates) throw EvalError("aggregate not allowed here");
          if (inside_aggregate) throw EvalError("nested aggregates are not supported");
          out.op = aggregate_op(node.fn, !node.argument.has_value());
          if (node.argument) out.args.push_back(bind_impl(**node.argument, scope, true, true));
        }
        return out;
      },
      expr.node);
}

BoundPredicate::Op compare_op(sql::CompareOp op) {
  switch (op) {
    case sql::CompareOp::Eq:
      return BoundPredicate::Op::Eq;
    case sql::CompareOp::Ne:
      return BoundPredicate::Op::Ne;
    case sql::CompareOp::Lt:
      return BoundPredicate::Op::Lt;
    case sql::CompareOp::Le:
      return BoundPredicate::Op::Le;
    case sql::CompareOp::Gt:
      return BoundPredicate::Op::Gt;
    case sql::CompareOp::Ge:
      return BoundPredicate::Op::Ge;
  }
  return BoundPredicate::Op::Eq;
}

void max_source_of(const BoundExpr& e, std::optional<std::size_t>& acc) {
  if (e.op == BoundExpr::Op::Column) {
    if (!acc || e.slot.source > *acc) acc = e.slot.source;
  }
  for (const auto& a : e.args) max_source_of(a, acc);
}

void max_source_of(const BoundPredicate& p, std::optional<std::size_t>& acc) {
  for (const auto& e : p.operands) max_source_of(e, acc);
  for (const auto& c : p.children) max_source_of(c, acc);
}

Value fold_aggregate(const BoundExpr& e, const Combos& combos) {
  using Op = BoundExpr::Op;
  const std::size_t n = combos.size();
  if (e.op == Op::CountStar) return Value::integer(static_cast<std::int64_t>(n));
  const BoundExpr& arg = e.args.front();
  Value acc;
  std::int64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Value v = evaluate(arg, combos.at(i));
    if (v.is_null()) continue;
    ++count;
    switch (e.op) {
      case Op::Sum:
      case Op::Avg:
        if (!v.is_numeric()) throw EvalError("SUM/AVG over non-numeric value");
        acc = acc.is_null() ? v : arithmetic(sql::BinaryOp::Add, acc, v);
        break;
      case Op::Max:
        if (acc.is_null() || *compare_sql(v, acc) > 0) acc = std::move(v);
        break;
      case Op::Min:
        if (acc.is_null() || *compare_sql(v, acc) < 0) acc = std::move(v);
        break;
      default:
        break;
    }
  }
  switch (e.op) {
    case Op::Count:
      return Value::integer(count);
    case Op::Avg:
      if (count == 0) return Value::null();
      return Value::decimal(acc.to_decimal() / Decimal::from_integer(count));
    default:
      return acc;
  }
}

}  // namespace

bool BoundExpr::has_aggregate() const {
  if (is_aggregate()) return true;
  for (const auto& a : args) {
    if (a.has_aggregate()) return true;
  }
  return false;
}

Value literal_value(const sql::Literal& literal) {
  switch (literal.kind) {
    case sql::LiteralKind::Integer: {
      std::int64_t v = 0;
      const auto* end = literal.text.data() + literal.text.size();
      auto [ptr, ec] = std::from_chars(literal.text.data(), end, v);
      if (ec == std::errc() && ptr == end) return Value::integer(v);
      if (auto d = Decimal::parse(literal.text)) return Value::decimal(*d);
      throw EvalError("numeric literal out of range: " + literal.text);
    }
    case sql::LiteralKind::Decimal:
      if (auto d = Decimal::parse(literal.text)) return Value::decimal(*d);
      throw EvalError("bad decimal literal: " + literal.text);
    case sql::LiteralKind::String:
      return Value::text(literal.text);
    case sql::LiteralKind::Date:
      try {
        return Value::date(literal.text);
      } catch (const TypeError& e) {
        throw EvalError(e.what());
      }
    case sql::LiteralKind::Null:
      return Value::null();
  }
  return Value::null();
}

BoundExpr bind(const sql::Expr& expr, const Scope& scope, bool allow_aggregates) {
  return bind_impl(expr, scope, allow_aggregates, false);
}

BoundPredicate bind(const sql::Predicate& predicate, const Scope& scope) {
  return std::visit(
      [&](const auto& node) -> BoundPredicate {
        using T = std::decay_t<decltype(node)>;
        BoundPredicate out;
        if constexpr (std::is_same_v<T, sql::Comparison>) {
          out.op = compare_op(node.op);
          out.operands.push_back(bind(node.lhs, scope, false));
          out.operands.push_back(bind(node.rhs, scope, false));
        } else if constexpr (std::is_same_v<T, sql::Like>) {
          out.op = node.negated ? BoundPredicate::Op::NotLike : BoundPredicate::Op::Like;
          out.operands.push_back(bind(node.value, scope, false));
          out.operands.push_back(bind(node.pattern, scope, false));
        } else {
          out.op = std::is_same_v<T, sql::And> ? BoundPredicate::Op::And : BoundPredicate::Op::Or;
          out.children.push_back(bind(*node.lhs, scope));
          out.children.push_back(bind(*node.rhs, scope));
        }
        return out;
      },
      predicate.node);
}

Value arithmetic(sql::BinaryOp op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value::null();
  if (!a.is_numeric() || !b.is_numeric()) {
    throw EvalError("arithmetic on non-numeric values '" + a.to_display() + "' and '" +
                    b.to_display() + "'");
  }
  if (a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer &&
      op != sql::BinaryOp::Div) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case sql::BinaryOp::Add:
        overflow = __builtin_add_overflow(a.as_integer(), b.as_integer(), &r);
        break;
      case sql::BinaryOp::Sub:
        overflow = __builtin_sub_overflow(a.as_integer(), b.as_integer(), &r);
        break;
      case sql::BinaryOp::Mul:
        overflow = __builtin_mul_overflow(a.as_integer(), b.as_integer(), &r);
        break;
      case sql::BinaryOp::Div:
        break;
    }
    if (overflow) throw EvalError("integer overflow");
    return Value::integer(r);
  }
  const Decimal x = a.to_decimal();
  const Decimal y = b.to_decimal();
  switch (op) {
    case sql::BinaryOp::Add:
      return Value::decimal(x + y);
    case sql::BinaryOp::Sub:
      return Value::decimal(x - y);
    case sql::BinaryOp::Mul:
      return Value::decimal(x * y);
    case sql::BinaryOp::Div:
      return Value::decimal(x / y);
  }
  return Value::null();
}

Value evaluate(const BoundExpr& e, Binding row) {
  using Op = BoundExpr::Op;
  switch (e.op) {
    case Op::Literal:
      return e.literal;
    case Op::Column:
      return (*row[e.slot.source])[e.slot.column];
    case Op::Negate: {
      Value v = evaluate(e.args[0], row);
      if (v.is_null()) return v;
      if (v.kind() == Value::Kind::Integer) {
        if (v.as_integer() == std::numeric_limits<std::int64_t>::min()) {
          throw EvalError("integer overflow");
        }
        return Value::integer(-v.as_integer());
      }
      if (v.kind() == Value::Kind::Decimal) return Value::decimal(-v.as_decimal());
      throw EvalError("cannot negate '" + v.to_display() + "'");
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return arithmetic(to_sql(e.op), evaluate(e.args[0], row), evaluate(e.args[1], row));
    default:
      throw EvalError("aggregate evaluated outside an aggregate context");
  }
}

Value evaluate_over(const BoundExpr& e, const Combos& combos) {
  using Op = BoundExpr::Op;
  if (e.is_aggregate()) return fold_aggregate(e, combos);
  switch (e.op) {
    case Op::Literal:
      return e.literal;
    case Op::Column:
      if (combos.size() == 0) return Value::null();
      return evaluate(e, combos.at(combos.size() - 1));
    case Op::Negate: {
      BoundExpr lit;
      lit.literal = evaluate_over(e.args[0], combos);
      BoundExpr neg;
      neg.op = Op::Negate;
      neg.args.push_back(std::move(lit));
      return evaluate(neg, {});
    }
    default:
      return arithmetic(to_sql(e.op), evaluate_over(e.args[0], combos),
                        evaluate_over(e.args[1], combos));
  }
}

bool holds(const BoundPredicate& p, Binding row) {
  using Op = BoundPredicate::Op;
  switch (p.op) {
    case Op::And:
      return holds(p.children[0], row) && holds(p.children[1], row);
    case Op::Or:
      return holds(p.children[0], row) || holds(p.children[1], row);
    case Op::Like:
    case Op::NotLike: {
      Value v = evaluate(p.operands[0], row);
      Value pat = evaluate(p.operands[1], row);
      if (v.is_null() || pat.is_null()) return false;
      auto text_of = [](const Value& x) -> const std::string& {
        if (x.kind() == Value::Kind::Text) return x.as_text();
        if (x.kind() == Value::Kind::Date) return x.as_date();
        throw EvalError("LIKE requires text operands, got '" + x.to_display() + "'");
      };
      const bool m = like_match(text_of(v), text_of(pat));
      return p.op == Op::Like ? m : !m;
    }
    default: {
      auto cmp = compare_sql(evaluate(p.operands[0], row), evaluate(p.operands[1], row));
      if (!cmp) return false;
      switch (p.op) {
        case Op::Eq:
          return *cmp == 0;
        case Op::Ne:
          return *cmp != 0;
        case Op::Lt:
          return *cmp < 0;
        case Op::Le:
          return *cmp <= 0;
        case Op::Gt:
          return *cmp > 0;
        case Op::Ge:
          return *cmp >= 0;
        default:
          return false;
      }
    }
  }
}

std::optional<std::size_t> max_source(const BoundPredicate& predicate) {
  std::optional<std::size_t> acc;
  max_source_of(predicate, acc);
  return acc;
}

bool like_match(std::string_view value, std::string_view pattern) {
  std::size_t v = 0, p = 0;
  std::size_t star_p = std::string_view::npos, star_v = 0;
  while (v < value.size()) {
    if (p < pattern.size() && pattern[p] != '%' &&
        (pattern[p] == '_' || pattern[p] == value[v])) {
      ++v;
      ++p;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_v = v;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      v = ++star_v;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

}  // namespace verity::storage
