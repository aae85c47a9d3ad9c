#include "verity/rewrite/rewriter.hpp"

#include <map>

#include "verity/errors.hpp"
#include "verity/storage/eval.hpp"

namespace verity::rewrite {
namespace {

using sql::ColumnRef;
using sql::Expr;

struct NamedExpr {
  std::string name;
  Expr expr;  // over Slot references into the level's wide columns
};

struct Level {
  sql::SelectQuery wide;
  std::vector<std::string> exposed;  // wide output names seen by a parent
  std::vector<std::string> origin;   // base table behind each wide column
  std::vector<TableEntry> entries;
  std::vector<NamedExpr> outputs;
  bool aggregate = false;
};

// A FROM item of the level being widened.
struct Item {
  std::string visible;
  std::size_t offset = 0;
  std::vector<std::string> names;  // wide column names inside the item
  std::vector<NamedExpr> columns;  // what the original query can reference
};

Expr shift_slots(const Expr& e, std::size_t by) {
  return std::visit(
      [&](const auto& node) -> Expr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, sql::Slot>) {
          return sql::make_slot(node.index + by);
        } else if constexpr (std::is_same_v<T, sql::Negate>) {
          return Expr{sql::Negate{shift_slots(*node.operand, by)}};
        } else if constexpr (std::is_same_v<T, sql::Binary>) {
          return Expr{sql::Binary{node.op, shift_slots(*node.lhs, by), shift_slots(*node.rhs, by)}};
        } else if constexpr (std::is_same_v<T, sql::Aggregate>) {
          sql::Aggregate a{node.fn, std::nullopt};
          if (node.argument) a.argument = shift_slots(**node.argument, by);
          return Expr{std::move(a)};
        } else {
          return Expr{node};
        }
      },
      e.node);
}

class Widener {
 public:
  explicit Widener(const storage::Catalog& catalog) : catalog_(catalog) {}

  Level widen(const sql::SelectQuery& q, bool top) {
    Level level;
    std::vector<Item> items;
    std::size_t offset = 0;
    for (const auto& from : q.from_items) {
      Item item;
      item.visible = from.visible_name();
      item.offset = offset;
      if (const auto* base = std::get_if<sql::BaseTable>(&from.source)) {
        const auto& def = catalog_.at(base->name);
        for (std::size_t j = 0; j < def.columns.size(); ++j) {
          item.names.push_back(def.columns[j].name);
          item.columns.push_back({def.columns[j].name, sql::make_slot(offset + j)});
          level.origin.push_back(def.name);
        }
        level.entries.push_back({def.name, {item.visible}, offset, def.columns.size()});
      } else {
        const auto& derived = std::get<sql::DerivedTable>(from.source);
        Level inner = widen(*derived.subquery, false);
        if (inner.aggregate) {
          throw UnsupportedFeature("aggregate in derived table '" + derived.alias + "'", 0);
        }
        item.names = inner.exposed;
        for (auto& o : inner.outputs) {
          item.columns.push_back({o.name, shift_slots(o.expr, offset)});
        }
        for (auto& e : inner.entries) {
          e.alias_path.insert(e.alias_path.begin(), item.visible);
          e.first_column += offset;
          level.entries.push_back(std::move(e));
        }
        level.origin.insert(level.origin.end(), inner.origin.begin(), inner.origin.end());
        sql::FromItem widened{sql::DerivedTable{std::move(inner.wide), derived.alias}};
        level.wide.from_items.push_back(std::move(widened));
      }
      if (std::holds_alternative<sql::BaseTable>(from.source)) {
        level.wide.from_items.push_back(from);
      }
      offset += item.names.size();
      items.push_back(std::move(item));
    }

    const bool qualify = items.size() > 1;
    std::vector<ColumnRef> slot_refs;
    std::map<std::string, int> seen;
    for (const auto& item : items) {
      for (const auto& n : item.names) ++seen[n];
    }
    for (const auto& item : items) {
      for (std::size_t j = 0; j < item.names.size(); ++j) {
        const std::string& inner_name = item.names[j];
        std::string name = inner_name;
        if (!top && seen[inner_name] > 1) {
          name = item.visible + "__" + level.origin[item.offset + j] + "__" + inner_name;
        }
        sql::ProjectionItem p{sql::make_column(qualify ? item.visible : "", inner_name),
                              std::nullopt};
        if (name != inner_name) p.alias = name;
        level.wide.projections.push_back(std::move(p));
        slot_refs.push_back(ColumnRef{qualify ? item.visible : "", inner_name});
        level.exposed.push_back(std::move(name));
      }
    }

    if (q.where) level.wide.where = to_columns(substitute(*q.where, items), slot_refs);

    for (const auto& p : q.projections) {
      if (p.is_star()) {
        for (const auto& item : items) {
          for (const auto& c : item.columns) level.outputs.push_back(c);
        }
        continue;
      }
      Expr e = substitute(*p.expr, items);
      std::string name;
      if (p.alias) {
        name = *p.alias;
      } else if (const auto* ref = std::get_if<ColumnRef>(&p.expr->node)) {
        name = ref->name;
      }
      level.aggregate = level.aggregate || sql::contains_aggregate(e);
      level.outputs.push_back({std::move(name), std::move(e)});
    }
    return level;
  }

 private:
  static std::string display(const ColumnRef& ref) {
    return ref.qualifier.empty() ? ref.name : ref.qualifier + "." + ref.name;
  }

  // Mirrors the executor's name resolution against the original FROM items.
  const Expr& resolve(const ColumnRef& ref, const std::vector<Item>& items) const {
    const Expr* found = nullptr;
    bool qualifier_seen = false;
    for (const auto& item : items) {
      if (!ref.qualifier.empty()) {
        if (item.visible != ref.qualifier) continue;
        qualifier_seen = true;
      }
      for (const auto& c : item.columns) {
        if (c.name != ref.name) continue;
        if (found) throw AmbiguousColumn("column reference '" + display(ref) + "' is ambiguous");
        found = &c.expr;
      }
    }
    if (!ref.qualifier.empty() && !qualifier_seen) {
      throw UnknownTable("unknown table or alias '" + ref.qualifier + "'");
    }
    if (!found) throw UnknownColumn("unknown column '" + display(ref) + "'");
    return *found;
  }

  Expr substitute(const Expr& e, const std::vector<Item>& items) const {
    return std::visit(
        [&](const auto& node) -> Expr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ColumnRef>) {
            return resolve(node, items);
          } else if constexpr (std::is_same_v<T, sql::Slot>) {
            throw EvalError("positional reference in a user query");
          } else if constexpr (std::is_same_v<T, sql::Negate>) {
            return Expr{sql::Negate{substitute(*node.operand, items)}};
          } else if constexpr (std::is_same_v<T, sql::Binary>) {
            return Expr{sql::Binary{node.op, substitute(*node.lhs, items),
                                    substitute(*node.rhs, items)}};
          } else if constexpr (std::is_same_v<T, sql::Aggregate>) {
            sql::Aggregate a{node.fn, std::nullopt};
            if (node.argument) a.argument = substitute(**node.argument, items);
            return Expr{std::move(a)};
          } else {
            return Expr{node};
          }
        },
        e.node);
  }

  sql::Predicate substitute(const sql::Predicate& p, const std::vector<Item>& items) const {
    return std::visit(
        [&](const auto& node) -> sql::Predicate {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, sql::Comparison>) {
            return {sql::Comparison{node.op, substitute(node.lhs, items),
                                    substitute(node.rhs, items)}};
          } else if constexpr (std::is_same_v<T, sql::Like>) {
            return {sql::Like{substitute(node.value, items), substitute(node.pattern, items),
                              node.negated}};
          } else if constexpr (std::is_same_v<T, sql::And>) {
            return {sql::And{substitute(*node.lhs, items), substitute(*node.rhs, items)}};
          } else {
            return {sql::Or{substitute(*node.lhs, items), substitute(*node.rhs, items)}};
          }
        },
        p.node);
  }

  static Expr to_columns(const Expr& e, const std::vector<ColumnRef>& refs) {
    return std::visit(
        [&](const auto& node) -> Expr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, sql::Slot>) {
            return Expr{refs.at(node.index)};
          } else if constexpr (std::is_same_v<T, sql::Negate>) {
            return Expr{sql::Negate{to_columns(*node.operand, refs)}};
          } else if constexpr (std::is_same_v<T, sql::Binary>) {
            return Expr{sql::Binary{node.op, to_columns(*node.lhs, refs),
                                    to_columns(*node.rhs, refs)}};
          } else if constexpr (std::is_same_v<T, sql::Aggregate>) {
            sql::Aggregate a{node.fn, std::nullopt};
            if (node.argument) a.argument = to_columns(**node.argument, refs);
            return Expr{std::move(a)};
          } else {
            return Expr{node};
          }
        },
        e.node);
  }

  static sql::Predicate to_columns(const sql::Predicate& p, const std::vector<ColumnRef>& refs) {
    return std::visit(
        [&](const auto& node) -> sql::Predicate {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, sql::Comparison>) {
            return {sql::Comparison{node.op, to_columns(node.lhs, refs),
                                    to_columns(node.rhs, refs)}};
          } else if constexpr (std::is_same_v<T, sql::Like>) {
            return {sql::Like{to_columns(node.value, refs), to_columns(node.pattern, refs),
                              node.negated}};
          } else if constexpr (std::is_same_v<T, sql::And>) {
            return {sql::And{to_columns(*node.lhs, refs), to_columns(*node.rhs, refs)}};
          } else {
            return {sql::Or{to_columns(*node.lhs, refs), to_columns(*node.rhs, refs)}};
          }
        },
        p.node);
  }

  const storage::Catalog& catalog_;
};

class WideScope : public storage::Scope {
 public:
  storage::ColumnSlot resolve(const ColumnRef& ref) const override {
    throw UnknownColumn("unresolved column '" + ref.name + "' in rewritten projection");
  }
};

}  // namespace

RewrittenSelect change_projection(const sql::SelectQuery& query, const storage::Catalog& catalog) {
  Level level = Widener(catalog).widen(query, true);
  RewrittenSelect out;
  out.wide_arity = level.exposed.size();
  out.wide_query = std::move(level.wide);
  out.table_list = std::move(level.entries);
  out.aggregate = level.aggregate;
  for (auto& o : level.outputs) out.original_projection.push_back({o.name, std::move(o.expr)});
  return out;
}

storage::Tuple tuples_of(const storage::Row& wide_row, const TableEntry& entry) {
  const auto first = wide_row.begin() + static_cast<std::ptrdiff_t>(entry.first_column);
  return {entry.table, storage::Row(first, first + static_cast<std::ptrdiff_t>(entry.column_count))};
}

std::vector<storage::Row> project_results(const std::vector<storage::Row>& wide_rows,
                                          const RewrittenSelect& rw) {
  WideScope scope;
  std::vector<storage::BoundExpr> exprs;
  for (const auto& o : rw.original_projection) exprs.push_back(storage::bind(o.expr, scope, true));

  storage::Combos combos;
  combos.width = 1;
  for (const auto& r : wide_rows) combos.rows.push_back(&r);

  std::vector<storage::Row> out;
  if (rw.aggregate) {
    storage::Row row;
    for (const auto& e : exprs) row.push_back(storage::evaluate_over(e, combos));
    out.push_back(std::move(row));
    return out;
  }
  out.reserve(wide_rows.size());
  for (std::size_t i = 0; i < combos.size(); ++i) {
    storage::Row row;
    row.reserve(exprs.size());
    for (const auto& e : exprs) row.push_back(storage::evaluate(e, combos.at(i)));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> output_names(const RewrittenSelect& rw) {
  std::vector<std::string> names;
  for (const auto& o : rw.original_projection) names.push_back(o.name);
  return names;
}

}  // namespace verity::rewrite
