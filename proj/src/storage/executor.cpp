#include <algorithm>
#include <memory>

#include "verity/errors.hpp"
#include "verity/storage/database.hpp"
#include "verity/storage/eval.hpp"

namespace verity::storage {
namespace {

// A materialized FROM item. Base tables borrow rows from storage; derived
// tables own theirs.
struct Source {
  std::string name;
  std::vector<std::string> columns;
  std::vector<const Row*> rows;
  std::shared_ptr<std::vector<Row>> owned;
};

class SourceScope : public Scope {
 public:
  explicit SourceScope(const std::vector<Source>& sources) : sources_(sources) {
    std::size_t offset = 0;
    for (const auto& s : sources_) {
      offsets_.push_back(offset);
      offset += s.columns.size();
    }
    width_ = offset;
  }

  ColumnSlot resolve(const sql::ColumnRef& ref) const override {
    std::optional<ColumnSlot> found;
    bool qualifier_seen = false;
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      if (!ref.qualifier.empty()) {
        if (sources_[s].name != ref.qualifier) continue;
        qualifier_seen = true;
      }
      const auto& cols = sources_[s].columns;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] != ref.name) continue;
        if (found) throw AmbiguousColumn("column reference '" + display(ref) + "' is ambiguous");
        found = ColumnSlot{s, c};
      }
    }
    if (!ref.qualifier.empty() && !qualifier_seen) {
      throw UnknownTable("unknown table or alias '" + ref.qualifier + "'");
    }
    if (!found) throw UnknownColumn("unknown column '" + display(ref) + "'");
    return *found;
  }

  ColumnSlot resolve_slot(std::size_t index) const override {
    if (index >= width_) throw UnknownColumn("slot $" + std::to_string(index) + " out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
    const std::size_t s = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {s, index - offsets_[s]};
  }

 private:
  static std::string display(const sql::ColumnRef& ref) {
    return ref.qualifier.empty() ? ref.name : ref.qualifier + "." + ref.name;
  }

  const std::vector<Source>& sources_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

void split_conjuncts(const sql::Predicate& p, std::vector<const sql::Predicate*>& out) {
  if (const auto* a = std::get_if<sql::And>(&p.node)) {
    split_conjuncts(*a->lhs, out);
    split_conjuncts(*a->rhs, out);
    return;
  }
  out.push_back(&p);
}

struct Output {
  std::string name;
  BoundExpr expr;
};

class Executor {
 public:
  explicit Executor(const Database& db) : db_(db) {}

  ResultSet run(const sql::SelectQuery& q) {
    if (q.from_items.empty()) throw EvalError("SELECT without FROM");
    std::vector<Source> sources;
    sources.reserve(q.from_items.size());
    for (const auto& item : q.from_items) sources.push_back(materialize(item));
    for (std::size_t i = 0; i < sources.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (sources[i].name == sources[j].name) {
          throw AmbiguousColumn("table name '" + sources[i].name + "' appears twice in FROM");
        }
      }
    }
    SourceScope scope(sources);

    std::vector<std::vector<BoundPredicate>> filters(sources.size());
    if (q.where) {
      std::vector<const sql::Predicate*> conjuncts;
      split_conjuncts(*q.where, conjuncts);
      for (const auto* c : conjuncts) {
        BoundPredicate bound = bind(*c, scope);
        filters[max_source(bound).value_or(0)].push_back(std::move(bound));
      }
    }

    std::vector<Output> outputs;
    bool aggregate = false;
    for (const auto& item : q.projections) {
      if (item.is_star()) {
        for (std::size_t s = 0; s < sources.size(); ++s) {
          for (std::size_t c = 0; c < sources[s].columns.size(); ++c) {
            BoundExpr e;
            e.op = BoundExpr::Op::Column;
            e.slot = {s, c};
            outputs.push_back({sources[s].columns[c], std::move(e)});
          }
        }
        continue;
      }
      BoundExpr e = bind(*item.expr, scope, true);
      aggregate = aggregate || e.has_aggregate();
      std::string name;
      if (item.alias) {
        name = *item.alias;
      } else if (const auto* ref = std::get_if<sql::ColumnRef>(&item.expr->node)) {
        name = ref->name;
      } else if (std::holds_alternative<sql::Slot>(item.expr->node)) {
        const ColumnSlot slot = e.slot;
        name = sources[slot.source].columns[slot.column];
      }
      outputs.push_back({std::move(name), std::move(e)});
    }

    Combos combos;
    combos.width = sources.size();
    std::vector<const Row*> binding(sources.size(), nullptr);
    loop(sources, filters, 0, binding, combos);

    ResultSet result;
    for (const auto& o : outputs) result.columns.push_back(o.name);
    if (aggregate) {
      Row row;
      row.reserve(outputs.size());
      for (const auto& o : outputs) row.push_back(evaluate_over(o.expr, combos));
      result.rows.push_back(std::move(row));
      return result;
    }
    result.rows.reserve(combos.size());
    for (std::size_t i = 0; i < combos.size(); ++i) {
      const Binding b = combos.at(i);
      Row row;
      row.reserve(outputs.size());
      for (const auto& o : outputs) row.push_back(evaluate(o.expr, b));
      result.rows.push_back(std::move(row));
    }
    return result;
  }

 private:
  Source materialize(const sql::FromItem& item) {
    Source s;
    s.name = item.visible_name();
    if (const auto* base = std::get_if<sql::BaseTable>(&item.source)) {
      const Table& t = db_.table(base->name);
      for (const auto& c : t.def().columns) s.columns.push_back(c.name);
      s.rows.reserve(t.size());
      for (const auto& [key, row] : t.rows()) s.rows.push_back(&row);
      return s;
    }
    const auto& derived = std::get<sql::DerivedTable>(item.source);
    ResultSet inner = Executor(db_).run(*derived.subquery);
    s.columns = std::move(inner.columns);
    s.owned = std::make_shared<std::vector<Row>>(std::move(inner.rows));
    s.rows.reserve(s.owned->size());
    for (const auto& row : *s.owned) s.rows.push_back(&row);
    return s;
  }

  void loop(const std::vector<Source>& sources,
            const std::vector<std::vector<BoundPredicate>>& filters, std::size_t level,
            std::vector<const Row*>& binding, Combos& out) {
    const Binding view(binding.data(), binding.size());
    for (const Row* row : sources[level].rows) {
      binding[level] = row;
      bool pass = true;
      for (const auto& f : filters[level]) {
        if (!holds(f, view)) {
          pass = false;
          break;
        }
      }
      if (!pass) continue;
      if (level + 1 == sources.size()) {
        out.rows.insert(out.rows.end(), binding.begin(), binding.end());
      } else {
        loop(sources, filters, level + 1, binding, out);
      }
    }
    binding[level] = nullptr;
  }

  const Database& db_;
};

}  // namespace

ResultSet Database::exec_select(const sql::SelectQuery& query) const {
  return Executor(*this).run(query);
}

}  // namespace verity::storage
