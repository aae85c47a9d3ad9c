#include "verity/verifier/verifier.hpp"

#include <ctime>
#include <fstream>
#include <set>

#include "verity/fingerprint/fingerprint.hpp"
#include "verity/rewrite/rewriter.hpp"
#include "verity/sql/parser.hpp"
#include "verity/storage/eval.hpp"

namespace verity::verifier {

using storage::Row;
using storage::TableDef;

namespace {

using SteadyClock = std::chrono::steady_clock;

class PhaseTimer {
 public:
  explicit PhaseTimer(std::chrono::nanoseconds& slot) : slot_(slot), start_(SteadyClock::now()) {}
  ~PhaseTimer() { slot_ += SteadyClock::now() - start_; }
  PhaseTimer(const PhaseTimer&) = delete;
  PhaseTimer& operator=(const PhaseTimer&) = delete;

 private:
  std::chrono::nanoseconds& slot_;
  SteadyClock::time_point start_;
};

// Resolves column references against a single row of one table.
class RowScope : public storage::Scope {
 public:
  explicit RowScope(const TableDef& def) : def_(def) {}

  storage::ColumnSlot resolve(const sql::ColumnRef& ref) const override {
    if (!ref.qualifier.empty() && ref.qualifier != def_.name) {
      throw UnknownTable("unknown table or alias '" + ref.qualifier + "'");
    }
    return {0, def_.require_column(ref.name)};
  }

 private:
  const TableDef& def_;
};

// Rejects every column reference: VALUES rows are constants.
class EmptyScope : public storage::Scope {
 public:
  storage::ColumnSlot resolve(const sql::ColumnRef& ref) const override {
    throw UnknownColumn("column reference '" + ref.name + "' in VALUES");
  }
};

storage::Value constant(const sql::Expr& expr) {
  const EmptyScope scope;
  const storage::BoundExpr bound = storage::bind(expr, scope, false);
  return storage::evaluate(bound, storage::Binding{});
}

sql::SelectQuery select_star(const std::string& table, const std::optional<sql::Predicate>& where) {
  sql::SelectQuery q;
  q.projections.push_back(sql::ProjectionItem{});
  q.from_items.push_back(sql::FromItem{sql::BaseTable{table, std::nullopt}});
  q.where = where;
  return q;
}

bool reads_table(const sql::SelectQuery& q, const std::string& table) {
  for (const auto& item : q.from_items) {
    if (const auto* base = std::get_if<sql::BaseTable>(&item.source)) {
      if (base->name == table) return true;
    } else if (reads_table(*std::get<sql::DerivedTable>(item.source).subquery, table)) {
      return true;
    }
  }
  return false;
}

// Alert for a tuple whose digest disagrees with the ledger record, if any.
std::optional<TamperAlert> judge(const fp::TupleDigest& d, const std::string& table,
                                 const std::optional<ledger::FingerprintRecord>& record) {
  TamperAlert alert{d.row_id, table, Expectation::Mismatch, std::nullopt, d.fingerprint, {}, 0};
  if (!record) {
    alert.expectation = Expectation::Absent;
  } else if (record->status == ledger::RecordStatus::Deleted) {
    alert.expectation = Expectation::Deleted;
    alert.expected = record->current;
  } else if (record->current != d.fingerprint) {
    alert.expected = record->current;
  } else {
    return std::nullopt;
  }
  return alert;
}

std::string hash_text(std::string_view text) { return fp::to_hex(fp::sha256(text)); }

}  // namespace

const char* to_string(Outcome outcome) noexcept {
  return outcome == Outcome::Verified ? "Verified" : "Tampered";
}

TamperDetected::TamperDetected(VerificationReport report)
    : Error("tampering detected in " + std::to_string(report.alerts.size()) + " tuple(s)"),
      report_(std::move(report)) {}

std::string iso_timestamp(std::int64_t seconds) {
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_alert(const TamperAlert& a) {
  std::string expected;
  switch (a.expectation) {
    case Expectation::Mismatch:
      expected = a.expected->hex();
      break;
    case Expectation::Absent:
      expected = "ABSENT";
      break;
    case Expectation::Deleted:
      expected = "DELETED";
      break;
  }
  return iso_timestamp(a.timestamp) + '\t' + a.table + '\t' + a.row_id.hex() + '\t' + expected +
         '\t' + a.computed.hex();
}

struct Verifier::Session {
  VerificationReport report;
  std::set<RowId> seen;
  std::set<std::string> tables;
  std::string query_hash;
  std::int64_t now = 0;
};

Verifier::Verifier(storage::Database& db, ledger::Ledger& ledger, VerifierOptions options)
    : db_(db), ledger_(ledger), options_(std::move(options)) {}

std::map<std::string, std::int64_t, std::less<>> Verifier::bootstrap() {
  std::lock_guard lock(mutex_);
  std::map<std::string, std::int64_t, std::less<>> counts;
  std::vector<ledger::TxDraft> drafts;
  for (const auto& def : db_.catalog().tables()) {
    const auto& table = db_.table(def.name);
    for (const auto& [key, row] : table.rows()) {
      const auto d = fp::digest_tuple(def, row);
      drafts.push_back(ledger::TxDraft::put(d.row_id, def.name, d.fingerprint));
    }
    counts[def.name] = static_cast<std::int64_t>(table.size());
  }
  for (const auto& [table, n] : counts) {
    try {
      ledger_.get_row_count(table);
    } catch (const UnknownTable&) {
      continue;
    }
    throw DuplicateRowId(0, drafts.empty() ? table : drafts.front().row_id->hex());
  }
  for (const auto& [table, n] : counts) drafts.push_back(ledger::TxDraft::adjust_row_count(table, n));
  if (!drafts.empty()) ledger_.submit(drafts, options_.principal);
  return counts;
}

ProcessResult Verifier::process(std::string_view sql) { return process(sql, options_.principal); }

ProcessResult Verifier::process(std::string_view text, std::string_view principal) {
  std::lock_guard lock(mutex_);
  Session s;
  s.query_hash = hash_text(text);
  s.now = options_.clock();
  sql::Query query;
  {
    PhaseTimer t(s.report.elapsed.parse);
    query = sql::parse(text);
  }
  return dispatch(query, principal, s);
}

ProcessResult Verifier::dispatch(const sql::Query& query, std::string_view principal, Session& s) {
  s.report.query_kind = sql::classify(query);
  return std::visit(
      [&](const auto& q) -> ProcessResult {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, sql::SelectQuery>) {
          return run_select(q, s);
        } else if constexpr (std::is_same_v<T, sql::UpdateQuery>) {
          return run_update(q, principal, s);
        } else if constexpr (std::is_same_v<T, sql::InsertQuery>) {
          return run_insert(q, principal, s);
        } else {
          return run_delete(q, principal, s);
        }
      },
      query.statement);
}

ProcessResult Verifier::verified_select(const sql::SelectQuery& query) {
  sql::Query q{query};
  return process(sql::render(q));
}

ProcessResult Verifier::verified_update(const sql::UpdateQuery& query, std::string_view principal) {
  return process(sql::render(sql::Query{query}), principal);
}

ProcessResult Verifier::verified_insert(const sql::InsertQuery& query, std::string_view principal) {
  return process(sql::render(sql::Query{query}), principal);
}

ProcessResult Verifier::verified_delete(const sql::DeleteQuery& query, std::string_view principal) {
  return process(sql::render(sql::Query{query}), principal);
}

std::vector<Row> Verifier::select_rows(const sql::SelectQuery& query, Session& s,
                                       std::vector<std::string>* columns) {
  std::optional<rewrite::RewrittenSelect> rw;
  {
    PhaseTimer t(s.report.elapsed.rewrite);
    rw = rewrite::change_projection(query, db_.catalog());
  }
  std::vector<Row> wide;
  {
    PhaseTimer t(s.report.elapsed.db_exec);
    wide = db_.exec_select(rw->wide_query).rows;
  }
  for (const auto& entry : rw->table_list) s.tables.insert(entry.table);
  for (const auto& row : wide) {
    for (const auto& entry : rw->table_list) check_tuple(rewrite::tuples_of(row, entry), s);
  }
  raise_if_tampered(s);
  PhaseTimer t(s.report.elapsed.db_exec);
  if (columns) *columns = rewrite::output_names(*rw);
  return rewrite::project_results(wide, *rw);
}

void Verifier::check_tuple(const storage::Tuple& tuple, Session& s) {
  const TableDef& def = db_.catalog().at(tuple.table);
  const auto d = fp::digest_tuple(def, tuple.values);
  if (!s.seen.insert(d.row_id).second) return;
  ++s.report.tuples_checked;
  std::optional<TamperAlert> alert;
  {
    PhaseTimer t(s.report.elapsed.ledger_lookup);
    alert = judge(d, def.name, ledger_.get_current(d.row_id));
  }
  if (alert) {
    alert->query_hash = s.query_hash;
    alert->timestamp = s.now;
    s.report.alerts.push_back(std::move(*alert));
  }
}

void Verifier::raise_if_tampered(Session& s) {
  if (s.report.alerts.empty()) return;
  s.report.outcome = Outcome::Tampered;
  s.report.tables_touched.assign(s.tables.begin(), s.tables.end());
  log_alerts(s.report.alerts);
  throw TamperDetected(s.report);
}

std::vector<Row> Verifier::fetch_old_rows(const std::string& table,
                                          const std::optional<sql::Predicate>& where, Session& s) {
  return select_rows(select_star(table, where), s, nullptr);
}

std::optional<std::uint64_t> Verifier::commit(const std::vector<ledger::TxDraft>& drafts,
                                              std::string_view principal, Session& s) {
  if (drafts.empty()) return std::nullopt;
  PhaseTimer t(s.report.elapsed.ledger_commit);
  const ledger::Block block = ledger_.submit(drafts, principal);
  s.report.ledger_txs_committed += block.txs.size();
  return block.height;
}

ProcessResult Verifier::finish(ProcessResult result, Session& s) {
  s.report.tables_touched.assign(s.tables.begin(), s.tables.end());
  result.report = std::move(s.report);
  return result;
}

ProcessResult Verifier::run_select(const sql::SelectQuery& query, Session& s) {
  ProcessResult result;
  result.rows = select_rows(query, s, &result.columns);
  return finish(std::move(result), s);
}

ProcessResult Verifier::run_update(const sql::UpdateQuery& query, std::string_view principal,
                                   Session& s) {
  const TableDef& def = db_.catalog().at(query.table);
  s.tables.insert(def.name);

  // Resolve SET targets and evaluate scalar subqueries through the verified path.
  struct Assignment {
    std::size_t column;
    std::optional<storage::BoundExpr> expr;
    storage::Value scalar;
  };
  const RowScope scope(def);
  std::vector<Assignment> assignments;
  for (const auto& clause : query.set_clauses) {
    Assignment a{scope.resolve(clause.column).column, std::nullopt, {}};
    if (def.is_pk_column(a.column)) {
      throw PkUpdateUnsupported("cannot SET primary-key column '" + clause.column.name + "'");
    }
    if (const auto* expr = std::get_if<sql::Expr>(&clause.value)) {
      a.expr = storage::bind(*expr, scope, false);
    } else {
      const auto& sub = *std::get<sql::Box<sql::SelectQuery>>(clause.value);
      std::vector<std::string> columns;
      const auto rows = select_rows(sub, s, &columns);
      if (rows.size() != 1 || columns.size() != 1) {
        throw NonScalarSubquery("SET subquery for '" + clause.column.name + "' returned " +
                                std::to_string(rows.size()) + " row(s) of " +
                                std::to_string(columns.size()) + " column(s)");
      }
      a.scalar = rows[0][0];
    }
    assignments.push_back(std::move(a));
  }

  const auto old_rows = fetch_old_rows(def.name, query.where, s);

  std::vector<std::pair<Row, Row>> changes;  // key, new row
  std::vector<ledger::TxDraft> drafts;
  for (const auto& old : old_rows) {
    Row next = old;
    const Row* binding[] = {&old};
    for (const auto& a : assignments) {
      next[a.column] = a.expr ? storage::evaluate(*a.expr, storage::Binding(binding, 1)) : a.scalar;
    }
    next = db_.validate_row(def, next);
    const auto before = fp::digest_tuple(def, old);
    const auto after = fp::digest_tuple(def, next);
    drafts.push_back(
        ledger::TxDraft::update(before.row_id, def.name, before.fingerprint, after.fingerprint));
    changes.emplace_back(def.key_of(old), std::move(next));
  }

  ProcessResult result;
  result.block_height = commit(drafts, principal, s);
  {
    PhaseTimer t(s.report.elapsed.db_exec);
    for (const auto& [key, row] : changes) db_.apply_row_update(def.name, key, row);
  }
  result.rows_affected = changes.size();
  s.report.tuples_mutated = changes.size();
  return finish(std::move(result), s);
}

ProcessResult Verifier::run_insert(const sql::InsertQuery& query, std::string_view principal,
                                   Session& s) {
  const TableDef& def = db_.catalog().at(query.table);
  s.tables.insert(def.name);

  std::vector<std::size_t> targets;
  if (query.columns.empty()) {
    for (std::size_t i = 0; i < def.columns.size(); ++i) targets.push_back(i);
  } else {
    for (const auto& name : query.columns) {
      const std::size_t index = def.require_column(name);
      for (const std::size_t seen : targets) {
        if (seen == index) throw DuplicateColumn("column '" + name + "' listed twice");
      }
      targets.push_back(index);
    }
  }

  std::vector<Row> source;
  if (const auto* values = std::get_if<sql::ValuesRows>(&query.source)) {
    for (const auto& exprs : *values) {
      Row row;
      for (const auto& e : exprs) row.push_back(constant(e));
      source.push_back(std::move(row));
    }
  } else {
    const auto& sub = *std::get<sql::Box<sql::SelectQuery>>(query.source);
    if (reads_table(sub, def.name)) {
      throw UnsupportedFeature("INSERT ... SELECT reading its own target table", 0);
    }
    source = select_rows(sub, s, nullptr);
  }

  std::vector<Row> rows;
  std::set<Row> keys;
  std::vector<ledger::TxDraft> drafts;
  for (const auto& src : source) {
    if (src.size() != targets.size()) {
      throw ArityError("INSERT row has " + std::to_string(src.size()) + " value(s) for " +
                       std::to_string(targets.size()) + " column(s)");
    }
    Row full(def.columns.size());
    for (std::size_t i = 0; i < targets.size(); ++i) full[targets[i]] = src[i];
    full = db_.validate_row(def, full);
    Row key = def.key_of(full);
    if (!keys.insert(key).second || db_.table(def.name).find(key)) {
      throw DuplicatePrimaryKey("duplicate primary key in INSERT into '" + def.name + "'");
    }
    const auto d = fp::digest_tuple(def, full);
    drafts.push_back(ledger::TxDraft::put(d.row_id, def.name, d.fingerprint));
    rows.push_back(std::move(full));
  }
  if (!rows.empty()) {
    drafts.push_back(
        ledger::TxDraft::adjust_row_count(def.name, static_cast<std::int64_t>(rows.size())));
  }

  ProcessResult result;
  result.block_height = commit(drafts, principal, s);
  {
    PhaseTimer t(s.report.elapsed.db_exec);
    for (auto& row : rows) db_.apply_row_insert(storage::Tuple{def.name, std::move(row)});
  }
  result.rows_affected = source.size();
  s.report.tuples_mutated = source.size();
  return finish(std::move(result), s);
}

ProcessResult Verifier::run_delete(const sql::DeleteQuery& query, std::string_view principal,
                                   Session& s) {
  const TableDef& def = db_.catalog().at(query.table);
  s.tables.insert(def.name);
  const auto old_rows = fetch_old_rows(def.name, query.where, s);

  std::vector<ledger::TxDraft> drafts;
  for (const auto& old : old_rows) {
    const auto d = fp::digest_tuple(def, old);
    drafts.push_back(ledger::TxDraft::mark_deleted(d.row_id, def.name, d.fingerprint));
  }
  if (!old_rows.empty()) {
    drafts.push_back(
        ledger::TxDraft::adjust_row_count(def.name, -static_cast<std::int64_t>(old_rows.size())));
  }

  ProcessResult result;
  result.block_height = commit(drafts, principal, s);
  {
    PhaseTimer t(s.report.elapsed.db_exec);
    for (const auto& old : old_rows) db_.apply_row_delete(def.name, def.key_of(old));
  }
  result.rows_affected = old_rows.size();
  s.report.tuples_mutated = old_rows.size();
  return finish(std::move(result), s);
}

std::vector<CountMismatch> Verifier::audit_counts() const {
  std::lock_guard lock(mutex_);
  std::vector<CountMismatch> out;
  for (const auto& def : db_.catalog().tables()) {
    const auto db_count = static_cast<std::int64_t>(db_.row_count(def.name));
    std::optional<std::int64_t> ledger_count;
    try {
      ledger_count = ledger_.get_row_count(def.name);
    } catch (const UnknownTable&) {
    }
    if (ledger_count != db_count) out.push_back({def.name, db_count, ledger_count});
  }
  return out;
}

FullAudit Verifier::audit_full() const {
  std::lock_guard lock(mutex_);
  FullAudit audit;
  const std::string query_hash = hash_text("audit full");
  const std::int64_t now = options_.clock();
  for (const auto& def : db_.catalog().tables()) {
    std::set<RowId> present;
    for (const auto& [key, row] : db_.table(def.name).rows()) {
      present.insert(fp::row_id(key, def.name));
      const auto d = fp::digest_tuple(def, row);
      if (auto alert = judge(d, def.name, ledger_.get_current(d.row_id))) {
        alert->query_hash = query_hash;
        alert->timestamp = now;
        audit.alerts.push_back(std::move(*alert));
      }
    }
    for (const auto& rid : ledger_.active_row_ids(def.name)) {
      if (!present.contains(rid)) audit.missing.push_back({rid, def.name});
    }
  }
  log_alerts(audit.alerts);
  return audit;
}

void Verifier::log_alerts(const std::vector<TamperAlert>& alerts) const {
  if (options_.audit_log_path.empty() || alerts.empty()) return;
  std::ofstream out(options_.audit_log_path, std::ios::app);
  for (const auto& a : alerts) out << format_alert(a) << '\n';
}

}  // namespace verity::verifier
