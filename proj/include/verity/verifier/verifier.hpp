#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verity/errors.hpp"
#include "verity/ledger/ledger.hpp"
#include "verity/ledger/simulated_ledger.hpp"
#include "verity/sql/ast.hpp"
#include "verity/storage/database.hpp"

namespace verity::verifier {

using ledger::Fingerprint;
using ledger::RowId;

enum class Outcome { Verified, Tampered };

const char* to_string(Outcome outcome) noexcept;

struct PhaseTimes {
  std::chrono::nanoseconds parse{0};
  std::chrono::nanoseconds rewrite{0};
  std::chrono::nanoseconds db_exec{0};
  std::chrono::nanoseconds ledger_lookup{0};
  std::chrono::nanoseconds ledger_commit{0};

  std::chrono::nanoseconds total() const {
    return parse + rewrite + db_exec + ledger_lookup + ledger_commit;
  }
};

/// What the ledger said about a tuple that failed verification.
enum class Expectation {
  Mismatch,  // record active, fingerprint differs
  Absent,    // row id never written
  Deleted,   // record marked deleted
};

struct TamperAlert {
  RowId row_id;
  std::string table;
  Expectation expectation = Expectation::Mismatch;
  std::optional<Fingerprint> expected;  // ledger's current fingerprint, if any
  Fingerprint computed;
  std::string query_hash;  // hex SHA-256 of the query text
  std::int64_t timestamp = 0;

  friend bool operator==(const TamperAlert&, const TamperAlert&) = default;
};

struct VerificationReport {
  sql::QueryKind query_kind = sql::QueryKind::Select;
  std::vector<std::string> tables_touched;
  std::size_t tuples_checked = 0;  // distinct row ids
  std::size_t tuples_mutated = 0;
  std::size_t ledger_txs_committed = 0;
  PhaseTimes elapsed;
  Outcome outcome = Outcome::Verified;
  std::vector<TamperAlert> alerts;
};

/// Raised when any accessed tuple fails verification. Nothing is released.
class TamperDetected : public Error {
 public:
  explicit TamperDetected(VerificationReport report);
  const std::vector<TamperAlert>& alerts() const noexcept { return report_.alerts; }
  const VerificationReport& report() const noexcept { return report_; }

 private:
  VerificationReport report_;
};

struct ProcessResult {
  std::vector<std::string> columns;  // SELECT only
  std::vector<storage::Row> rows;    // SELECT only
  std::size_t rows_affected = 0;     // mutations only
  std::optional<std::uint64_t> block_height;
  VerificationReport report;
};

struct CountMismatch {
  std::string table;
  std::int64_t db_count = 0;
  std::optional<std::int64_t> ledger_count;  // nullopt: never initialized

  friend bool operator==(const CountMismatch&, const CountMismatch&) = default;
};

struct MissingRow {
  RowId row_id;
  std::string table;

  friend bool operator==(const MissingRow&, const MissingRow&) = default;
};

struct FullAudit {
  std::vector<TamperAlert> alerts;
  std::vector<MissingRow> missing;

  bool clean() const noexcept { return alerts.empty() && missing.empty(); }
};

struct VerifierOptions {
  ledger::Clock clock = ledger::system_clock();
  /// Append-only alert log; empty disables it.
  std::string audit_log_path;
  /// Peer id used when a caller does not name one.
  std::string principal = "peer0";
};

/// Gateway between callers and storage. Every tuple a query reads is
/// fingerprint-checked against the ledger before results leave; every
/// mutation is committed to the ledger before storage changes.
///
/// One operation runs at a time; calls are serialized internally.
class Verifier {
 public:
  Verifier(storage::Database& db, ledger::Ledger& ledger, VerifierOptions options = {});

  /// Records a Put per stored tuple and one row count per table, in one
  /// block. Throws DuplicateRowId when the ledger already holds the data.
  std::map<std::string, std::int64_t, std::less<>> bootstrap();

  /// Parses and dispatches one statement. Throws TamperDetected, parse and
  /// execution errors, and ledger errors.
  ProcessResult process(std::string_view sql);
  ProcessResult process(std::string_view sql, std::string_view principal);

  ProcessResult verified_select(const sql::SelectQuery& query);
  ProcessResult verified_update(const sql::UpdateQuery& query, std::string_view principal);
  ProcessResult verified_insert(const sql::InsertQuery& query, std::string_view principal);
  ProcessResult verified_delete(const sql::DeleteQuery& query, std::string_view principal);

  std::vector<CountMismatch> audit_counts() const;
  FullAudit audit_full() const;

  const VerifierOptions& options() const noexcept { return options_; }

 private:
  struct Session;

  ProcessResult dispatch(const sql::Query& query, std::string_view principal, Session& s);
  ProcessResult run_select(const sql::SelectQuery& query, Session& s);
  ProcessResult run_update(const sql::UpdateQuery& query, std::string_view principal, Session& s);
  ProcessResult run_insert(const sql::InsertQuery& query, std::string_view principal, Session& s);
  ProcessResult run_delete(const sql::DeleteQuery& query, std::string_view principal, Session& s);

  std::vector<storage::Row> select_rows(const sql::SelectQuery& query, Session& s,
                                        std::vector<std::string>* columns);
  std::vector<storage::Row> fetch_old_rows(const std::string& table,
                                           const std::optional<sql::Predicate>& where, Session& s);
  void check_tuple(const storage::Tuple& tuple, Session& s);
  void raise_if_tampered(Session& s);
  std::optional<std::uint64_t> commit(const std::vector<ledger::TxDraft>& drafts,
                                      std::string_view principal, Session& s);
  void log_alerts(const std::vector<TamperAlert>& alerts) const;
  ProcessResult finish(ProcessResult result, Session& s);

  storage::Database& db_;
  ledger::Ledger& ledger_;
  VerifierOptions options_;
  mutable std::mutex mutex_;
};

/// `YYYY-MM-DDTHH:MM:SSZ` for seconds since the epoch.
std::string iso_timestamp(std::int64_t seconds);

/// One audit-log line, without the trailing newline.
std::string format_alert(const TamperAlert& alert);

}  // namespace verity::verifier
