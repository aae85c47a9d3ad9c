#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verity/ledger/types.hpp"

namespace verity::ledger {

/// Contract between the gateway and a fingerprint ledger. An adapter to an
/// external blockchain implements the same operations.
class Ledger {
 public:
  virtual ~Ledger() = default;

  /// Endorses and commits `drafts` atomically as one block signed by peer
  /// `submitter`. Throws EndorsementFailed, StaleState, DuplicateRowId, or
  /// LedgerCorrupted when the chain failed verification.
  virtual Block submit(const std::vector<TxDraft>& drafts, std::string_view submitter) = 0;

  /// nullopt means the row id was never written.
  virtual std::optional<FingerprintRecord> get_current(const RowId& rid) const = 0;

  /// Throws UnknownTable if the table's count was never initialized.
  virtual std::int64_t get_row_count(std::string_view table) const = 0;

  virtual ChainReport verify_chain() const = 0;

  /// Throws NotFound.
  virtual std::vector<HistoryEntry> history(const RowId& rid) const = 0;

  /// Row ids of `table` whose record is active. Needed by the full-scan audit
  /// to find rows deleted out of band.
  virtual std::vector<RowId> active_row_ids(std::string_view table) const = 0;
};

}  // namespace verity::ledger
