#pragma once

#include <map>
#include <optional>
#include <string>

#include "verity/ledger/types.hpp"

namespace verity::ledger {

/// Ledger-side state derived by replaying blocks.
struct WorldState {
  std::map<RowId, FingerprintRecord> records;
  std::map<std::string, std::int64_t, std::less<>> row_counts;

  void apply(const LedgerTx& tx, std::uint64_t height);
  void apply(const Block& block);

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

WorldState replay(const std::vector<Block>& blocks);

struct Rejection {
  enum class Kind { Stale, Duplicate, Invalid };
  Kind kind;
  std::string reason;
};

/// Committed state plus the effects of earlier transactions in the batch
/// under validation.
class StagedState {
 public:
  explicit StagedState(const WorldState& base) : base_(base) {}

  std::optional<Rejection> check(const TxDraft& draft) const;
  /// Records the effect of an accepted draft.
  void stage(const TxDraft& draft);

 private:
  struct Entry {
    RecordStatus status;
    Fingerprint current;
  };
  std::optional<Entry> lookup(const RowId& rid) const;
  std::optional<std::int64_t> count(const std::string& table) const;

  const WorldState& base_;
  std::map<RowId, Entry> records_;
  std::map<std::string, std::int64_t> counts_;
};

}  // namespace verity::ledger
