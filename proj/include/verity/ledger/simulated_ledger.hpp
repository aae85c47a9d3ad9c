#pragma once

#include <functional>
#include <optional>
#include <string>

#include "verity/ledger/ledger.hpp"
#include "verity/ledger/peer.hpp"
#include "verity/ledger/world_state.hpp"

namespace verity::ledger {

/// Seconds since the epoch. Injected so tests get deterministic blocks.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

/// Reference ledger: in-process peers endorse every transaction, blocks are
/// hash-chained and optionally appended to a file.
///
/// File format, one record per block:
///   u32 length | canonical block encoding | 32-byte block hash
class SimulatedLedger : public Ledger {
 public:
  /// In-memory ledger with a fresh genesis block.
  SimulatedLedger(PeerNetwork network, Clock clock = system_clock());

  /// File-backed ledger. A missing or empty file starts a new chain;
  /// otherwise the file is replayed up to the first bad record, and a bad
  /// chain makes `submit` throw LedgerCorrupted.
  static SimulatedLedger open(const std::string& path, PeerNetwork network,
                              Clock clock = system_clock());

  SimulatedLedger(SimulatedLedger&&) noexcept = default;
  SimulatedLedger& operator=(SimulatedLedger&&) noexcept = default;

  Block submit(const std::vector<TxDraft>& drafts, std::string_view submitter) override;
  std::optional<FingerprintRecord> get_current(const RowId& rid) const override;
  std::int64_t get_row_count(std::string_view table) const override;
  /// Re-reads the backing file when there is one.
  ChainReport verify_chain() const override;
  std::vector<HistoryEntry> history(const RowId& rid) const override;
  std::vector<RowId> active_row_ids(std::string_view table) const override;

  const WorldState& world_state() const noexcept { return state_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::uint64_t head_height() const { return blocks_.back().height; }
  const PeerNetwork& network() const noexcept { return network_; }
  PeerNetwork& network() noexcept { return network_; }
  const std::string& path() const noexcept { return path_; }
  /// Points persistence at another file, writing the whole chain there.
  void save_as(const std::string& path);

  /// Deep copy with no backing file, for benchmarks that must not disturb
  /// the original.
  SimulatedLedger clone_in_memory() const;

 private:
  SimulatedLedger(PeerNetwork network, Clock clock, bool with_genesis);
  void append(Block block);
  std::string record_bytes(const Block& block) const;

  PeerNetwork network_;
  Clock clock_;
  std::string path_;
  std::vector<Block> blocks_;
  WorldState state_;
  std::optional<ChainReport> load_failure_;
};

/// Verifies serialized chain bytes record by record.
ChainReport verify_records(std::string_view bytes);

}  // namespace verity::ledger
