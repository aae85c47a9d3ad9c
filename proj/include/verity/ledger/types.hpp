#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verity/fingerprint/fingerprint.hpp"

namespace verity::ledger {

using fp::Digest;
using fp::Fingerprint;
using fp::RowId;

enum class TxKind { PutFingerprint, UpdateFingerprint, MarkDeleted, AdjustRowCount };

const char* to_string(TxKind kind) noexcept;
std::optional<TxKind> tx_kind_from_name(std::string_view name);

/// Transaction content before signing. `owner` is filled in by submit.
struct TxDraft {
  TxKind kind = TxKind::PutFingerprint;
  std::optional<RowId> row_id;                 // absent for AdjustRowCount
  std::string table;
  std::optional<Fingerprint> fingerprint;      // Put / Update
  std::optional<Fingerprint> prev_fingerprint; // Update / MarkDeleted
  std::int64_t delta = 0;                      // AdjustRowCount

  static TxDraft put(RowId rid, std::string table, Fingerprint f);
  static TxDraft update(RowId rid, std::string table, Fingerprint prev, Fingerprint next);
  static TxDraft mark_deleted(RowId rid, std::string table, Fingerprint prev);
  static TxDraft adjust_row_count(std::string table, std::int64_t delta);

  friend bool operator==(const TxDraft&, const TxDraft&) = default;
};

struct Endorsement {
  std::string peer_id;
  std::string signature;

  friend bool operator==(const Endorsement&, const Endorsement&) = default;
};

struct LedgerTx {
  TxDraft draft;
  std::string owner;
  std::string submitter_signature;
  std::vector<Endorsement> endorsements;

  friend bool operator==(const LedgerTx&, const LedgerTx&) = default;
};

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  std::int64_t timestamp = 0;
  std::vector<LedgerTx> txs;
  Digest block_hash{};

  friend bool operator==(const Block&, const Block&) = default;
};

enum class RecordStatus { Active, Deleted };

struct HistoryEntry {
  Fingerprint fingerprint;
  std::string owner;
  std::uint64_t height = 0;
  TxKind kind = TxKind::PutFingerprint;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct FingerprintRecord {
  RowId row_id;
  std::string table;
  RecordStatus status = RecordStatus::Active;
  Fingerprint current;
  std::string owner;
  std::size_t version = 0;
  std::vector<HistoryEntry> history;

  friend bool operator==(const FingerprintRecord&, const FingerprintRecord&) = default;
};

struct ChainReport {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_height;
  std::size_t blocks = 0;         // records that verified
  std::uint64_t head_height = 0;  // height of the last verified block
  std::string detail;
};

}  // namespace verity::ledger
