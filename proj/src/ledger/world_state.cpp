#include "verity/ledger/world_state.hpp"

namespace verity::ledger {

void WorldState::apply(const LedgerTx& tx, std::uint64_t height) {
  const TxDraft& d = tx.draft;
  if (d.kind == TxKind::AdjustRowCount) {
    row_counts[d.table] += d.delta;
    return;
  }
  auto [it, fresh] = records.try_emplace(*d.row_id);
  FingerprintRecord& r = it->second;
  if (fresh) {
    r.row_id = *d.row_id;
    r.table = d.table;
  }
  switch (d.kind) {
    case TxKind::PutFingerprint:
    case TxKind::UpdateFingerprint:
      r.status = RecordStatus::Active;
      r.current = *d.fingerprint;
      break;
    case TxKind::MarkDeleted:
      r.status = RecordStatus::Deleted;
      break;
    case TxKind::AdjustRowCount:
      break;
  }
  r.owner = tx.owner;
  r.history.push_back({r.current, tx.owner, height, d.kind});
  r.version = r.history.size();
}

void WorldState::apply(const Block& block) {
  for (const auto& tx : block.txs) apply(tx, block.height);
}

WorldState replay(const std::vector<Block>& blocks) {
  WorldState s;
  for (const auto& b : blocks) s.apply(b);
  return s;
}

std::optional<StagedState::Entry> StagedState::lookup(const RowId& rid) const {
  if (auto it = records_.find(rid); it != records_.end()) return it->second;
  if (auto it = base_.records.find(rid); it != base_.records.end()) {
    return Entry{it->second.status, it->second.current};
  }
  return std::nullopt;
}

std::optional<std::int64_t> StagedState::count(const std::string& table) const {
  if (auto it = counts_.find(table); it != counts_.end()) return it->second;
  if (auto it = base_.row_counts.find(table); it != base_.row_counts.end()) return it->second;
  return std::nullopt;
}

std::optional<Rejection> StagedState::check(const TxDraft& d) const {
  using K = Rejection::Kind;
  if (d.table.empty()) return Rejection{K::Invalid, "transaction names no table"};
  if (d.kind == TxKind::AdjustRowCount) {
    if (d.row_id || d.fingerprint || d.prev_fingerprint) {
      return Rejection{K::Invalid, "row count adjustment carries row data"};
    }
    if (count(d.table).value_or(0) + d.delta < 0) {
      return Rejection{K::Invalid, "row count of '" + d.table + "' would become negative"};
    }
    return std::nullopt;
  }
  if (!d.row_id) return Rejection{K::Invalid, "transaction has no row id"};
  if (d.delta != 0) return Rejection{K::Invalid, "row transaction carries a count delta"};
  const auto current = lookup(*d.row_id);
  const std::string rid = d.row_id->hex();
  switch (d.kind) {
    case TxKind::PutFingerprint:
      if (!d.fingerprint || d.prev_fingerprint) {
        return Rejection{K::Invalid, "put needs a fingerprint and no previous fingerprint"};
      }
      if (current && current->status == RecordStatus::Active) {
        return Rejection{K::Duplicate, rid};
      }
      return std::nullopt;
    case TxKind::UpdateFingerprint:
    case TxKind::MarkDeleted: {
      const bool update = d.kind == TxKind::UpdateFingerprint;
      if (!d.prev_fingerprint || update != d.fingerprint.has_value()) {
        return Rejection{K::Invalid, "malformed " + std::string(to_string(d.kind))};
      }
      if (!current) return Rejection{K::Stale, "row id " + rid + " is unknown"};
      if (current->status == RecordStatus::Deleted) {
        return Rejection{K::Stale, "row id " + rid + " is deleted"};
      }
      if (current->current != *d.prev_fingerprint) {
        return Rejection{K::Stale, "previous fingerprint mismatch for row id " + rid};
      }
      return std::nullopt;
    }
    case TxKind::AdjustRowCount:
      break;
  }
  return std::nullopt;
}

void StagedState::stage(const TxDraft& d) {
  switch (d.kind) {
    case TxKind::AdjustRowCount:
      counts_[d.table] = count(d.table).value_or(0) + d.delta;
      break;
    case TxKind::PutFingerprint:
    case TxKind::UpdateFingerprint:
      records_[*d.row_id] = Entry{RecordStatus::Active, *d.fingerprint};
      break;
    case TxKind::MarkDeleted:
      records_[*d.row_id] = Entry{RecordStatus::Deleted, *d.prev_fingerprint};
      break;
  }
}

}  // namespace verity::ledger
