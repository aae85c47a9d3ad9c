#include "verity/ledger/encoding.hpp"

#include <charconv>
#include <limits>

namespace verity::ledger {

namespace {

constexpr std::pair<TxKind, const char*> kKindNames[] = {
    {TxKind::PutFingerprint, "PutFingerprint"},
    {TxKind::UpdateFingerprint, "UpdateFingerprint"},
    {TxKind::MarkDeleted, "MarkDeleted"},
    {TxKind::AdjustRowCount, "AdjustRowCount"},
};

}  // namespace

const char* to_string(TxKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<TxKind> tx_kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  return std::nullopt;
}

TxDraft TxDraft::put(RowId rid, std::string table, Fingerprint f) {
  return {TxKind::PutFingerprint, rid, std::move(table), f, std::nullopt, 0};
}

TxDraft TxDraft::update(RowId rid, std::string table, Fingerprint prev, Fingerprint next) {
  return {TxKind::UpdateFingerprint, rid, std::move(table), next, prev, 0};
}

TxDraft TxDraft::mark_deleted(RowId rid, std::string table, Fingerprint prev) {
  return {TxKind::MarkDeleted, rid, std::move(table), std::nullopt, prev, 0};
}

TxDraft TxDraft::adjust_row_count(std::string table, std::int64_t delta) {
  return {TxKind::AdjustRowCount, std::nullopt, std::move(table), std::nullopt, std::nullopt,
          delta};
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v = v << 8 | static_cast<unsigned char>(bytes[offset + i]);
  }
  return v;
}

Encoder& Encoder::field(std::string_view bytes) {
  if (bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("field too large for canonical encoding");
  }
  put_u32(out_, static_cast<std::uint32_t>(bytes.size()));
  out_.append(bytes);
  return *this;
}

Encoder& Encoder::integer(std::int64_t v) { return field(std::to_string(v)); }

Encoder& Encoder::digest(const Digest& d) {
  return field(std::string_view(reinterpret_cast<const char*>(d.data()), d.size()));
}

Encoder& Encoder::optional_digest(const std::optional<Digest>& d) {
  return d ? digest(*d) : field("");
}

std::string_view Decoder::field() {
  if (in_.size() - pos_ < 4) throw DecodeError("truncated field length");
  const std::uint32_t len = get_u32(in_, pos_);
  pos_ += 4;
  if (in_.size() - pos_ < len) throw DecodeError("truncated field");
  std::string_view out = in_.substr(pos_, len);
  pos_ += len;
  return out;
}

std::int64_t Decoder::integer() {
  const std::string_view text = field();
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty() ||
      std::to_string(v) != text) {
    throw DecodeError("malformed integer field");
  }
  return v;
}

Digest Decoder::digest() {
  auto d = optional_digest();
  if (!d) throw DecodeError("missing digest");
  return *d;
}

std::optional<Digest> Decoder::optional_digest() {
  const std::string_view bytes = field();
  if (bytes.empty()) return std::nullopt;
  if (bytes.size() != 32) throw DecodeError("digest field is not 32 bytes");
  Digest d{};
  std::copy(bytes.begin(), bytes.end(), reinterpret_cast<char*>(d.data()));
  return d;
}

void Decoder::finish() const {
  if (!done()) throw DecodeError("trailing bytes after encoding");
}

namespace {

std::optional<Digest> raw(const std::optional<RowId>& v) {
  return v ? std::optional<Digest>(v->bytes) : std::nullopt;
}
std::optional<Digest> raw(const std::optional<Fingerprint>& v) {
  return v ? std::optional<Digest>(v->bytes) : std::nullopt;
}

}  // namespace

std::string encode_payload(const TxDraft& d, std::string_view owner) {
  Encoder e;
  e.field(to_string(d.kind))
      .optional_digest(raw(d.row_id))
      .field(d.table)
      .optional_digest(raw(d.fingerprint))
      .optional_digest(raw(d.prev_fingerprint))
      .integer(d.delta)
      .field(owner);
  return e.take();
}

std::string encode_tx(const LedgerTx& tx) {
  Encoder e;
  e.field(encode_payload(tx.draft, tx.owner)).field(tx.submitter_signature);
  e.integer(static_cast<std::int64_t>(tx.endorsements.size()));
  for (const auto& en : tx.endorsements) {
    Encoder inner;
    inner.field(en.peer_id).field(en.signature);
    e.field(inner.bytes());
  }
  return e.take();
}

LedgerTx decode_tx(std::string_view bytes) {
  Decoder d(bytes);
  LedgerTx tx;
  {
    Decoder p(d.field());
    auto kind = tx_kind_from_name(p.field());
    if (!kind) throw DecodeError("unknown transaction kind");
    tx.draft.kind = *kind;
    if (auto rid = p.optional_digest()) tx.draft.row_id = RowId{*rid};
    tx.draft.table = std::string(p.field());
    if (auto f = p.optional_digest()) tx.draft.fingerprint = Fingerprint{*f};
    if (auto f = p.optional_digest()) tx.draft.prev_fingerprint = Fingerprint{*f};
    tx.draft.delta = p.integer();
    tx.owner = std::string(p.field());
    p.finish();
  }
  tx.submitter_signature = std::string(d.field());
  const std::int64_t n = d.integer();
  if (n < 0) throw DecodeError("negative endorsement count");
  for (std::int64_t i = 0; i < n; ++i) {
    Decoder en(d.field());
    Endorsement e;
    e.peer_id = std::string(en.field());
    e.signature = std::string(en.field());
    en.finish();
    tx.endorsements.push_back(std::move(e));
  }
  d.finish();
  return tx;
}

std::string encode_block(const Block& block) {
  Encoder e;
  e.integer(static_cast<std::int64_t>(block.height))
      .digest(block.prev_hash)
      .integer(block.timestamp)
      .integer(static_cast<std::int64_t>(block.txs.size()));
  for (const auto& tx : block.txs) e.field(encode_tx(tx));
  return e.take();
}

Block decode_block(std::string_view bytes) {
  Decoder d(bytes);
  Block b;
  const std::int64_t height = d.integer();
  if (height < 0) throw DecodeError("negative block height");
  b.height = static_cast<std::uint64_t>(height);
  b.prev_hash = d.digest();
  b.timestamp = d.integer();
  const std::int64_t n = d.integer();
  if (n < 0) throw DecodeError("negative transaction count");
  for (std::int64_t i = 0; i < n; ++i) b.txs.push_back(decode_tx(d.field()));
  d.finish();
  return b;
}

Digest hash_block(const Block& block) { return fp::sha256(encode_block(block)); }

}  // namespace verity::ledger
