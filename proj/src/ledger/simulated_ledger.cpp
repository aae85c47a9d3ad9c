#include "verity/ledger/simulated_ledger.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "verity/errors.hpp"
#include "verity/ledger/encoding.hpp"

namespace verity::ledger {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ParsedChain {
  std::vector<Block> blocks;
  ChainReport report;
};

ParsedChain parse_chain(std::string_view bytes) {
  ParsedChain out;
  Digest prev{};
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    out.report.ok = false;
    out.report.first_bad_height = out.blocks.size();
    out.report.detail = "block " + std::to_string(out.blocks.size()) + ": " + why;
  };
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) {
      fail("truncated record length");
      break;
    }
    const std::uint32_t len = get_u32(bytes, pos);
    if (bytes.size() - pos - 4 < static_cast<std::size_t>(len) + 32) {
      fail("truncated record");
      break;
    }
    const std::string_view body = bytes.substr(pos + 4, len);
    Digest stored{};
    std::copy_n(bytes.data() + pos + 4 + len, 32, reinterpret_cast<char*>(stored.data()));
    Block b;
    try {
      b = decode_block(body);
    } catch (const DecodeError& e) {
      fail(std::string("undecodable: ") + e.what());
      break;
    }
    if (fp::sha256(body) != stored) {
      fail("hash mismatch");
      break;
    }
    if (b.height != out.blocks.size()) {
      fail("unexpected height " + std::to_string(b.height));
      break;
    }
    if (b.prev_hash != prev) {
      fail("previous-hash link broken");
      break;
    }
    b.block_hash = stored;
    prev = stored;
    out.blocks.push_back(std::move(b));
    pos += 4 + len + 32;
  }
  out.report.blocks = out.blocks.size();
  out.report.head_height = out.blocks.empty() ? 0 : out.blocks.back().height;
  if (out.report.ok && out.blocks.empty()) {
    out.report.ok = false;
    out.report.first_bad_height = 0;
    out.report.detail = "chain has no genesis block";
  }
  return out;
}

}  // namespace

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

ChainReport verify_records(std::string_view bytes) { return parse_chain(bytes).report; }

SimulatedLedger::SimulatedLedger(PeerNetwork network, Clock clock)
    : SimulatedLedger(std::move(network), std::move(clock), true) {}

SimulatedLedger::SimulatedLedger(PeerNetwork network, Clock clock, bool with_genesis)
    : network_(std::move(network)), clock_(std::move(clock)) {
  if (with_genesis) {
    Block genesis;
    genesis.timestamp = clock_();
    append(std::move(genesis));
  }
}

SimulatedLedger SimulatedLedger::open(const std::string& path, PeerNetwork network, Clock clock) {
  SimulatedLedger l(std::move(network), std::move(clock), false);
  l.path_ = path;
  const std::string bytes = std::filesystem::exists(path) ? read_file(path) : std::string();
  if (bytes.empty()) {
    std::ofstream(path, std::ios::binary | std::ios::trunc);
    Block genesis;
    genesis.timestamp = l.clock_();
    l.append(std::move(genesis));
    return l;
  }
  ParsedChain chain = parse_chain(bytes);
  if (!chain.report.ok) l.load_failure_ = chain.report;
  l.blocks_ = std::move(chain.blocks);
  l.state_ = replay(l.blocks_);
  return l;
}

std::string SimulatedLedger::record_bytes(const Block& block) const {
  const std::string body = encode_block(block);
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
  out.append(reinterpret_cast<const char*>(block.block_hash.data()), block.block_hash.size());
  return out;
}

void SimulatedLedger::append(Block block) {
  block.block_hash = hash_block(block);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << record_bytes(block);
    if (!out.flush()) throw std::runtime_error("cannot append to ledger file " + path_);
  }
  state_.apply(block);
  blocks_.push_back(std::move(block));
}

void SimulatedLedger::save_as(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& b : blocks_) out << record_bytes(b);
  if (!out.flush()) throw std::runtime_error("cannot write ledger file " + path);
  path_ = path;
}

SimulatedLedger SimulatedLedger::clone_in_memory() const {
  std::vector<Peer> peers;
  for (const auto& p : network_.peers()) {
    peers.emplace_back(p.id(), p.secret());
    peers.back().behavior = p.behavior;
  }
  SimulatedLedger copy(PeerNetwork(std::move(peers)), clock_, false);
  copy.blocks_ = blocks_;
  copy.state_ = state_;
  copy.load_failure_ = load_failure_;
  return copy;
}

Block SimulatedLedger::submit(const std::vector<TxDraft>& drafts, std::string_view submitter) {
  if (load_failure_) throw LedgerCorrupted("ledger chain is corrupted: " + load_failure_->detail);
  const Peer* author = network_.find(submitter);
  if (!author) throw EndorsementFailed(0, "unknown submitting peer '" + std::string(submitter) + "'");
  if (drafts.empty()) throw EndorsementFailed(0, "empty transaction batch");

  StagedState staged(state_);
  std::vector<LedgerTx> txs;
  txs.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    LedgerTx tx{drafts[i], std::string(submitter), {}, {}};
    const std::string payload = encode_payload(tx.draft, tx.owner);
    tx.submitter_signature = author->sign(payload);

    std::optional<Rejection> rejection;
    for (const auto& peer : network_.peers()) {
      if (peer.behavior == PeerBehavior::Refuse) continue;
      if (!author->verify(payload, tx.submitter_signature)) {
        rejection = Rejection{Rejection::Kind::Invalid, "submitter signature does not verify"};
        continue;
      }
      if (auto r = staged.check(tx.draft)) {
        rejection = std::move(r);
        continue;
      }
      std::string sig = peer.behavior == PeerBehavior::BadSignature ? peer.sign("x" + payload)
                                                                     : peer.sign(payload);
      tx.endorsements.push_back({peer.id(), std::move(sig)});
    }

    std::vector<Endorsement> valid;
    for (auto& e : tx.endorsements) {
      const Peer* p = network_.find(e.peer_id);
      if (p && p->verify(payload, e.signature)) valid.push_back(std::move(e));
    }
    tx.endorsements = std::move(valid);
    if (tx.endorsements.size() < network_.quorum()) {
      if (rejection) {
        switch (rejection->kind) {
          case Rejection::Kind::Stale:
            throw StaleState(i, rejection->reason);
          case Rejection::Kind::Duplicate:
            throw DuplicateRowId(i, rejection->reason);
          case Rejection::Kind::Invalid:
            throw EndorsementFailed(i, rejection->reason);
        }
      }
      throw EndorsementFailed(i, std::to_string(tx.endorsements.size()) + " valid endorsements, quorum is " +
                                     std::to_string(network_.quorum()));
    }
    staged.stage(tx.draft);
    txs.push_back(std::move(tx));
  }

  Block block;
  block.height = blocks_.back().height + 1;
  block.prev_hash = blocks_.back().block_hash;
  block.timestamp = clock_();
  block.txs = std::move(txs);
  append(std::move(block));
  return blocks_.back();
}

std::optional<FingerprintRecord> SimulatedLedger::get_current(const RowId& rid) const {
  auto it = state_.records.find(rid);
  if (it == state_.records.end()) return std::nullopt;
  return it->second;
}

std::int64_t SimulatedLedger::get_row_count(std::string_view table) const {
  auto it = state_.row_counts.find(table);
  if (it == state_.row_counts.end()) {
    throw UnknownTable("ledger has no row count for table '" + std::string(table) + "'");
  }
  return it->second;
}

ChainReport SimulatedLedger::verify_chain() const {
  if (!path_.empty()) return verify_records(read_file(path_));
  std::string bytes;
  for (const auto& b : blocks_) bytes += record_bytes(b);
  return verify_records(bytes);
}

std::vector<HistoryEntry> SimulatedLedger::history(const RowId& rid) const {
  auto it = state_.records.find(rid);
  if (it == state_.records.end()) throw NotFound("row id " + rid.hex() + " is not on the ledger");
  return it->second.history;
}

std::vector<RowId> SimulatedLedger::active_row_ids(std::string_view table) const {
  std::vector<RowId> out;
  for (const auto& [rid, rec] : state_.records) {
    if (rec.table == table && rec.status == RecordStatus::Active) out.push_back(rid);
  }
  return out;
}

}  // namespace verity::ledger
