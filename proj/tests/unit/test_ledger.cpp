#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/temp_dir.hpp"
#include "verity/errors.hpp"
#include "verity/ledger/encoding.hpp"
#include "verity/ledger/simulated_ledger.hpp"

using namespace verity;
using namespace verity::ledger;
using storage::Value;

namespace {

RowId rid(int k) { return fp::row_id({Value::integer(k)}, "t"); }
Fingerprint fpr(int k, std::string_view v) {
  return fp::fingerprint(rid(k), {Value::integer(k), Value::text(std::string(v))});
}

Clock counter_clock() {
  auto t = std::make_shared<std::int64_t>(1700000000);
  return [t] { return (*t)++; };
}

SimulatedLedger make_ledger(std::size_t peers = 5) {
  return SimulatedLedger(PeerNetwork::deterministic(peers, "test"), counter_clock());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
}

// Start offset of each block record in a ledger file.
std::vector<std::size_t> record_offsets(const std::string& bytes) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    out.push_back(pos);
    pos += 4 + get_u32(bytes, pos) + 32;
  }
  return out;
}

// Twelve blocks: genesis plus eleven single-purpose batches.
void build_chain(SimulatedLedger& l) {
  l.submit({TxDraft::adjust_row_count("t", 0)}, "peer0");
  for (int k = 0; k < 10; ++k) {
    l.submit({TxDraft::put(rid(k), "t", fpr(k, "v")), TxDraft::adjust_row_count("t", 1)},
             "peer" + std::to_string(k % 5));
  }
}

}  // namespace

TEST_CASE("quorum is a strict majority") {
  CHECK(PeerNetwork::deterministic(1, "s").quorum() == 1);
  CHECK(PeerNetwork::deterministic(2, "s").quorum() == 2);
  CHECK(PeerNetwork::deterministic(3, "s").quorum() == 2);
  CHECK(PeerNetwork::deterministic(4, "s").quorum() == 3);
  CHECK(PeerNetwork::deterministic(5, "s").quorum() == 3);
  CHECK(PeerNetwork::deterministic(7, "s").quorum() == 4);
}

TEST_CASE("peer signatures") {
  auto net = PeerNetwork::deterministic(2, "s");
  const auto sig = net.peers()[0].sign("hello");
  CHECK(net.peers()[0].verify("hello", sig));
  CHECK_FALSE(net.peers()[0].verify("hellp", sig));
  CHECK_FALSE(net.peers()[1].verify("hello", sig));
  // Same seed, same keys.
  CHECK(PeerNetwork::deterministic(2, "s").peers()[1].public_key() == net.peers()[1].public_key());
  CHECK(PeerNetwork::deterministic(2, "t").peers()[1].public_key() != net.peers()[1].public_key());
}

TEST_CASE("peer key file round trip") {
  testing::TempDir dir;
  auto net = PeerNetwork::random(3);
  net.save(dir.file("keys"));
  auto back = PeerNetwork::load(dir.file("keys"));
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.peers()[i].id() == net.peers()[i].id());
    CHECK(back.peers()[i].public_key() == net.peers()[i].public_key());
  }
}

TEST_CASE("canonical encoding round trip") {
  auto l = make_ledger();
  const Block b = l.submit({TxDraft::put(rid(1), "t", fpr(1, "a")),
                            TxDraft::adjust_row_count("t", 1)},
                           "peer2");
  Block decoded = decode_block(encode_block(b));
  decoded.block_hash = hash_block(decoded);
  CHECK(decoded == b);
  std::string bytes = encode_block(b);
  CHECK_THROWS_AS(decode_block(bytes.substr(0, bytes.size() - 1)), DecodeError);
  CHECK_THROWS_AS(decode_block(bytes + "x"), DecodeError);
}

TEST_CASE("genesis block") {
  auto l = make_ledger();
  REQUIRE(l.blocks().size() == 1);
  CHECK(l.blocks()[0].height == 0);
  CHECK(l.blocks()[0].prev_hash == Digest{});
  CHECK(l.blocks()[0].txs.empty());
  CHECK(l.verify_chain().ok);
}

TEST_CASE("put, update and delete records") {
  auto l = make_ledger();
  CHECK_FALSE(l.get_current(rid(1)).has_value());
  l.submit({TxDraft::put(rid(1), "t", fpr(1, "a"))}, "peer0");
  auto r = l.get_current(rid(1));
  REQUIRE(r.has_value());
  CHECK(r->current == fpr(1, "a"));
  CHECK(r->status == RecordStatus::Active);
  CHECK(r->version == 1);
  CHECK(r->table == "t");

  l.submit({TxDraft::update(rid(1), "t", fpr(1, "a"), fpr(1, "b"))}, "peer1");
  r = l.get_current(rid(1));
  CHECK(r->version == 2);
  CHECK(r->current == fpr(1, "b"));
  CHECK(r->owner == "peer1");

  CHECK_THROWS_AS(l.submit({TxDraft::update(rid(1), "t", fpr(1, "a"), fpr(1, "c"))}, "peer0"),
                  StaleState);
  CHECK_THROWS_AS(l.submit({TxDraft::put(rid(1), "t", fpr(1, "z"))}, "peer0"), DuplicateRowId);
  CHECK_THROWS_AS(l.submit({TxDraft::update(rid(9), "t", fpr(9, "a"), fpr(9, "b"))}, "peer0"),
                  StaleState);

  l.submit({TxDraft::mark_deleted(rid(1), "t", fpr(1, "b"))}, "peer3");
  r = l.get_current(rid(1));
  CHECK(r->status == RecordStatus::Deleted);
  CHECK(r->version == 3);
  CHECK(r->history.back().kind == TxKind::MarkDeleted);
  CHECK_THROWS_AS(l.submit({TxDraft::mark_deleted(rid(1), "t", fpr(1, "b"))}, "peer0"),
                  StaleState);
  // A deleted row id may be written again.
  l.submit({TxDraft::put(rid(1), "t", fpr(1, "c"))}, "peer0");
  CHECK(l.get_current(rid(1))->status == RecordStatus::Active);
  CHECK(l.get_current(rid(1))->version == 4);
}

TEST_CASE("batch of three forms one block with quorum endorsements") {
  auto l = make_ledger(5);
  const auto before = l.head_height();
  const Block b = l.submit({TxDraft::put(rid(1), "t", fpr(1, "a")),
                            TxDraft::put(rid(2), "t", fpr(2, "a")),
                            TxDraft::put(rid(3), "t", fpr(3, "a"))},
                           "peer0");
  CHECK(b.height == before + 1);
  CHECK(l.head_height() == before + 1);
  REQUIRE(b.txs.size() == 3);
  for (const auto& tx : b.txs) {
    CHECK(tx.endorsements.size() >= 3);
    CHECK(tx.owner == "peer0");
  }
  CHECK(b.prev_hash == l.blocks()[before].block_hash);
}

TEST_CASE("row counts") {
  auto l = make_ledger();
  CHECK_THROWS_AS(l.get_row_count("region"), UnknownTable);
  l.submit({TxDraft::adjust_row_count("region", 5)}, "peer0");
  CHECK(l.get_row_count("region") == 5);
  l.submit({TxDraft::adjust_row_count("region", 1)}, "peer0");
  CHECK(l.get_row_count("region") == 6);
  l.submit({TxDraft::adjust_row_count("region", -2)}, "peer0");
  CHECK(l.get_row_count("region") == 4);
  CHECK_THROWS_AS(l.submit({TxDraft::adjust_row_count("region", -5)}, "peer0"), EndorsementFailed);
  l.submit({TxDraft::adjust_row_count("empty", 0)}, "peer0");
  CHECK(l.get_row_count("empty") == 0);
}

TEST_CASE("batches are atomic") {
  auto l = make_ledger();
  const auto height = l.head_height();
  try {
    l.submit({TxDraft::put(rid(1), "t", fpr(1, "a")), TxDraft::put(rid(2), "t", fpr(2, "a")),
              TxDraft::put(rid(1), "t", fpr(1, "b"))},
             "peer0");
    FAIL("expected DuplicateRowId");
  } catch (const DuplicateRowId& e) {
    CHECK(e.tx_index() == 2);
  }
  CHECK(l.head_height() == height);
  CHECK_FALSE(l.get_current(rid(1)).has_value());
  CHECK_FALSE(l.get_current(rid(2)).has_value());
  // Later txs see earlier ones of the same batch.
  l.submit({TxDraft::put(rid(1), "t", fpr(1, "a")),
            TxDraft::update(rid(1), "t", fpr(1, "a"), fpr(1, "b"))},
           "peer0");
  CHECK(l.get_current(rid(1))->current == fpr(1, "b"));
}

TEST_CASE("faulty peers and quorum soundness") {
  auto l = make_ledger(5);
  l.network().peers()[3].behavior = PeerBehavior::Refuse;
  l.network().peers()[4].behavior = PeerBehavior::BadSignature;
  const Block b = l.submit({TxDraft::put(rid(1), "t", fpr(1, "a"))}, "peer0");
  CHECK(b.txs[0].endorsements.size() == 3);
  for (const auto& e : b.txs[0].endorsements) CHECK(e.peer_id != "peer4");

  l.network().peers()[2].behavior = PeerBehavior::Refuse;
  const auto height = l.head_height();
  CHECK_THROWS_AS(l.submit({TxDraft::put(rid(2), "t", fpr(2, "a"))}, "peer0"), EndorsementFailed);
  CHECK(l.head_height() == height);
  CHECK_THROWS_AS(l.submit({TxDraft::put(rid(3), "t", fpr(3, "a"))}, "mallory"),
                  EndorsementFailed);
  CHECK_THROWS_AS(l.submit({}, "peer0"), EndorsementFailed);
}

TEST_CASE("history") {
  auto l = make_ledger();
  CHECK_THROWS_AS(l.history(rid(1)), NotFound);
  l.submit({TxDraft::put(rid(1), "t", fpr(1, "a"))}, "peer0");
  l.submit({TxDraft::update(rid(1), "t", fpr(1, "a"), fpr(1, "b"))}, "peer1");
  l.submit({TxDraft::update(rid(1), "t", fpr(1, "b"), fpr(1, "c"))}, "peer2");
  auto h = l.history(rid(1));
  REQUIRE(h.size() == 3);
  CHECK(h[0].owner == "peer0");
  CHECK(h[1].owner == "peer1");
  CHECK(h[2].owner == "peer2");
  CHECK(h[0].fingerprint == fpr(1, "a"));
  CHECK(h[2].fingerprint == fpr(1, "c"));
  CHECK(h[0].height < h[1].height);
  CHECK(h[1].height < h[2].height);
}

TEST_CASE("active row ids") {
  auto l = make_ledger();
  l.submit({TxDraft::put(rid(1), "t", fpr(1, "a")), TxDraft::put(rid(2), "t", fpr(2, "a")),
            TxDraft::put(fp::row_id({Value::integer(1)}, "u"), "u", fpr(1, "a"))},
           "peer0");
  l.submit({TxDraft::mark_deleted(rid(2), "t", fpr(2, "a"))}, "peer0");
  auto active = l.active_row_ids("t");
  REQUIRE(active.size() == 1);
  CHECK(active[0] == rid(1));
}

TEST_CASE("file persistence, replay and reload") {
  testing::TempDir dir;
  const std::string path = dir.file("chain.ledger");
  auto clock = counter_clock();
  WorldState expected;
  {
    auto l = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), clock);
    build_chain(l);
    CHECK(l.blocks().size() == 12);
    expected = l.world_state();
    CHECK(replay(l.blocks()) == expected);
  }
  auto reloaded = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), clock);
  CHECK(reloaded.world_state() == expected);
  CHECK(reloaded.verify_chain().ok);
  CHECK(reloaded.head_height() == 11);
  reloaded.submit({TxDraft::adjust_row_count("t", 1)}, "peer0");
  auto again = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), clock);
  CHECK(again.head_height() == 12);
  CHECK(again.get_row_count("t") == 11);
}

TEST_CASE("verify_chain pinpoints a flipped byte") {
  testing::TempDir dir;
  const std::string path = dir.file("chain.ledger");
  {
    auto l = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), counter_clock());
    build_chain(l);
  }
  const std::string original = slurp(path);
  const auto offsets = record_offsets(original);
  REQUIRE(offsets.size() == 12);

  // A byte inside block 3's transaction list.
  std::string bytes = original;
  const std::size_t end3 = offsets[4] - 32;
  bytes[end3 - 10] ^= 0x01;
  spit(path, bytes);
  auto l = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), counter_clock());
  const auto report = l.verify_chain();
  CHECK_FALSE(report.ok);
  REQUIRE(report.first_bad_height.has_value());
  CHECK(*report.first_bad_height == 3);
  CHECK(l.blocks().size() == 3);
  CHECK_THROWS_AS(l.submit({TxDraft::adjust_row_count("t", 1)}, "peer0"), LedgerCorrupted);

  // Sampled flips anywhere in the file.
  for (std::size_t i = 0; i < original.size(); i += 7) {
    bytes = original;
    bytes[i] ^= 0x80;
    const auto r = verify_records(bytes);
    const auto block = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), i) - offsets.begin() - 1);
    CAPTURE(i);
    REQUIRE_FALSE(r.ok);
    CHECK(*r.first_bad_height == block);
  }
}

TEST_CASE("truncating the last block leaves a shorter valid chain") {
  testing::TempDir dir;
  const std::string path = dir.file("chain.ledger");
  {
    auto l = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), counter_clock());
    build_chain(l);
  }
  const std::string original = slurp(path);
  const auto offsets = record_offsets(original);
  spit(path, original.substr(0, offsets.back()));
  auto l = SimulatedLedger::open(path, PeerNetwork::deterministic(5, "s"), counter_clock());
  const auto report = l.verify_chain();
  CHECK(report.ok);
  CHECK(report.head_height == 10);
  CHECK(report.head_height < 11);

  spit(path, original.substr(0, original.size() - 5));
  const auto partial = verify_records(slurp(path));
  CHECK_FALSE(partial.ok);
  CHECK(*partial.first_bad_height == 11);
}
