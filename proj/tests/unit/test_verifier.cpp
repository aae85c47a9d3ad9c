#include <doctest.h>

#include <fstream>
#include <memory>
#include <random>

#include "../support/random_queries.hpp"
#include "../support/temp_dir.hpp"
#include "verity/fingerprint/fingerprint.hpp"
#include "verity/fixtures/tpch.hpp"
#include "verity/sql/parser.hpp"
#include "verity/verifier/verifier.hpp"

using namespace verity;
using namespace verity::verifier;
using storage::Row;
using storage::Value;

namespace {

ledger::Clock counter_clock() {
  auto t = std::make_shared<std::int64_t>(1700000000);
  return [t] { return (*t)++; };
}

fixtures::TpchCounts small_tpch() { return {20, 60, 25, 20, 10, 20, 5, 5}; }

// Storage, ledger and verifier wired together; not movable.
struct Rig {
  explicit Rig(std::string audit_log = {}, std::size_t peers = 3)
      : ledger(ledger::PeerNetwork::deterministic(peers, "verifier-tests"), counter_clock()),
        verifier(db, ledger, VerifierOptions{counter_clock(), std::move(audit_log), "peer0"}) {}

  storage::Database db;
  ledger::SimulatedLedger ledger;
  Verifier verifier;
};

void load_tpch(Rig& rig) {
  fixtures::populate(rig.db, small_tpch(), 7);
  rig.verifier.bootstrap();
}

Row key(std::int64_t k) { return {Value::integer(k)}; }

fp::TupleDigest digest_of(const Rig& rig, const std::string& table, const Row& pk) {
  const auto& def = rig.db.catalog().at(table);
  return fp::digest_tuple(def, *rig.db.table(table).find(pk));
}

std::vector<Row> sorted(std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Schema of the scalar-subquery UPDATE example.
void update_example_schema(Rig& rig) {
  rig.db.create_tables(
      "create table t1 (id integer, a integer, b integer, primary key (id));"
      "create table t2 (key integer, a integer, primary key (key));");
  rig.db.apply_row_insert({"t1", {Value::integer(1), Value::integer(10), Value::integer(4567)}});
  rig.db.apply_row_insert({"t1", {Value::integer(2), Value::integer(20), Value::integer(99)}});
  rig.db.apply_row_insert({"t2", {Value::integer(1234), Value::integer(777)}});
  rig.db.apply_row_insert({"t2", {Value::integer(1235), Value::integer(888)}});
  rig.db.apply_row_insert({"t2", {Value::integer(1236), Value::integer(888)}});
  rig.verifier.bootstrap();
}

}  // namespace

TEST_CASE("bootstrap records every tuple and the table counts") {
  SUBCASE("preset fixture") {
    Rig rig;
    fixtures::populate(rig.db, fixtures::TpchCounts::sf0001(), 1);
    const auto counts = rig.verifier.bootstrap();
    std::int64_t total = 0;
    for (const auto& [table, n] : counts) total += n;
    CHECK(total == 8595);
    CHECK(rig.ledger.world_state().records.size() == 8595);
    CHECK(rig.ledger.get_row_count("lineitem") == 6005);
    CHECK(rig.ledger.blocks().size() == 2);
  }
  SUBCASE("empty table") {
    Rig rig;
    rig.db.create_table("create table e (k integer, primary key (k))");
    CHECK(rig.verifier.bootstrap().at("e") == 0);
    CHECK(rig.ledger.get_row_count("e") == 0);
    CHECK_THROWS_AS(rig.verifier.bootstrap(), DuplicateRowId);
  }
  SUBCASE("re-running fails on the first tuple") {
    Rig rig;
    load_tpch(rig);
    const auto height = rig.ledger.head_height();
    try {
      rig.verifier.bootstrap();
      FAIL("bootstrap ran twice");
    } catch (const DuplicateRowId& e) {
      CHECK(e.tx_index() == 0);
    }
    CHECK(rig.ledger.head_height() == height);
  }
}

TEST_CASE("verified select on clean data") {
  Rig rig;
  load_tpch(rig);
  auto r = rig.verifier.process("select * from region");
  CHECK(r.rows.size() == 5);
  CHECK(r.columns == std::vector<std::string>{"r_regionkey", "r_name", "r_comment"});
  CHECK(r.report.tuples_checked == 5);
  CHECK(r.report.outcome == Outcome::Verified);
  CHECK(r.report.alerts.empty());
  CHECK(r.report.query_kind == sql::QueryKind::Select);
  CHECK(r.report.tables_touched == std::vector<std::string>{"region"});
  CHECK(r.report.ledger_txs_committed == 0);
}

TEST_CASE("self-join checks each row once") {
  Rig rig;
  load_tpch(rig);
  auto r = rig.verifier.process(
      "select n1.n_name, n2.n_name from (nation as n1), (nation as n2) where n1.n_regionkey = "
      "n2.n_regionkey");
  CHECK(r.report.tuples_checked == 25);
  CHECK(r.rows.size() == 125);  // five regions of five nations each
}

TEST_CASE("nested query verifies the three base tuples") {
  Rig rig;
  rig.db.create_tables(
      "create table t1 (x integer, y integer, a integer, primary key (x));"
      "create table t2 (a integer, s integer, b integer, primary key (a));"
      "create table t3 (c integer, d integer, b integer, primary key (c));");
  rig.db.apply_row_insert({"t1", {Value::integer(1), Value::integer(2), Value::integer(3)}});
  rig.db.apply_row_insert({"t2", {Value::integer(3), Value::integer(4), Value::integer(5)}});
  rig.db.apply_row_insert({"t3", {Value::integer(6), Value::integer(7), Value::integer(5)}});
  rig.verifier.bootstrap();
  auto r = rig.verifier.process(
      "SELECT t1.a, r1.b, t3.c FROM t1, (SELECT a,b FROM t2) AS r1, t3 WHERE t1.a=r1.a AND "
      "r1.b=t3.b");
  CHECK(r.rows == std::vector<Row>{{Value::integer(3), Value::integer(5), Value::integer(6)}});
  CHECK(r.report.tuples_checked == 3);
  CHECK(r.report.tables_touched == std::vector<std::string>{"t1", "t2", "t3"});
}

TEST_CASE("tampered row blocks results and is logged") {
  testing::TempDir dir;
  Rig rig(dir.file("alerts.tsv"));
  load_tpch(rig);
  const auto before = digest_of(rig, "region", key(2));
  rig.db.raw_mutate("region", key(2), "r_comment", Value::text("rewritten"));
  const auto after = digest_of(rig, "region", key(2));
  try {
    rig.verifier.process("select * from region");
    FAIL("tampering went unnoticed");
  } catch (const TamperDetected& e) {
    REQUIRE(e.alerts().size() == 1);
    const auto& a = e.alerts()[0];
    CHECK(a.table == "region");
    CHECK(a.row_id == after.row_id);
    CHECK(a.expectation == Expectation::Mismatch);
    CHECK(a.expected == before.fingerprint);
    CHECK(a.computed == after.fingerprint);
    CHECK(a.query_hash == fp::to_hex(fp::sha256("select * from region")));
    CHECK(e.report().outcome == Outcome::Tampered);
    CHECK(e.report().tuples_checked == 5);
  }
  std::ifstream log(dir.file("alerts.tsv"));
  std::string line;
  REQUIRE(std::getline(log, line));
  CHECK(line == "2023-11-14T22:13:20Z\tregion\t" + after.row_id.hex() + "\t" +
                    before.fingerprint.hex() + "\t" + after.fingerprint.hex());
  CHECK_FALSE(std::getline(log, line));

  SUBCASE("access outside the tampered row still verifies") {
    CHECK(rig.verifier.process("select r_name from region where r_regionkey <> 2").rows.size() == 4);
  }
}

TEST_CASE("alert formatting") {
  TamperAlert a;
  a.table = "t";
  a.timestamp = 0;
  a.expectation = Expectation::Absent;
  const std::string zeros(64, '0');
  CHECK(format_alert(a) == "1970-01-01T00:00:00Z\tt\t" + zeros + "\tABSENT\t" + zeros);
  a.expectation = Expectation::Deleted;
  CHECK(format_alert(a).find("\tDELETED\t") != std::string::npos);
  CHECK(iso_timestamp(951782400) == "2000-02-29T00:00:00Z");
}

TEST_CASE("insert then delete a nation") {
  Rig rig;
  load_tpch(rig);
  auto ins = rig.verifier.process(
      "insert into nation (n_nationkey, n_name, n_regionkey, n_comment) values ( 93793619 "
      ",\"algeria\", 123454556741 ,\"haggle detect slyly agai\");");
  CHECK(ins.rows_affected == 1);
  CHECK(ins.report.ledger_txs_committed == 2);
  CHECK(ins.report.query_kind == sql::QueryKind::Insert);
  CHECK(rig.ledger.get_row_count("nation") == 26);
  CHECK(rig.db.row_count("nation") == 26);
  const auto& tx = rig.ledger.blocks().back().txs;
  REQUIRE(tx.size() == 2);
  CHECK(tx[0].draft.kind == ledger::TxKind::PutFingerprint);
  CHECK(tx[1].draft == ledger::TxDraft::adjust_row_count("nation", 1));

  const auto rid = fp::row_id(key(93793619), "nation");
  auto del = rig.verifier.process("delete from nation where n_nationkey = 93793619;");
  CHECK(del.rows_affected == 1);
  CHECK(del.report.tuples_checked == 1);
  CHECK(rig.ledger.get_row_count("nation") == 25);
  CHECK(rig.db.row_count("nation") == 25);
  CHECK(rig.ledger.get_current(rid)->status == ledger::RecordStatus::Deleted);
  CHECK(rig.verifier.audit_full().clean());
}

TEST_CASE("five-row VALUES insert commits one block") {
  Rig rig;
  load_tpch(rig);
  const auto height = rig.ledger.head_height();
  auto r = rig.verifier.process(
      "insert into customer ( c_custkey  , c_name , c_address , c_nationkey , c_phone , "
      "c_acctbal ,c_mktsegment, c_comment)  values (91639738 , \"sumpil\", \"renol\", 93793619 , "
      "\"9242\", 234, \"pilsum\", \"rolen\") , ( 91639737 , \"abc\", \"def\", 93793619 , \"1234\", "
      "234, \"yhbdsra\", \"afgsdf\"), (96244913, \"pkjhbc\", \"mnhgre\", 93793619 , \"9543\", 234, "
      "\"qaxcvf\", \"iomnbgf\"), ( 96244914, \"yuthgbvfg\", \"qgytrevd\", 93793619 , \"75345\", "
      "234, \"liyhvdrt\", \"qfgkdyv\"), (96244915, \"ramnabfubt\", \"njhiyfcvh\", 93793619 , "
      "\"126789\", 234, \"summinhsve\", \"qgjorutbbs\");");
  CHECK(r.rows_affected == 5);
  CHECK(r.report.tuples_mutated == 5);
  CHECK(rig.ledger.head_height() == height + 1);
  CHECK(rig.ledger.blocks().back().txs.size() == 6);
  CHECK(rig.ledger.get_row_count("customer") == 25);
  CHECK(rig.db.table("customer").find(key(96244914))->at(1) == Value::text("yuthgbvfg"));
}

TEST_CASE("insert errors leave both sides untouched") {
  Rig rig;
  load_tpch(rig);
  const auto height = rig.ledger.head_height();
  CHECK_THROWS_AS(rig.verifier.process("insert into region values (1, 'x', 'y')"),
                  DuplicatePrimaryKey);
  CHECK_THROWS_AS(rig.verifier.process("insert into region values (50, 'x', 'y'), (50, 'z', 'w')"),
                  DuplicatePrimaryKey);
  CHECK_THROWS_AS(rig.verifier.process("insert into region values (50, 'x')"), ArityError);
  CHECK_THROWS_AS(rig.verifier.process("insert into region (r_name) values ('x')"), TypeError);
  CHECK_THROWS_AS(rig.verifier.process("insert into region (r_name, r_name) values ('x', 'y')"),
                  DuplicateColumn);
  CHECK_THROWS_AS(
      rig.verifier.process("insert into region select r_regionkey + 10, r_name, r_comment from region"),
      UnsupportedFeature);
  CHECK(rig.ledger.head_height() == height);
  CHECK(rig.db.row_count("region") == 5);

  auto partial = rig.verifier.process("insert into region (r_regionkey) values (9)");
  CHECK(partial.rows_affected == 1);
  CHECK(*rig.db.table("region").find(key(9)) == Row{Value::integer(9), Value(), Value()});
}

TEST_CASE("INSERT ... SELECT verifies its source") {
  Rig rig;
  load_tpch(rig);
  const Value nation = rig.db.table("customer").rows().begin()->second[3];
  const std::string q =
      "insert into supplier (s_suppkey, s_name, s_address, s_nationkey, s_phone, s_acctbal, "
      "s_comment) select ( c_custkey + 1000 ), c_name, c_address, c_nationkey, c_phone, "
      "c_acctbal, c_comment from customer where c_nationkey = " +
      std::to_string(nation.as_integer());
  std::size_t expected = 0;
  for (const auto& [k, row] : rig.db.table("customer").rows()) expected += row[3] == nation;
  REQUIRE(expected >= 1);

  SUBCASE("clean source") {
    auto r = rig.verifier.process(q);
    CHECK(r.rows_affected == expected);
    CHECK(r.report.tuples_checked == expected);
    CHECK(rig.ledger.get_row_count("supplier") == 5 + static_cast<std::int64_t>(expected));
    CHECK(rig.verifier.audit_full().clean());
  }
  SUBCASE("tampered source") {
    Row victim;
    for (const auto& [k, row] : rig.db.table("customer").rows()) {
      if (row[3] == nation) victim = k;
    }
    REQUIRE_FALSE(victim.empty());
    rig.db.raw_mutate("customer", victim, "c_phone", Value::text("000"));
    const auto height = rig.ledger.head_height();
    CHECK_THROWS_AS(rig.verifier.process(q), TamperDetected);
    CHECK(rig.ledger.head_height() == height);
    CHECK(rig.db.row_count("supplier") == 5);
  }
}

TEST_CASE("scalar-subquery UPDATE") {
  Rig rig;
  update_example_schema(rig);
  const auto height = rig.ledger.head_height();
  const auto before = digest_of(rig, "t1", key(1));
  auto r = rig.verifier.process(
      "UPDATE T1 SET T1.a = (SELECT a FROM T2 WHERE T2.key=1234) WHERE T1.b = 4567", "peer1");
  CHECK(r.rows_affected == 1);
  CHECK(r.report.tuples_checked == 2);
  CHECK(r.report.ledger_txs_committed == 1);
  CHECK(r.report.tables_touched == std::vector<std::string>{"t1", "t2"});
  CHECK(rig.ledger.head_height() == height + 1);
  CHECK(*rig.db.table("t1").find(key(1)) ==
        Row{Value::integer(1), Value::integer(777), Value::integer(4567)});
  CHECK(*rig.db.table("t1").find(key(2)) ==
        Row{Value::integer(2), Value::integer(20), Value::integer(99)});
  const auto history = rig.ledger.history(before.row_id);
  REQUIRE(history.size() == 2);
  CHECK(history[0].fingerprint == before.fingerprint);
  CHECK(history[1].owner == "peer1");
  CHECK(history[1].fingerprint == digest_of(rig, "t1", key(1)).fingerprint);
  CHECK(rig.verifier.audit_full().clean());
}

TEST_CASE("UPDATE edge cases") {
  Rig rig;
  update_example_schema(rig);
  const auto height = rig.ledger.head_height();
  const auto snapshot = rig.db.table("t1").rows();

  SUBCASE("non-scalar subquery") {
    CHECK_THROWS_AS(rig.verifier.process("update t1 set a = (select a from t2 where a = 888)"),
                    NonScalarSubquery);
    CHECK_THROWS_AS(rig.verifier.process("update t1 set a = (select a from t2 where a = 0)"),
                    NonScalarSubquery);
    CHECK_THROWS_AS(rig.verifier.process("update t1 set a = (select key, a from t2 where key = 1234)"),
                    NonScalarSubquery);
  }
  SUBCASE("no matching row") {
    auto r = rig.verifier.process("update t1 set a = 5 where b = -1");
    CHECK(r.rows_affected == 0);
    CHECK_FALSE(r.block_height);
  }
  SUBCASE("primary key target") {
    CHECK_THROWS_AS(rig.verifier.process("update t1 set id = 9 where id = 1"), PkUpdateUnsupported);
  }
  SUBCASE("unknown target") {
    CHECK_THROWS_AS(rig.verifier.process("update t1 set zz = 9"), UnknownColumn);
    CHECK_THROWS_AS(rig.verifier.process("update t1 set t2.a = 9"), UnknownTable);
  }
  SUBCASE("tampered subquery row") {
    rig.db.raw_mutate("t2", key(1234), "a", Value::integer(1));
    CHECK_THROWS_AS(
        rig.verifier.process("update t1 set a = (select a from t2 where key = 1234) where id = 1"),
        TamperDetected);
  }
  CHECK(rig.ledger.head_height() == height);
  CHECK(rig.db.table("t1").rows() == snapshot);
}

TEST_CASE("UPDATE expressions read the old row") {
  Rig rig;
  update_example_schema(rig);
  rig.verifier.process("update t1 set a = a * 2 + b, b = 0 where id = 2");
  CHECK(*rig.db.table("t1").find(key(2)) ==
        Row{Value::integer(2), Value::integer(139), Value::integer(0)});
  CHECK(rig.verifier.audit_full().clean());
}

TEST_CASE("multi-row DELETE") {
  Rig rig;
  load_tpch(rig);
  std::size_t matching = 0;
  for (const auto& [k, row] : rig.db.table("lineitem").rows()) {
    matching += row[8] == Value::text("n");
  }
  REQUIRE(matching > 1);
  auto r = rig.verifier.process("delete from lineitem where l_returnflag = 'n'");
  CHECK(r.rows_affected == matching);
  CHECK(rig.ledger.blocks().back().txs.size() == matching + 1);
  CHECK(rig.ledger.get_row_count("lineitem") == 60 - static_cast<std::int64_t>(matching));
  CHECK(rig.db.row_count("lineitem") == 60 - matching);
  CHECK(rig.verifier.audit_full().clean());

  auto none = rig.verifier.process("delete from lineitem where l_returnflag = 'n'");
  CHECK(none.rows_affected == 0);
  CHECK_FALSE(none.block_height);
}

TEST_CASE("DELETE over a tampered row deletes nothing") {
  Rig rig;
  load_tpch(rig);
  rig.db.raw_mutate("supplier", key(3), "s_phone", Value::text("x"));
  const auto height = rig.ledger.head_height();
  CHECK_THROWS_AS(rig.verifier.process("delete from supplier where s_suppkey > 1"), TamperDetected);
  CHECK(rig.ledger.head_height() == height);
  CHECK(rig.db.row_count("supplier") == 5);
}

TEST_CASE("ledger failure leaves storage unchanged") {
  Rig rig;
  load_tpch(rig);
  for (auto& p : rig.ledger.network().peers()) p.behavior = ledger::PeerBehavior::Refuse;
  CHECK_THROWS_AS(rig.verifier.process("delete from region where r_regionkey = 0"),
                  EndorsementFailed);
  CHECK_THROWS_AS(rig.verifier.process("update region set r_name = 'q'"), EndorsementFailed);
  CHECK_THROWS_AS(rig.verifier.process("insert into region values (9, 'a', 'b')"),
                  EndorsementFailed);
  CHECK(rig.db.row_count("region") == 5);
  CHECK(rig.db.table("region").find(key(0))->at(1) == Value::text("africa"));
  CHECK_THROWS_AS(rig.verifier.process("delete from region", "nobody"), EndorsementFailed);
}

TEST_CASE("count and full audits") {
  Rig rig;
  load_tpch(rig);
  CHECK(rig.verifier.audit_counts().empty());
  CHECK(rig.verifier.audit_full().clean());

  SUBCASE("one illegitimate delete") {
    rig.db.raw_delete("lineitem", rig.db.table("lineitem").rows().begin()->first);
    CHECK(rig.verifier.audit_counts() == std::vector<CountMismatch>{{"lineitem", 59, 60}});
    const auto full = rig.verifier.audit_full();
    CHECK(full.alerts.empty());
    CHECK(full.missing.size() == 1);
  }
  SUBCASE("delete hidden by a dummy insert") {
    const Row victim = key(3);
    const auto victim_rid = fp::row_id(victim, "region");
    rig.db.raw_delete("region", victim);
    rig.db.raw_insert({"region", {Value::integer(77), Value::text("dummy"), Value::text("x")}});
    CHECK(rig.verifier.audit_counts().empty());
    const auto full = rig.verifier.audit_full();
    REQUIRE(full.alerts.size() == 1);
    CHECK(full.alerts[0].expectation == Expectation::Absent);
    CHECK(full.alerts[0].row_id == fp::row_id(key(77), "region"));
    CHECK(full.missing == std::vector<MissingRow>{{victim_rid, "region"}});
  }
  SUBCASE("one modified row") {
    rig.db.raw_mutate("orders", key(5), "o_comment", Value::text("edited"));
    CHECK(rig.verifier.audit_counts().empty());
    const auto full = rig.verifier.audit_full();
    CHECK(full.alerts.size() == 1);
    CHECK(full.missing.empty());
  }
  SUBCASE("a row resurrected after a legitimate delete") {
    const Row row = *rig.db.table("region").find(key(4));
    rig.verifier.process("delete from region where r_regionkey = 4");
    rig.db.raw_insert({"region", row});
    const auto full = rig.verifier.audit_full();
    REQUIRE(full.alerts.size() == 1);
    CHECK(full.alerts[0].expectation == Expectation::Deleted);
    CHECK_THROWS_AS(rig.verifier.process("select * from region"), TamperDetected);
  }
}

TEST_CASE("property: no false positives under legitimate traffic") {
  Rig rig;
  testing::create_small_schema(rig.db);
  std::mt19937 rng(99);
  testing::fill_small_tables(rig.db, rng);
  rig.verifier.bootstrap();
  testing::QueryGenerator gen(4);
  std::int64_t next_key = 100;
  for (int i = 0; i < 120; ++i) {
    std::string q;
    switch (rng() % 5) {
      case 0:
        q = "insert into t1 values (" + std::to_string(next_key++) + ", " +
            std::to_string(rng() % 5) + ", " + std::to_string(rng() % 5) + ")";
        break;
      case 1:
        q = "update t2 set b = b + 1, s = 'u' where a <= " + std::to_string(rng() % 6);
        break;
      case 2:
        q = "delete from t3 where c = " + std::to_string(rng() % 8);
        break;
      case 3:
        q = "update t1 set y = (select count(*) from t2) where x = " + std::to_string(rng() % 8);
        break;
      default:
        q = gen.next();
    }
    CAPTURE(q);
    const auto r = rig.verifier.process(q);
    CHECK(r.report.outcome == Outcome::Verified);
    if (r.report.query_kind == sql::QueryKind::Select) {
      CHECK(sorted(r.rows) == sorted(rig.db.exec_select(sql::parse_select(q)).rows));
    }
  }
  CHECK(rig.verifier.audit_counts().empty());
  CHECK(rig.verifier.audit_full().clean());
  CHECK(rig.ledger.verify_chain().ok);
}

TEST_CASE("property: any single modification is caught when the row is read") {
  std::mt19937 rng(5150);
  for (int round = 0; round < 25; ++round) {
    Rig rig;
    load_tpch(rig);
    const auto& defs = rig.db.catalog().tables();
    const auto& def = defs[rng() % defs.size()];
    const auto& rows = rig.db.table(def.name).rows();
    auto it = rows.begin();
    std::advance(it, static_cast<long>(rng() % rows.size()));
    const Row pk = it->first;
    std::size_t column;
    do {
      column = rng() % def.columns.size();
    } while (def.is_pk_column(column));
    const Value old = it->second[column];
    const Value changed = old.kind() == Value::Kind::Text ? Value::text(old.as_text() + "!")
                                                          : Value::null();
    rig.db.raw_mutate(def.name, pk, def.columns[column].name, changed);
    CAPTURE(def.name);
    CHECK_THROWS_AS(rig.verifier.process("select * from " + def.name), TamperDetected);
    const auto full = rig.verifier.audit_full();
    CHECK(full.alerts.size() == 1);
    CHECK(rig.verifier.audit_counts().empty());
  }
}

TEST_CASE("property: full audit flags whatever the count audit flags") {
  std::mt19937 rng(8080);
  for (int round = 0; round < 40; ++round) {
    Rig rig;
    testing::create_small_schema(rig.db);
    testing::fill_small_tables(rig.db, rng);
    rig.verifier.bootstrap();
    for (int step = static_cast<int>(rng() % 4); step >= 0; --step) {
      const char* table = rng() % 2 ? "t1" : "t2";
      const auto& rows = rig.db.table(table).rows();
      if (rng() % 2 && !rows.empty()) {
        rig.db.raw_delete(table, rows.begin()->first);
      } else {
        const auto k = static_cast<std::int64_t>(50 + rng() % 5);
        if (!rig.db.table(table).find(key(k))) {
          Row row = std::string(table) == "t1"
                        ? Row{Value::integer(k), Value::integer(1), Value::integer(1)}
                        : Row{Value::integer(k), Value::text("d"), Value::integer(1)};
          rig.db.raw_insert({table, row});
        }
      }
    }
    if (!rig.verifier.audit_counts().empty()) CHECK_FALSE(rig.verifier.audit_full().clean());
  }
}
