#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/temp_dir.hpp"
#include "verity/cli/cli.hpp"
#include "verity/fixtures/tpch.hpp"

using namespace verity;
using namespace verity::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run verity_cmd(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "verity");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text, std::string_view needle) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += line.find(needle) != std::string::npos;
  return n;
}

// A small fixture directory with a config whose peers have fixed keys.
struct Workspace {
  Workspace() {
    const auto r = verity_cmd({"fixtures", "--out", dir.path().string(), "--scale", "0.02"});
    REQUIRE(r.code == 0);
    std::ofstream(conf(), std::ios::app) << "peer_seed=cli-tests\npeers=3\n";
  }
  std::string conf() const { return dir.file("verity.conf"); }
  Run operator()(std::vector<std::string> args, const std::string& input = {}) const {
    args.insert(args.begin(), {"--config", conf()});
    return verity_cmd(std::move(args), input);
  }

  testing::TempDir dir;
};

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "ddl = schema.sql\n"
      "data_dir=data\n"
      "ledger=/abs/chain.bin\n"
      "peers=7\n"
      "principal=peer2\n"
      "format=json\n"
      "null_literal=\\N\n"
      "audit_log=logs/audit.log\n");
  const auto cfg = parse_config(in, "/base");
  CHECK(cfg.ddl == "/base/schema.sql");
  CHECK(cfg.data_dir == "/base/data");
  CHECK(cfg.ledger == "/abs/chain.bin");
  CHECK(cfg.keys_path() == "/abs/chain.bin.keys");
  CHECK(cfg.peers == 7);
  CHECK(cfg.principal == "peer2");
  CHECK(cfg.format == OutputFormat::Json);
  CHECK(cfg.null_literal == "\\N");
  CHECK(cfg.audit_log == "/base/logs/audit.log");
  CHECK_FALSE(cfg.peer_seed);

  std::istringstream minimal("ddl=a.sql\nledger=l.bin\n");
  const auto m = parse_config(minimal, "/w");
  CHECK(m.peers == 5);
  CHECK(m.principal == "peer0");
  CHECK(m.format == OutputFormat::Table);
  CHECK(m.data_dir == "/w");

  for (const char* bad : {"ddl=a\nledger=l\npeers=0\n", "ddl=a\nledger=l\npeers=x\n",
                          "ddl=a\nledger=l\nformat=xml\n", "ddl=a\nledger=l\nquorum=3\n",
                          "ddl=a\n", "ddl=a\nledger=l\njunk\n"}) {
    std::istringstream b(bad);
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_config(b, "/w"), std::invalid_argument);
  }
}

TEST_CASE("split_statements") {
  CHECK(split_statements("select 1; select 2;") == std::vector<std::string>{"select 1", "select 2"});
  CHECK(split_statements("insert into t (a) values ('x;y');") ==
        std::vector<std::string>{"insert into t (a) values ('x;y')"});
  CHECK(split_statements("select 'it''s; ok' from t") ==
        std::vector<std::string>{"select 'it''s; ok' from t"});
  CHECK(split_statements("-- a; comment\nselect 1 -- trailing; too\n;\n ; ") ==
        std::vector<std::string>{"select 1"});
  CHECK(split_statements("  ").empty());
}

TEST_CASE("committed fixtures match the generator") {
  const fs::path repo = fs::path(VERITY_SOURCE_DIR) / "fixtures";
  CHECK(slurp(repo / "tpch.sql") == fixtures::tpch_ddl());
  testing::TempDir dir;
  fixtures::write_fixture_dir(dir.path().string(), fixtures::TpchCounts::sf0001(), 42);
  for (const char* table :
       {"customer", "lineitem", "nation", "orders", "part", "partsupp", "region", "supplier"}) {
    CAPTURE(table);
    CHECK(slurp(repo / (std::string(table) + ".csv")) ==
          slurp(dir.path() / (std::string(table) + ".csv")));
  }
}

TEST_CASE("init, exec and exit codes") {
  Workspace ws;
  const auto counts = fixtures::TpchCounts::sf0001().scaled(0.02);

  auto init = ws({"init"});
  REQUIRE(init.code == 0);
  CHECK(init.out.find("Total       " + std::to_string(counts.total())) != std::string::npos);
  CHECK(init.out.find("region      5\n") != std::string::npos);
  CHECK(fs::exists(ws.dir.file("ledger.bin.keys")));

  auto again = ws({"init"});
  CHECK(again.code == 1);
  CHECK(again.err.find("already exists") != std::string::npos);

  auto select = ws({"exec", "select * from region"});
  CHECK(select.code == 0);
  CHECK(select.out.find("(5 rows)") != std::string::npos);
  CHECK(select.out.find("-- Verified SELECT tables=region checked=5") != std::string::npos);

  auto syntax = ws({"exec", "selct * from region"});
  CHECK(syntax.code == 1);
  CHECK(syntax.err.find("position 0") != std::string::npos);

  auto unknown = ws({"exec", "select * from nowhere"});
  CHECK(unknown.code == 1);

  auto verify = ws({"ledger", "verify"});
  CHECK(verify.code == 0);
  CHECK(verify.out == "chain ok, head height 1\n");
}

TEST_CASE("json-lines output") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);
  auto r = ws({"--format", "json", "exec",
               "select n_nationkey, n_name, n_nationkey + 0.5 from nation where n_nationkey < 3"});
  REQUIRE(r.code == 0);
  std::vector<nlohmann::json> lines;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0]["n_nationkey"] == 0);
  CHECK(lines[0]["n_name"] == "algeria");
  CHECK(lines[1]["col3"] == "1.5");  // decimals are strings
  CHECK(lines[3]["report"]["tuples_checked"] == 3);
  CHECK(lines[3]["report"]["outcome"] == "Verified");
  CHECK(lines[3]["report"]["elapsed_ms"].contains("ledger_lookup"));
}

TEST_CASE("mutations persist and leave history") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);
  auto upd = ws({"exec", "update nation set n_comment = 'patched' where n_nationkey = 4"});
  REQUIRE(upd.code == 0);
  CHECK(upd.out.find("1 row affected, committed in block 2") != std::string::npos);
  CHECK(slurp(ws.dir.path() / "nation.csv").find("patched") != std::string::npos);

  auto sel = ws({"exec", "select n_comment from nation where n_nationkey = 4"});
  CHECK(sel.code == 0);
  CHECK(sel.out.find("patched") != std::string::npos);

  auto hist = ws({"ledger", "history", "nation", "4"});
  CHECK(hist.code == 0);
  CHECK(count_lines(hist.out, "\tpeer0\t") == 2);
  CHECK(hist.out.find("UpdateFingerprint") != std::string::npos);

  auto script = ws.dir.file("script.sql");
  std::ofstream(script) << "insert into region (r_regionkey, r_name, r_comment) values (9, 'x', 'y');\n"
                           "delete from region where r_regionkey = 9;\n";
  CHECK(ws({"exec", "-f", script}).code == 0);
  CHECK(ws({"audit", "counts"}).code == 0);
  CHECK(ws({"audit", "full"}).out == "full audit clean\n");
}

TEST_CASE("tampering is detected and audited") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);

  REQUIRE(ws({"tamper", "customer", "2", "c_acctbal", "1000000.00"}).code == 0);
  auto hit = ws({"exec", "select c_name from customer"});
  CHECK(hit.code == 2);
  CHECK(count_lines(hit.out, "ALERT ") == 1);
  CHECK(hit.out.find("rows)") == std::string::npos);  // no result table
  CHECK(count_lines(slurp(ws.dir.path() / "audit.log"), "\tcustomer\t") == 1);
  CHECK(ws({"exec", "select * from region"}).code == 0);

  auto del = ws({"tamper", "lineitem", "1,1", "--delete"});
  REQUIRE(del.code == 0);
  auto counts = ws({"audit", "counts"});
  CHECK(counts.code == 2);
  CHECK(count_lines(counts.out, "count mismatch: lineitem") == 1);

  const auto first = slurp(ws.dir.path() / "lineitem.csv");
  const auto row = first.substr(first.find('\n') + 1, first.find('\n', first.find('\n') + 1) -
                                                          first.find('\n') - 1);
  const auto dummy = "777777" + row.substr(row.find(','));
  REQUIRE(ws({"tamper", "lineitem", "--insert", dummy}).code == 0);
  CHECK(ws({"audit", "counts"}).code == 0);
  auto full = ws({"audit", "full"});
  CHECK(full.code == 2);
  CHECK(count_lines(full.out, "\tlineitem\t") == 1);  // the dummy row
  CHECK(count_lines(full.out, "MISSING lineitem") == 1);

  CHECK(ws({"tamper", "lineitem", "1,1", "l_comment"}).code == 1);
  CHECK(ws({"tamper", "nowhere", "1", "a", "b"}).code == 1);
}

TEST_CASE("init is all-or-nothing and tolerates missing CSVs") {
  Workspace ws;
  {
    std::ofstream(ws.dir.file("region.csv"), std::ios::app) << "not-a-number,x,y\n";
    auto r = ws({"init"});
    CHECK(r.code == 1);
    CHECK(r.err.find("region.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(ws.dir.file("ledger.bin")));
    CHECK_FALSE(fs::exists(ws.dir.file("ledger.bin.keys")));
  }
  fs::remove(ws.dir.file("region.csv"));
  auto r = ws({"init"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning: no CSV for table region") != std::string::npos);
  CHECK(r.out.find("region      0\n") != std::string::npos);
  CHECK(ws({"audit", "counts"}).code == 0);
}

TEST_CASE("uninitialized ledger and config lookup") {
  Workspace ws;
  auto r = ws({"exec", "select * from region"});
  CHECK(r.code == 1);
  CHECK(r.err.find("verity init") != std::string::npos);

  ::unsetenv("VERITY_CONFIG");
  CHECK(verity_cmd({"audit", "counts"}).code == 1);
  ::setenv("VERITY_CONFIG", ws.conf().c_str(), 1);
  CHECK(verity_cmd({"init"}).code == 0);
  CHECK(verity_cmd({"audit", "counts"}).code == 0);
  ::unsetenv("VERITY_CONFIG");

  CHECK(verity_cmd({}).code == 1);
  CHECK(verity_cmd({"--help"}).code == 0);
}

TEST_CASE("corrupted ledger file is reported") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);
  REQUIRE(ws({"exec", "delete from region where r_regionkey = 0"}).code == 0);
  auto bytes = slurp(ws.dir.path() / "ledger.bin");
  bytes[bytes.size() - 40] ^= 0x01;
  std::ofstream(ws.dir.file("ledger.bin"), std::ios::binary | std::ios::trunc) << bytes;
  auto r = ws({"ledger", "verify"});
  CHECK(r.code == 2);
  CHECK(r.out.find("chain broken at height 2") != std::string::npos);
  CHECK(r.err.find("warning: ledger chain damaged") != std::string::npos);
  CHECK(ws({"exec", "update nation set n_comment = 'z' where n_nationkey = 1"}).code == 1);
}

TEST_CASE("repl meta-commands") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);
  REQUIRE(ws({"tamper", "region", "1", "--delete"}).code == 0);
  REQUIRE(ws({"tamper", "region", "--insert", "8,dummy,row"}).code == 0);
  auto r = ws({"repl"},
              ".tables\n"
              ".schema region\n"
              "select * from nation where n_nationkey = 2\n"
              ".ledger verify\n"
              ".audit counts\n"
              ".audit full\n"
              ".ledger history nation 2\n"
              ".bogus\n"
              ".quit\n"
              "select * from nation\n");
  CHECK(r.out.find("region\t5\n") != std::string::npos);
  CHECK(r.out.find("CREATE TABLE region (r_regionkey INTEGER, r_name TEXT, r_comment TEXT, "
                   "PRIMARY KEY (r_regionkey))") != std::string::npos);
  CHECK(r.out.find("(1 row)") != std::string::npos);
  CHECK(r.out.find("chain ok, head height 1") != std::string::npos);
  CHECK(r.out.find("count audit clean") != std::string::npos);
  CHECK(count_lines(r.out, "MISSING region") == 1);
  CHECK(count_lines(r.out, "ALERT ") == 1);
  CHECK(r.out.find("PutFingerprint\tpeer0") != std::string::npos);
  CHECK(r.err.find("unknown command '.bogus'") != std::string::npos);
  CHECK(count_lines(r.out, "(25 rows)") == 0);  // nothing runs after .quit
}

TEST_CASE("bench command") {
  Workspace ws;
  REQUIRE(ws({"init"}).code == 0);
  const auto queries = ws.dir.file("bench.sql");
  std::ofstream(queries) << "r: select * from region\n"
                            "n: select * from nation\n"
                            "none: select * from region where r_regionkey < 0\n"
                            "u: update nation set n_comment = 'b' where n_nationkey = 3\n";
  const auto json_path = ws.dir.file("bench.jsonl");
  auto r = ws({"bench", queries, "--runs", "2", "--json", json_path});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("fit: seconds = ") != std::string::npos);
  CHECK(r.out.find("over 3 queries") != std::string::npos);
  std::vector<nlohmann::json> lines;
  std::istringstream in(slurp(json_path));
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0]["id"] == "r");
  CHECK(lines[0]["tuples_checked"] == 5);
  CHECK(lines[3]["kind"] == "U");
  CHECK(lines[4]["fit"]["points"] == 3);
  // The benchmark never changes persisted state.
  CHECK(slurp(ws.dir.path() / "nation.csv").find(",b\n") == std::string::npos);
  CHECK(ws({"ledger", "verify"}).out == "chain ok, head height 1\n");
}
