#include "verity/fixtures/tpch.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "verity/errors.hpp"

namespace verity::fixtures {

using storage::Row;
using storage::Value;

namespace {

constexpr std::string_view kDdl =
    R"(CREATE TABLE region (
  r_regionkey INTEGER,
  r_name TEXT,
  r_comment TEXT,
  PRIMARY KEY (r_regionkey)
);
CREATE TABLE nation (
  n_nationkey INTEGER,
  n_name TEXT,
  n_regionkey INTEGER,
  n_comment TEXT,
  PRIMARY KEY (n_nationkey)
);
CREATE TABLE supplier (
  s_suppkey INTEGER,
  s_name TEXT,
  s_address TEXT,
  s_nationkey INTEGER,
  s_phone TEXT,
  s_acctbal DECIMAL(15,2),
  s_comment TEXT,
  PRIMARY KEY (s_suppkey)
);
CREATE TABLE customer (
  c_custkey INTEGER,
  c_name TEXT,
  c_address TEXT,
  c_nationkey INTEGER,
  c_phone TEXT,
  c_acctbal DECIMAL(15,2),
  c_mktsegment TEXT,
  c_comment TEXT,
  PRIMARY KEY (c_custkey)
);
CREATE TABLE part (
  p_partkey INTEGER,
  p_name TEXT,
  p_mfgr TEXT,
  p_brand TEXT,
  p_type TEXT,
  p_size INTEGER,
  p_container TEXT,
  p_retailprice DECIMAL(15,2),
  p_comment TEXT,
  PRIMARY KEY (p_partkey)
);
CREATE TABLE partsupp (
  ps_partkey INTEGER,
  ps_suppkey INTEGER,
  ps_availqty INTEGER,
  ps_supplycost DECIMAL(15,2),
  ps_comment TEXT,
  PRIMARY KEY (ps_partkey, ps_suppkey)
);
CREATE TABLE orders (
  o_orderkey INTEGER,
  o_custkey INTEGER,
  o_orderstatus TEXT,
  o_totalprice DECIMAL(15,2),
  o_orderdate DATE,
  o_orderpriority TEXT,
  o_clerk TEXT,
  o_shippriority INTEGER,
  o_comment TEXT,
  PRIMARY KEY (o_orderkey)
);
CREATE TABLE lineitem (
  l_orderkey INTEGER,
  l_partkey INTEGER,
  l_suppkey INTEGER,
  l_linenumber INTEGER,
  l_quantity DECIMAL(15,2),
  l_extendedprice DECIMAL(15,2),
  l_discount DECIMAL(15,2),
  l_tax DECIMAL(15,2),
  l_returnflag TEXT,
  l_linestatus TEXT,
  l_shipdate DATE,
  l_commitdate DATE,
  l_receiptdate DATE,
  l_shipinstruct TEXT,
  l_shipmode TEXT,
  l_comment TEXT,
  PRIMARY KEY (l_orderkey, l_linenumber)
);
)";

constexpr std::array<std::string_view, 5> kRegions = {"africa", "america", "asia", "europe",
                                                      "middle east"};

struct NationSeed {
  std::string_view name;
  int region;
};
constexpr std::array<NationSeed, 25> kNations = {{
    {"algeria", 0},     {"argentina", 1},  {"brazil", 1},         {"canada", 1},
    {"egypt", 4},       {"ethiopia", 0},   {"france", 3},         {"germany", 3},
    {"india", 2},       {"indonesia", 2},  {"iran", 4},           {"iraq", 4},
    {"japan", 2},       {"jordan", 4},     {"kenya", 0},          {"morocco", 0},
    {"mozambique", 0},  {"peru", 1},       {"china", 2},          {"romania", 3},
    {"saudi arabia", 4}, {"vietnam", 2},   {"russia", 3},         {"united kingdom", 3},
    {"united states", 1},
}};

constexpr std::array<std::string_view, 24> kWords = {
    "furiously", "slyly",    "carefully", "blithely", "quickly", "fluffily", "final",   "ironic",
    "regular",   "express",  "special",   "pending",  "bold",    "even",     "silent",  "unusual",
    "requests",  "packages", "deposits",  "accounts", "foxes",   "ideas",    "theodolites", "haggle"};
constexpr std::array<std::string_view, 16> kColors = {
    "almond", "antique", "azure",  "black",  "blanched", "blue",   "burlywood", "chartreuse",
    "coral",  "cyan",    "drab",   "forest", "khaki",    "lavender", "linen",   "tan"};
constexpr std::array<std::string_view, 6> kTypeSize = {"standard", "small", "medium",
                                                       "large",    "economy", "promo"};
constexpr std::array<std::string_view, 5> kTypeFinish = {"anodized", "burnished", "plated",
                                                         "polished", "brushed"};
constexpr std::array<std::string_view, 5> kTypeMetal = {"tin", "nickel", "brass", "steel",
                                                        "copper"};
constexpr std::array<std::string_view, 5> kContainers = {"sm case", "med box", "lg jar",
                                                         "jumbo pkg", "wrap bag"};
constexpr std::array<std::string_view, 5> kSegments = {"automobile", "building", "furniture",
                                                       "machinery", "household"};
constexpr std::array<std::string_view, 5> kPriorities = {"1-urgent", "2-high", "3-medium",
                                                         "4-not specified", "5-low"};
constexpr std::array<std::string_view, 7> kShipModes = {"reg air", "air",  "rail", "ship",
                                                        "truck",   "mail", "fob"};
constexpr std::array<std::string_view, 4> kInstructions = {"deliver in person", "collect cod",
                                                           "none", "take back return"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  template <std::size_t N>
  std::string pick(const std::array<std::string_view, N>& list) {
    return std::string(list[static_cast<std::size_t>(uniform(0, N - 1))]);
  }
  std::string words(int lo, int hi) {
    std::string out;
    for (std::int64_t i = uniform(lo, hi); i > 0; --i) {
      if (!out.empty()) out += ' ';
      out += pick(kWords);
    }
    return out;
  }
  std::string phone(std::int64_t nation) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%02lld-%03lld-%03lld-%04lld", static_cast<long long>(nation + 10),
                  static_cast<long long>(uniform(100, 999)), static_cast<long long>(uniform(100, 999)),
                  static_cast<long long>(uniform(1000, 9999)));
    return buf;
  }
  std::string address() {
    static constexpr std::string_view kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string out;
    for (std::int64_t i = uniform(10, 25); i > 0; --i) {
      out += kAlnum[static_cast<std::size_t>(uniform(0, kAlnum.size() - 1))];
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

Value integer(std::int64_t v) { return Value::integer(v); }
Value text(std::string s) { return Value::text(std::move(s)); }

// Fixed-point value with two fractional digits.
Value cents(std::int64_t c) {
  char buf[32];
  const char* sign = c < 0 ? "-" : "";
  const long long a = c < 0 ? -c : c;
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", sign, a / 100, a % 100);
  return Value::decimal(*storage::Decimal::parse(buf));
}

using Days = std::chrono::sys_days;

Days day_of(int y, unsigned m, unsigned d) {
  return Days(std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d});
}

Value date(Days d) {
  const std::chrono::year_month_day ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return Value::date(buf);
}

std::string numbered(std::string_view prefix, std::int64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%09lld", static_cast<long long>(n));
  return std::string(prefix) + "#" + buf;
}

void insert(storage::Database& db, const std::string& table, Row row) {
  db.apply_row_insert(storage::Tuple{table, std::move(row)});
}

}  // namespace

TpchCounts TpchCounts::sf0001() { return {150, 6005, 25, 1500, 200, 700, 5, 10}; }

TpchCounts TpchCounts::scaled(double factor) const {
  auto s = [factor](std::int64_t n) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(static_cast<double>(n) * factor));
  };
  TpchCounts out{s(customer), s(lineitem), nation, s(orders), s(part), s(partsupp), region,
                 s(supplier)};
  out.partsupp = std::min(out.partsupp, out.part * out.supplier);
  out.lineitem = std::min(out.lineitem, 7 * out.orders);
  return out;
}

std::string_view tpch_ddl() { return kDdl; }

void populate(storage::Database& db, const TpchCounts& c, std::uint64_t seed) {
  if (!db.catalog().contains("region")) db.create_tables(kDdl);
  Gen g(seed);

  for (std::int64_t r = 0; r < c.region; ++r) {
    const std::string name = r < std::int64_t(kRegions.size()) ? std::string(kRegions[r])
                                                               : "region " + std::to_string(r);
    insert(db, "region", {integer(r), text(name), text(g.words(3, 8))});
  }
  for (std::int64_t n = 0; n < c.nation; ++n) {
    const bool known = n < std::int64_t(kNations.size());
    const std::string name = known ? std::string(kNations[n].name) : "nation " + std::to_string(n);
    const std::int64_t region = known ? kNations[n].region : g.uniform(0, c.region - 1);
    insert(db, "nation", {integer(n), text(name), integer(region), text(g.words(4, 10))});
  }
  std::vector<std::int64_t> supp_nation(c.supplier + 1);
  for (std::int64_t s = 1; s <= c.supplier; ++s) {
    supp_nation[s] = g.uniform(0, c.nation - 1);
    insert(db, "supplier",
           {integer(s), text(numbered("supplier", s)), text(g.address()), integer(supp_nation[s]),
            text(g.phone(supp_nation[s])), cents(g.uniform(-99999, 999999)), text(g.words(5, 12))});
  }
  for (std::int64_t k = 1; k <= c.customer; ++k) {
    const std::int64_t nation = g.uniform(0, c.nation - 1);
    insert(db, "customer",
           {integer(k), text(numbered("customer", k)), text(g.address()), integer(nation),
            text(g.phone(nation)), cents(g.uniform(-99999, 999999)), text(g.pick(kSegments)),
            text(g.words(5, 14))});
  }
  std::vector<std::int64_t> retail(c.part + 1);
  for (std::int64_t p = 1; p <= c.part; ++p) {
    std::string name;
    for (int i = 0; i < 5; ++i) name += (i ? " " : "") + g.pick(kColors);
    const std::int64_t mfgr = g.uniform(1, 5);
    retail[p] = 90000 + (p / 10) % 20001 + 100 * (p % 1000);
    insert(db, "part",
           {integer(p), text(name), text("manufacturer#" + std::to_string(mfgr)),
            text("brand#" + std::to_string(mfgr) + std::to_string(g.uniform(1, 5))),
            text(g.pick(kTypeSize) + " " + g.pick(kTypeFinish) + " " + g.pick(kTypeMetal)),
            integer(g.uniform(1, 50)), text(g.pick(kContainers)), cents(retail[p]),
            text(g.words(2, 5))});
  }
  // Pair i supplies part (i mod P)+1 from a supplier offset by i/P, so pairs are unique.
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  const std::int64_t n_pairs = std::min(c.partsupp, c.part * c.supplier);
  for (std::int64_t i = 0; i < n_pairs; ++i) {
    const std::int64_t part = i % c.part + 1;
    const std::int64_t supp = (i / c.part + part) % c.supplier + 1;
    pairs.emplace_back(part, supp);
    insert(db, "partsupp",
           {integer(part), integer(supp), integer(g.uniform(1, 9999)), cents(g.uniform(100, 100000)),
            text(g.words(5, 15))});
  }

  // Spread line items over orders, at most seven per order.
  std::vector<std::int64_t> lines(c.orders, 0);
  const std::int64_t n_lines = std::min(c.lineitem, 7 * c.orders);
  for (std::int64_t i = 0; i < n_lines; ++i) {
    std::int64_t o = g.uniform(0, c.orders - 1);
    while (lines[o] == 7) o = (o + 1) % c.orders;
    ++lines[o];
  }
  const Days first = day_of(1992, 1, 1);
  const Days last = day_of(1998, 8, 2);
  const Days today = day_of(1995, 6, 17);
  for (std::int64_t o = 0; o < c.orders; ++o) {
    const std::int64_t orderkey = o + 1;
    const Days ordered = first + std::chrono::days(g.uniform(0, (last - first).count() - 121));
    std::int64_t total = 0;
    int open = 0;
    for (std::int64_t l = 1; l <= lines[o]; ++l) {
      const auto& [part, supp] = pairs[static_cast<std::size_t>(g.uniform(0, n_pairs - 1))];
      const std::int64_t qty = g.uniform(1, 50);
      const std::int64_t price = qty * retail[part];
      const std::int64_t discount = g.uniform(0, 10);
      const std::int64_t tax = g.uniform(0, 8);
      const Days ship = ordered + std::chrono::days(g.uniform(1, 121));
      const Days commit = ordered + std::chrono::days(g.uniform(30, 90));
      const Days receipt = ship + std::chrono::days(g.uniform(1, 30));
      const bool shipped = ship <= today;
      open += shipped ? 0 : 1;
      std::string flag = receipt <= today ? (g.uniform(0, 1) ? "r" : "a") : "n";
      total += price * (100 - discount) / 100 * (100 + tax) / 100;
      insert(db, "lineitem",
             {integer(orderkey), integer(part), integer(supp), integer(l), cents(qty * 100),
              cents(price), cents(discount), cents(tax), text(flag), text(shipped ? "f" : "o"),
              date(ship), date(commit), date(receipt), text(g.pick(kInstructions)),
              text(g.pick(kShipModes)), text(g.words(2, 6))});
    }
    const std::string status = open == 0 ? "f" : open == lines[o] ? "o" : "p";
    insert(db, "orders",
           {integer(orderkey), integer(g.uniform(1, c.customer)), text(status), cents(total),
            date(ordered), text(g.pick(kPriorities)), text(numbered("clerk", g.uniform(1, 1000))),
            integer(0), text(g.words(4, 12))});
  }
}

void write_fixture_dir(const std::string& dir, const TpchCounts& counts, std::uint64_t seed) {
  storage::Database db;
  populate(db, counts, seed);
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  std::ofstream(root / "tpch.sql") << kDdl;
  for (const auto& def : db.catalog().tables()) {
    std::ofstream out(root / (def.name + ".csv"));
    db.write_csv(def.name, out);
    if (!out) throw Error("cannot write " + (root / (def.name + ".csv")).string());
  }
}

}  // namespace verity::fixtures
