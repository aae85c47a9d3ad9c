#include "verity/bench/bench.hpp"

#include <algorithm>
#include <regex>

#include "verity/sql/parser.hpp"

namespace verity::bench {

namespace {

using Seconds = std::chrono::duration<double>;

bool has_derived(const sql::SelectQuery& q) {
  return std::any_of(q.from_items.begin(), q.from_items.end(), [](const sql::FromItem& item) {
    return std::holds_alternative<sql::DerivedTable>(item.source);
  });
}

}  // namespace

std::vector<BenchQuery> read_queries(std::istream& in) {
  static const std::regex prefixed(R"(^\s*([A-Za-z0-9_]+)\s*:\s*(.*)$)");
  std::vector<BenchQuery> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line.compare(first, 2, "--") == 0) continue;
    std::smatch m;
    if (std::regex_match(line, m, prefixed)) {
      out.push_back({m[1], m[2]});
    } else {
      out.push_back({"q" + std::to_string(out.size() + 1), line.substr(first)});
    }
  }
  return out;
}

double BenchRecord::per_tuple_seconds() const {
  return tuples() == 0 ? 0.0 : mean_seconds / static_cast<double>(tuples());
}

double BenchRecord::lookup_per_tuple_seconds() const {
  return tuples_checked == 0 ? 0.0
                             : Seconds(mean_phases.ledger_lookup).count() /
                                   static_cast<double>(tuples_checked);
}

std::string kind_tag(const sql::Query& query) {
  return std::visit(
      [](const auto& q) -> std::string {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, sql::SelectQuery>) {
          return has_derived(q) ? "S(S)" : "S";
        } else if constexpr (std::is_same_v<T, sql::InsertQuery>) {
          return std::holds_alternative<sql::ValuesRows>(q.source) ? "I" : "I(S)";
        } else if constexpr (std::is_same_v<T, sql::UpdateQuery>) {
          const bool nested = std::any_of(q.set_clauses.begin(), q.set_clauses.end(),
                                          [](const sql::SetClause& c) {
                                            return !std::holds_alternative<sql::Expr>(c.value);
                                          });
          return nested ? "U(S)" : "U";
        } else {
          return "D";
        }
      },
      query.statement);
}

std::vector<BenchRecord> run_bench(storage::Database& db, ledger::SimulatedLedger& ledger,
                                   const std::vector<BenchQuery>& queries,
                                   const BenchOptions& options) {
  // SELECTs run against the originals; mutations get private copies so runs
  // stay independent.
  auto execute = [&](const BenchQuery& q, bool read_only) {
    const verifier::VerifierOptions vo{ledger::system_clock(), {}, options.principal};
    if (read_only) {
      verifier::Verifier v(db, ledger, vo);
      const auto start = std::chrono::steady_clock::now();
      auto result = v.process(q.sql);
      return std::pair{std::chrono::steady_clock::now() - start, std::move(result.report)};
    }
    storage::Database copy = db;
    ledger::SimulatedLedger led = ledger.clone_in_memory();
    verifier::Verifier v(copy, led, vo);
    const auto start = std::chrono::steady_clock::now();
    auto result = v.process(q.sql);
    return std::pair{std::chrono::steady_clock::now() - start, std::move(result.report)};
  };

  std::vector<BenchRecord> records;
  for (const auto& q : queries) {
    BenchRecord rec;
    rec.id = q.id;
    try {
      rec.kind = kind_tag(sql::parse(q.sql));
    } catch (const Error& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  // Warm every query before timing any of them.
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (std::size_t w = 0; w < options.warmup && !records[i].error; ++w) {
      try {
        execute(queries[i], records[i].kind.starts_with("S"));
      } catch (const Error& e) {
        records[i].error = e.what();
      }
    }
  }
  // Timed runs go round-robin over the queries, so a burst of machine noise
  // is shared instead of landing on one query's runs.
  std::vector<Seconds> totals(queries.size(), Seconds{0});
  std::vector<verifier::PhaseTimes> phases(queries.size());
  for (std::size_t run = 0; run < options.runs; ++run) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      BenchRecord& rec = records[i];
      if (rec.error) continue;
      try {
        const auto [elapsed, r] = execute(queries[i], rec.kind.starts_with("S"));
        totals[i] += elapsed;
        phases[i].parse += r.elapsed.parse;
        phases[i].rewrite += r.elapsed.rewrite;
        phases[i].db_exec += r.elapsed.db_exec;
        phases[i].ledger_lookup += r.elapsed.ledger_lookup;
        phases[i].ledger_commit += r.elapsed.ledger_commit;
        rec.tuples_checked = r.tuples_checked;
        rec.tuples_mutated = r.tuples_mutated;
        rec.tables = r.tables_touched;
        ++rec.runs;
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    BenchRecord& rec = records[i];
    if (rec.runs == 0) continue;
    const auto n = static_cast<std::int64_t>(rec.runs);
    const auto& p = phases[i];
    rec.mean_seconds = totals[i].count() / static_cast<double>(rec.runs);
    rec.mean_phases = {p.parse / n, p.rewrite / n, p.db_exec / n, p.ledger_lookup / n,
                       p.ledger_commit / n};
  }
  return records;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  fit.points = std::min(x.size(), y.size());
  if (fit.points == 0) return fit;
  const double n = static_cast<double>(fit.points);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LinearFit fit_records(const std::vector<BenchRecord>& records) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.error || r.tuples() == 0 || r.runs == 0) continue;
    x.push_back(static_cast<double>(r.tuples()));
    y.push_back(r.mean_seconds);
  }
  return fit_linear(x, y);
}

}  // namespace verity::bench
