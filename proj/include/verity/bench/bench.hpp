#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "verity/ledger/simulated_ledger.hpp"
#include "verity/sql/ast.hpp"
#include "verity/storage/database.hpp"
#include "verity/verifier/verifier.hpp"

namespace verity::bench {

struct BenchQuery {
  std::string id;
  std::string sql;
};

/// Reads one statement per line, optionally prefixed `id:`; blank lines and
/// `--` comments are skipped. Unprefixed lines are named q1, q2, ...
std::vector<BenchQuery> read_queries(std::istream& in);

struct BenchRecord {
  std::string id;
  std::string kind;  // S, I, U, D; nested kinds in parentheses, e.g. U(S)
  std::vector<std::string> tables;
  std::size_t tuples_checked = 0;
  std::size_t tuples_mutated = 0;
  std::size_t runs = 0;
  double mean_seconds = 0;
  verifier::PhaseTimes mean_phases;
  std::optional<std::string> error;

  /// Tuples accessed: the larger of the checked and mutated counts.
  std::size_t tuples() const { return std::max(tuples_checked, tuples_mutated); }
  double per_tuple_seconds() const;
  double lookup_per_tuple_seconds() const;
};

struct BenchOptions {
  std::size_t runs = 5;
  /// Untimed runs of every query before any query is measured.
  std::size_t warmup = 1;
  std::string principal = "peer0";
};

/// Statement kind with nested SELECTs marked: S, S(S), I(S), U(S), ...
std::string kind_tag(const sql::Query& query);

/// Runs every query `runs` times. SELECTs read `db` and `ledger` directly;
/// mutating statements run against fresh copies, so neither the originals
/// nor later runs see their effects.
std::vector<BenchRecord> run_bench(storage::Database& db, ledger::SimulatedLedger& ledger,
                                   const std::vector<BenchQuery>& queries,
                                   const BenchOptions& options = {});

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::size_t points = 0;
};

/// Ordinary least squares. Fewer than two distinct x values give r_squared 0.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of mean time against tuples over the records with tuples > 0 and no
/// error.
LinearFit fit_records(const std::vector<BenchRecord>& records);

}  // namespace verity::bench
