#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "verity/storage/database.hpp"

namespace verity::fixtures {

/// Row count per table of the TPC-H-shaped fixture.
struct TpchCounts {
  std::int64_t customer = 0;
  std::int64_t lineitem = 0;
  std::int64_t nation = 0;
  std::int64_t orders = 0;
  std::int64_t part = 0;
  std::int64_t partsupp = 0;
  std::int64_t region = 0;
  std::int64_t supplier = 0;

  std::int64_t total() const {
    return customer + lineitem + nation + orders + part + partsupp + region + supplier;
  }

  /// Scale factor 0.001 table sizes.
  static TpchCounts sf0001();
  /// Every count multiplied by `factor` (nation and region stay fixed),
  /// at least one row each, capped at what the generator can produce:
  /// part x supplier pairs and seven line items per order.
  TpchCounts scaled(double factor) const;
};

/// CREATE TABLE script for the eight tables.
std::string_view tpch_ddl();

/// Creates the eight tables (if absent) and fills them with deterministic
/// rows for `seed`. Throws DuplicatePrimaryKey if a table is already filled.
void populate(storage::Database& db, const TpchCounts& counts, std::uint64_t seed);

/// Writes `tpch.sql` and one `<table>.csv` per table into `dir`.
void write_fixture_dir(const std::string& dir, const TpchCounts& counts, std::uint64_t seed);

}  // namespace verity::fixtures
