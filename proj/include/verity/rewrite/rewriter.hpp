#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "verity/sql/ast.hpp"
#include "verity/storage/catalog.hpp"

namespace verity::rewrite {

/// One base-table occurrence in a widened query and the contiguous slice of
/// the wide row holding its columns in schema order.
struct TableEntry {
  std::string table;
  /// Visible names from the outermost FROM item down to the table, e.g.
  /// {"r1", "t2"} for t2 inside derived table r1.
  std::vector<std::string> alias_path;
  std::size_t first_column = 0;
  std::size_t column_count = 0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct OutputColumn {
  std::string name;  // "" for an unnamed expression
  sql::Expr expr;    // over Slot references into the wide row

  friend bool operator==(const OutputColumn&, const OutputColumn&) = default;
};

struct RewrittenSelect {
  sql::SelectQuery wide_query;
  std::vector<TableEntry> table_list;
  std::vector<OutputColumn> original_projection;
  bool aggregate = false;
  std::size_t wide_arity = 0;
};

/// Widens every SELECT level, innermost first, so the outer result carries
/// every column of every base table it reads. Unqualified column references
/// in a multi-table level are qualified; references to derived-table outputs
/// are replaced by the expressions they stand for.
///
/// Throws UnknownTable, UnknownColumn, AmbiguousColumn, and UnsupportedFeature
/// for aggregates inside a derived table.
RewrittenSelect change_projection(const sql::SelectQuery& query, const storage::Catalog& catalog);

/// The base tuple held in `entry`'s slice of `wide_row`.
storage::Tuple tuples_of(const storage::Row& wide_row, const TableEntry& entry);

/// Evaluates the original projection over the wide rows. Aggregates collapse
/// the result to one row; otherwise row order is kept.
std::vector<storage::Row> project_results(const std::vector<storage::Row>& wide_rows,
                                          const RewrittenSelect& rewritten);

std::vector<std::string> output_names(const RewrittenSelect& rewritten);

}  // namespace verity::rewrite
