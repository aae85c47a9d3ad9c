#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verity/sql/ast.hpp"
#include "verity/storage/catalog.hpp"

namespace verity::storage {

struct ResultSet {
  std::vector<std::string> columns;  // "" for unnamed expression outputs
  std::vector<Row> rows;
};

struct CsvOptions {
  /// Unquoted field text that denotes Null. The default treats an empty
  /// unquoted field as Null.
  std::string null_literal;
};

/// Rows of one table keyed by primary key; iteration is in key order.
class Table {
 public:
  explicit Table(TableDef def) : def_(std::move(def)) {}

  const TableDef& def() const noexcept { return def_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const std::map<Row, Row>& rows() const noexcept { return rows_; }
  const Row* find(const Row& key) const;

 private:
  friend class Database;
  TableDef def_;
  std::map<Row, Row> rows_;
};

/// Embedded relational engine: catalog, typed in-memory tables, nested-loop
/// SELECT execution, CSV ingestion, single-row mutations, and the `raw_*`
/// backdoor that mutates storage without any ledger involvement.
///
/// Mutations must be externally serialized; concurrent `exec_select` calls are
/// safe between mutations.
class Database {
 public:
  const Catalog& catalog() const noexcept { return catalog_; }

  /// `CREATE TABLE name (col TYPE, ..., PRIMARY KEY (cols...))`.
  /// Throws DuplicateTable, BadType, DuplicateColumn, SyntaxError.
  const TableDef& create_table(std::string_view ddl);
  /// A `;`-separated sequence of CREATE TABLE statements.
  std::vector<TableDef> create_tables(std::string_view ddl_script);

  /// Loads rows from CSV with a header row naming the columns in order.
  /// All-or-nothing: throws TypeError, DuplicatePrimaryKey or ArityError and
  /// leaves the table unchanged on any bad row.
  std::size_t load_csv(std::string_view table, std::istream& in, const CsvOptions& options = {});
  void write_csv(std::string_view table, std::ostream& out, const CsvOptions& options = {}) const;

  /// Executes a SELECT. FROM items are joined with nested loops in FROM order
  /// (first item outermost); base tables are scanned in primary-key order.
  ResultSet exec_select(const sql::SelectQuery& query) const;

  const Table& table(std::string_view name) const;
  std::size_t row_count(std::string_view name) const { return table(name).size(); }

  void apply_row_insert(const Tuple& tuple);
  /// Replaces the non-key columns of the row keyed `key`. Throws NoSuchRow, or
  /// PkUpdateUnsupported if `new_values` carries a different key.
  void apply_row_update(std::string_view table, const Row& key, const Row& new_values);
  void apply_row_delete(std::string_view table, const Row& key);

  // Attack simulation: identical effects to the apply_* family, never logged.
  void raw_mutate(std::string_view table, const Row& key, std::string_view column, const Value& value);
  void raw_delete(std::string_view table, const Row& key);
  void raw_insert(const Tuple& tuple);

  /// Coerces `values` to the table's column types and checks arity, key
  /// non-nullness and text content. Throws TypeError / ArityError.
  Row validate_row(const TableDef& def, const Row& values) const;

 private:
  Table& mutable_table(std::string_view name);

  Catalog catalog_;
  std::map<std::string, Table, std::less<>> tables_;
};

/// Splits CSV text into records of fields. Each field records whether it was
/// quoted so the caller can tell `""` from an empty unquoted field.
struct CsvField {
  std::string text;
  bool quoted = false;
};
std::vector<std::vector<CsvField>> parse_csv(std::istream& in);
std::string csv_escape(std::string_view text, bool force_quote);

}  // namespace verity::storage
