#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verity/storage/value.hpp"

namespace verity::storage {

struct ColumnDef {
  std::string name;
  ColumnType type;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> primary_key;  // never empty
  std::vector<std::size_t> pk_indices;   // positions of primary_key in columns

  std::optional<std::size_t> column_index(std::string_view column) const;
  /// Throws UnknownColumn.
  std::size_t require_column(std::string_view column) const;
  bool is_pk_column(std::size_t index) const;
  /// The primary-key values of `row`, in primary_key order.
  Row key_of(const Row& row) const;

  friend bool operator==(const TableDef&, const TableDef&) = default;
};

/// Builds a TableDef, validating column uniqueness and the key. An empty
/// `primary_key` makes every column part of a composite key.
/// Throws DuplicateColumn or UnknownColumn.
TableDef make_table_def(std::string name, std::vector<ColumnDef> columns,
                        std::vector<std::string> primary_key);

/// Table schemas in creation order.
class Catalog {
 public:
  /// Throws DuplicateTable.
  const TableDef& add(TableDef def);
  const TableDef* find(std::string_view name) const;
  /// Throws UnknownTable.
  const TableDef& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::vector<TableDef>& tables() const noexcept { return tables_; }

 private:
  std::vector<TableDef> tables_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// A row of a base table.
struct Tuple {
  std::string table;
  Row values;

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

}  // namespace verity::storage
