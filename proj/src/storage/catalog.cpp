#include "verity/storage/catalog.hpp"

#include <algorithm>
#include <set>

#include "verity/errors.hpp"

namespace verity::storage {

std::optional<std::size_t> TableDef::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  return std::nullopt;
}

std::size_t TableDef::require_column(std::string_view column) const {
  if (auto i = column_index(column)) return *i;
  throw UnknownColumn("table '" + name + "' has no column '" + std::string(column) + "'");
}

bool TableDef::is_pk_column(std::size_t index) const {
  return std::find(pk_indices.begin(), pk_indices.end(), index) != pk_indices.end();
}

Row TableDef::key_of(const Row& row) const {
  Row key;
  key.reserve(pk_indices.size());
  for (std::size_t i : pk_indices) key.push_back(row.at(i));
  return key;
}

TableDef make_table_def(std::string name, std::vector<ColumnDef> columns,
                        std::vector<std::string> primary_key) {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c.name).second) {
      throw DuplicateColumn("duplicate column '" + c.name + "' in table '" + name + "'");
    }
  }
  if (columns.empty()) throw ArityError("table '" + name + "' has no columns");
  if (primary_key.empty()) {
    for (const auto& c : columns) primary_key.push_back(c.name);
  }
  TableDef def{std::move(name), std::move(columns), std::move(primary_key), {}};
  std::set<std::string> key_seen;
  for (const auto& k : def.primary_key) {
    if (!key_seen.insert(k).second) {
      throw DuplicateColumn("column '" + k + "' repeated in primary key of '" + def.name + "'");
    }
    def.pk_indices.push_back(def.require_column(k));
  }
  return def;
}

const TableDef& Catalog::add(TableDef def) {
  if (index_.count(def.name)) throw DuplicateTable("table '" + def.name + "' already exists");
  index_.emplace(def.name, tables_.size());
  tables_.push_back(std::move(def));
  return tables_.back();
}

const TableDef* Catalog::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &tables_[it->second];
}

const TableDef& Catalog::at(std::string_view name) const {
  if (const auto* def = find(name)) return *def;
  throw UnknownTable("unknown table '" + std::string(name) + "'");
}

}  // namespace verity::storage
