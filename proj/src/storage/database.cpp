#include "verity/storage/database.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "verity/errors.hpp"
#include "verity/sql/lexer.hpp"

namespace verity::storage {
namespace {

using sql::Token;
using sql::TokenType;

class DdlParser {
 public:
  DdlParser(const std::vector<Token>& tokens, std::size_t begin) : t_(tokens), pos_(begin) {}

  TableDef parse() {
    keyword("CREATE");
    keyword("TABLE");
    std::string name = ident("table name");
    symbol("(");
    std::vector<ColumnDef> columns;
    std::vector<std::string> key;
    do {
      if (is_word(peek(), "primary")) {
        advance();
        word("key");
        if (!key.empty()) fail("a single PRIMARY KEY clause");
        symbol("(");
        do {
          key.push_back(ident("column name"));
        } while (accept(","));
        symbol(")");
        continue;
      }
      std::string col = ident("column name");
      const Token& type_token = peek();
      if (type_token.type != TokenType::Identifier) fail("column type");
      std::string upper = advance().text;
      for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      auto type = column_type_from_name(upper);
      if (!type) {
        throw BadType("unsupported column type '" + type_token.text + "' for column '" + col +
                      "'");
      }
      if (*type == ColumnType::Decimal && accept("(")) {  // DECIMAL(p, s) precision is ignored
        while (!peek().is_symbol(")") && peek().type != TokenType::End) advance();
        symbol(")");
      }
      if (peek().is_keyword("NOT")) {
        advance();
        keyword("NULL");
      }
      if (is_word(peek(), "primary")) {
        advance();
        word("key");
        if (!key.empty()) fail("a single PRIMARY KEY clause");
        key.push_back(col);
      }
      columns.push_back({std::move(col), *type});
    } while (accept(","));
    symbol(")");
    return make_table_def(std::move(name), std::move(columns), std::move(key));
  }

  std::size_t position() const { return pos_; }

 private:
  const std::vector<Token>& t_;
  std::size_t pos_;

  const Token& peek() const { return t_[std::min(pos_, t_.size() - 1)]; }
  const Token& advance() { return t_[pos_++]; }
  bool accept(std::string_view sym) {
    if (!peek().is_symbol(sym)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().position, {expected},
                      "DDL syntax error at position " + std::to_string(peek().position) +
                          ": found " + sql::describe(peek()) + ", expected " + expected);
  }
  // PRIMARY and KEY are not reserved, so `key` stays usable as a column name.
  static bool is_word(const Token& t, std::string_view w) {
    return t.type == TokenType::Identifier && t.text == w;
  }
  void word(std::string_view w) {
    if (!is_word(peek(), w)) fail(std::string(w));
    ++pos_;
  }
  void keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) fail(std::string(kw));
    ++pos_;
  }
  void symbol(std::string_view sym) {
    if (!accept(sym)) fail("'" + std::string(sym) + "'");
  }
  std::string ident(const std::string& what) {
    if (peek().type != TokenType::Identifier) fail(what);
    return advance().text;
  }
};

Value field_value(const CsvField& f, const ColumnDef& col, const CsvOptions& options) {
  if (!f.quoted && f.text == options.null_literal) return Value::null();
  return parse_typed(f.text, col.type);
}

}  // namespace

const Row* Table::find(const Row& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

const TableDef& Database::create_table(std::string_view ddl) {
  auto tokens = sql::tokenize(ddl);
  DdlParser parser(tokens, 0);
  TableDef def = parser.parse();
  std::size_t end = parser.position();
  if (tokens[end].is_symbol(";")) ++end;
  if (tokens[end].type != TokenType::End) {
    throw SyntaxError(tokens[end].position, {"end of input"},
                      "unexpected input after CREATE TABLE at position " +
                          std::to_string(tokens[end].position));
  }
  const TableDef& added = catalog_.add(std::move(def));
  tables_.emplace(added.name, Table(added));
  return added;
}

std::vector<TableDef> Database::create_tables(std::string_view ddl_script) {
  auto tokens = sql::tokenize(ddl_script);
  std::vector<TableDef> defs;
  std::size_t pos = 0;
  while (tokens[pos].type != TokenType::End) {
    if (tokens[pos].is_symbol(";")) {
      ++pos;
      continue;
    }
    DdlParser parser(tokens, pos);
    defs.push_back(parser.parse());
    pos = parser.position();
  }
  for (const auto& def : defs) {
    if (catalog_.contains(def.name)) {
      throw DuplicateTable("table '" + def.name + "' already exists");
    }
  }
  for (auto& def : defs) {
    const TableDef& added = catalog_.add(def);
    tables_.emplace(added.name, Table(added));
  }
  return defs;
}

const Table& Database::table(std::string_view name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw UnknownTable("unknown table '" + std::string(name) + "'");
  return it->second;
}

Table& Database::mutable_table(std::string_view name) {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw UnknownTable("unknown table '" + std::string(name) + "'");
  return it->second;
}

Row Database::validate_row(const TableDef& def, const Row& values) const {
  if (values.size() != def.columns.size()) {
    throw ArityError("table '" + def.name + "' expects " + std::to_string(def.columns.size()) +
                     " values, got " + std::to_string(values.size()));
  }
  Row out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(coerce(values[i], def.columns[i].type));
  }
  for (std::size_t i : def.pk_indices) {
    if (out[i].is_null()) {
      throw TypeError("primary key column '" + def.columns[i].name + "' of '" + def.name +
                      "' may not be NULL");
    }
  }
  return out;
}

std::size_t Database::load_csv(std::string_view table_name, std::istream& in,
                               const CsvOptions& options) {
  Table& t = mutable_table(table_name);
  const TableDef& def = t.def();
  auto records = parse_csv(in);
  if (records.empty()) throw ArityError("CSV for '" + def.name + "' has no header row");
  const auto& header = records.front();
  if (header.size() != def.columns.size()) {
    throw ArityError("CSV header for '" + def.name + "' has " + std::to_string(header.size()) +
                     " fields, table has " + std::to_string(def.columns.size()) + " columns");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].text != def.columns[i].name) {
      throw ArityError("CSV header field " + std::to_string(i + 1) + " is '" + header[i].text +
                       "', expected '" + def.columns[i].name + "'");
    }
  }
  std::map<Row, Row> staged = t.rows_;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != def.columns.size()) {
      throw ArityError("CSV line " + std::to_string(r + 1) + " of '" + def.name + "' has " +
                       std::to_string(rec.size()) + " fields, expected " +
                       std::to_string(def.columns.size()));
    }
    Row row;
    row.reserve(rec.size());
    try {
      for (std::size_t i = 0; i < rec.size(); ++i) {
        row.push_back(field_value(rec[i], def.columns[i], options));
      }
      row = validate_row(def, row);
    } catch (const TypeError& e) {
      throw TypeError("CSV line " + std::to_string(r + 1) + " of '" + def.name + "': " + e.what());
    }
    Row key = def.key_of(row);
    if (!staged.emplace(std::move(key), std::move(row)).second) {
      throw DuplicatePrimaryKey("CSV line " + std::to_string(r + 1) + " of '" + def.name +
                                "' repeats an existing primary key");
    }
  }
  const std::size_t loaded = records.size() - 1;
  t.rows_ = std::move(staged);
  return loaded;
}

void Database::write_csv(std::string_view table_name, std::ostream& out,
                         const CsvOptions& options) const {
  const Table& t = table(table_name);
  const auto& cols = t.def().columns;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(cols[i].name, false);
  }
  out << '\n';
  for (const auto& [key, row] : t.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i].is_null()) {
        out << options.null_literal;
        continue;
      }
      const std::string text = row[i].to_display();
      out << csv_escape(text, text.empty() || text == options.null_literal);
    }
    out << '\n';
  }
}

void Database::apply_row_insert(const Tuple& tuple) {
  Table& t = mutable_table(tuple.table);
  Row row = validate_row(t.def(), tuple.values);
  Row key = t.def().key_of(row);
  if (t.rows_.count(key)) {
    throw DuplicatePrimaryKey("duplicate primary key in '" + t.def().name + "'");
  }
  t.rows_.emplace(std::move(key), std::move(row));
}

void Database::apply_row_update(std::string_view table_name, const Row& key,
                                const Row& new_values) {
  Table& t = mutable_table(table_name);
  auto it = t.rows_.find(key);
  if (it == t.rows_.end()) throw NoSuchRow("no row with that key in '" + t.def().name + "'");
  Row row = validate_row(t.def(), new_values);
  if (t.def().key_of(row) != key) {
    throw PkUpdateUnsupported("updates may not change the primary key of '" + t.def().name + "'");
  }
  it->second = std::move(row);
}

void Database::apply_row_delete(std::string_view table_name, const Row& key) {
  Table& t = mutable_table(table_name);
  if (t.rows_.erase(key) == 0) {
    throw NoSuchRow("no row with that key in '" + t.def().name + "'");
  }
}

void Database::raw_mutate(std::string_view table_name, const Row& key, std::string_view column,
                          const Value& value) {
  Table& t = mutable_table(table_name);
  auto it = t.rows_.find(key);
  if (it == t.rows_.end()) throw NoSuchRow("no row with that key in '" + t.def().name + "'");
  const std::size_t col = t.def().require_column(column);
  Row row = it->second;
  row[col] = value;
  row = validate_row(t.def(), row);
  Row new_key = t.def().key_of(row);
  if (new_key == key) {
    it->second = std::move(row);
    return;
  }
  if (t.rows_.count(new_key)) {
    throw DuplicatePrimaryKey("duplicate primary key in '" + t.def().name + "'");
  }
  t.rows_.erase(it);
  t.rows_.emplace(std::move(new_key), std::move(row));
}

void Database::raw_delete(std::string_view table_name, const Row& key) {
  apply_row_delete(table_name, key);
}

void Database::raw_insert(const Tuple& tuple) { apply_row_insert(tuple); }

std::vector<std::vector<CsvField>> parse_csv(std::istream& in) {
  std::vector<std::vector<CsvField>> records;
  std::vector<CsvField> record;
  CsvField field;
  bool in_quotes = false;
  bool field_started = false;
  bool any_in_record = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field = CsvField{};
    field_started = false;
    any_in_record = true;
  };
  auto end_record = [&] {
    if (any_in_record || field_started) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
    any_in_record = false;
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.text.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field.quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.text.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw TypeError("unterminated quoted CSV field");
  end_record();
  return records;
}

std::string csv_escape(std::string_view text, bool force_quote) {
  const bool needs = force_quote || text.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace verity::storage
