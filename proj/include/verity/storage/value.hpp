#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "verity/storage/decimal.hpp"

namespace verity::storage {

enum class ColumnType { Integer, Decimal, Text, Date };

const char* to_string(ColumnType type) noexcept;
std::optional<ColumnType> column_type_from_name(std::string_view upper_name);

struct Text {
  std::string value;
  friend auto operator<=>(const Text&, const Text&) = default;
};

/// ISO `YYYY-MM-DD`; validated on construction through `Value::date`.
struct Date {
  std::string iso;
  friend auto operator<=>(const Date&, const Date&) = default;
};

/// A typed attribute value. Null is the monostate alternative.
class Value {
 public:
  enum class Kind { Null, Integer, Decimal, Text, Date };

  Value() = default;
  static Value null() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Storage{v}); }
  static Value decimal(Decimal v) { return Value(Storage{v}); }
  static Value text(std::string v) { return Value(Storage{Text{std::move(v)}}); }
  /// Throws TypeError if `iso` is not a valid calendar date in `YYYY-MM-DD` form.
  static Value date(std::string iso);

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_null() const noexcept { return kind() == Kind::Null; }
  bool is_numeric() const noexcept {
    return kind() == Kind::Integer || kind() == Kind::Decimal;
  }

  std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
  const Decimal& as_decimal() const { return std::get<Decimal>(data_); }
  const std::string& as_text() const { return std::get<Text>(data_).value; }
  const std::string& as_date() const { return std::get<Date>(data_).iso; }
  /// Integer or Decimal widened to Decimal.
  Decimal to_decimal() const;

  /// Human-readable rendering: NULL, digits, or the raw string.
  std::string to_display() const;

  /// Total order used for primary-key maps: by kind, then by value.
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  using Storage = std::variant<std::monostate, std::int64_t, Decimal, Text, Date>;
  explicit Value(Storage s) : data_(std::move(s)) {}
  Storage data_;
};

using Row = std::vector<Value>;

bool is_valid_iso_date(std::string_view text);

/// Parses `text` as a value of `type` (CSV and tamper input). Throws TypeError.
Value parse_typed(std::string_view text, ColumnType type);

/// Converts `v` into the representation of a column of `type`: Integer widens
/// to Decimal, integral Decimals narrow to Integer, Text becomes Date when it
/// is a valid ISO date. Null passes through. Throws TypeError otherwise, and
/// for Text containing the 0x1F unit separator.
Value coerce(const Value& v, ColumnType type);

/// SQL comparison: nullopt if either side is Null; numeric kinds compare by
/// value; Text and Date compare as strings. Throws EvalError for mixed
/// numeric/string operands.
std::optional<std::strong_ordering> compare_sql(const Value& a, const Value& b);

}  // namespace verity::storage
