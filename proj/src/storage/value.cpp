#include "verity/storage/value.hpp"

#include <charconv>
#include <chrono>

#include "verity/errors.hpp"

namespace verity::storage {

const char* to_string(ColumnType type) noexcept {
  switch (type) {
    case ColumnType::Integer:
      return "INTEGER";
    case ColumnType::Decimal:
      return "DECIMAL";
    case ColumnType::Text:
      return "TEXT";
    case ColumnType::Date:
      return "DATE";
  }
  return "?";
}

std::optional<ColumnType> column_type_from_name(std::string_view upper_name) {
  if (upper_name == "INTEGER") return ColumnType::Integer;
  if (upper_name == "DECIMAL") return ColumnType::Decimal;
  if (upper_name == "TEXT") return ColumnType::Text;
  if (upper_name == "DATE") return ColumnType::Date;
  return std::nullopt;
}

bool is_valid_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  int y = 0, m = 0, d = 0;
  std::from_chars(s.data(), s.data() + 4, y);
  std::from_chars(s.data() + 5, s.data() + 7, m);
  std::from_chars(s.data() + 8, s.data() + 10, d);
  using namespace std::chrono;
  return year_month_day{year{y}, month{static_cast<unsigned>(m)},
                        day{static_cast<unsigned>(d)}}
      .ok();
}

Value Value::date(std::string iso) {
  if (!is_valid_iso_date(iso)) throw TypeError("invalid date '" + iso + "'");
  return Value(Storage{Date{std::move(iso)}});
}

Decimal Value::to_decimal() const {
  if (kind() == Kind::Integer) return Decimal::from_integer(as_integer());
  return as_decimal();
}

std::string Value::to_display() const {
  switch (kind()) {
    case Kind::Null:
      return "NULL";
    case Kind::Integer:
      return std::to_string(as_integer());
    case Kind::Decimal:
      return as_decimal().to_string();
    case Kind::Text:
      return as_text();
    case Kind::Date:
      return as_date();
  }
  return "";
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case Value::Kind::Null:
      return std::strong_ordering::equal;
    case Value::Kind::Integer:
      return a.as_integer() <=> b.as_integer();
    case Value::Kind::Decimal:
      return a.as_decimal() <=> b.as_decimal();
    case Value::Kind::Text:
      return a.as_text() <=> b.as_text();
    case Value::Kind::Date:
      return a.as_date() <=> b.as_date();
  }
  return std::strong_ordering::equal;
}

namespace {

void reject_separator(std::string_view text) {
  if (text.find('\x1f') != std::string_view::npos) {
    throw TypeError("text values may not contain the 0x1F unit separator");
  }
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

}  // namespace

Value parse_typed(std::string_view text, ColumnType type) {
  switch (type) {
    case ColumnType::Integer:
      if (auto v = parse_int(text)) return Value::integer(*v);
      throw TypeError("'" + std::string(text) + "' is not a valid INTEGER");
    case ColumnType::Decimal:
      if (auto d = Decimal::parse(text)) return Value::decimal(*d);
      throw TypeError("'" + std::string(text) + "' is not a valid DECIMAL");
    case ColumnType::Text:
      reject_separator(text);
      return Value::text(std::string(text));
    case ColumnType::Date:
      return Value::date(std::string(text));
  }
  throw TypeError("unknown column type");
}

Value coerce(const Value& v, ColumnType type) {
  using K = Value::Kind;
  if (v.is_null()) return v;
  switch (type) {
    case ColumnType::Integer:
      if (v.kind() == K::Integer) return v;
      if (v.kind() == K::Decimal) {
        if (auto i = v.as_decimal().to_integer()) return Value::integer(*i);
      }
      break;
    case ColumnType::Decimal:
      if (v.is_numeric()) return Value::decimal(v.to_decimal());
      break;
    case ColumnType::Text:
      if (v.kind() == K::Text) {
        reject_separator(v.as_text());
        return v;
      }
      break;
    case ColumnType::Date:
      if (v.kind() == K::Date) return v;
      if (v.kind() == K::Text && is_valid_iso_date(v.as_text())) return Value::date(v.as_text());
      break;
  }
  throw TypeError("value '" + v.to_display() + "' is not valid for a " + to_string(type) +
                  " column");
}

std::optional<std::strong_ordering> compare_sql(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  if (a.is_numeric() && b.is_numeric()) {
    if (a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer) {
      return a.as_integer() <=> b.as_integer();
    }
    return a.to_decimal() <=> b.to_decimal();
  }
  auto stringish = [](const Value& v) -> const std::string* {
    if (v.kind() == Value::Kind::Text) return &v.as_text();
    if (v.kind() == Value::Kind::Date) return &v.as_date();
    return nullptr;
  };
  const std::string* x = stringish(a);
  const std::string* y = stringish(b);
  if (x && y) return *x <=> *y;
  throw EvalError("cannot compare '" + a.to_display() + "' with '" + b.to_display() + "'");
}

}  // namespace verity::storage
