#include "verity/fingerprint/fingerprint.hpp"

#include <sodium.h>

#include <cctype>
#include <stdexcept>

#include "verity/errors.hpp"

namespace verity::fp {

Digest sha256(std::string_view bytes) {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialization failed");
  Digest out{};
  crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return out;
}

std::string to_hex(const Digest& digest) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (auto b : digest) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  Digest out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string serialize_value(const storage::Value& v) {
  using Kind = storage::Value::Kind;
  switch (v.kind()) {
    case Kind::Integer:
      return std::to_string(v.as_integer());
    case Kind::Decimal:
      return v.as_decimal().to_string();
    case Kind::Text:
      return v.as_text();
    case Kind::Date:
      return v.as_date();
    case Kind::Null:
      break;
  }
  return {};
}

RowId row_id(const storage::Row& pk_values, std::string_view table) {
  if (pk_values.empty()) throw NullPrimaryKey("primary key has no values");
  std::string buf;
  for (const auto& v : pk_values) {
    if (v.is_null()) throw NullPrimaryKey("primary key value is NULL");
    buf += serialize_value(v);
    buf.push_back(kSeparator);
  }
  for (char c : table) buf.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return RowId{sha256(buf)};
}

Fingerprint fingerprint(const RowId& rid, const storage::Row& values) {
  std::string buf = rid.hex();
  for (const auto& v : values) {
    if (v.is_null()) continue;
    buf.push_back(kSeparator);
    buf += serialize_value(v);
  }
  return Fingerprint{sha256(buf)};
}

TupleDigest digest_tuple(const storage::TableDef& def, const storage::Row& values) {
  RowId rid = row_id(def.key_of(values), def.name);
  return {rid, fingerprint(rid, values)};
}

}  // namespace verity::fp
