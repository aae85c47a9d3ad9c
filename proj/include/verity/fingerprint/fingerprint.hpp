#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "verity/storage/catalog.hpp"
#include "verity/storage/value.hpp"

namespace verity::fp {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view bytes);

std::string to_hex(const Digest& digest);
/// Accepts exactly 64 hex characters (either case).
std::optional<Digest> digest_from_hex(std::string_view hex);

/// Tagged digest so RowIds and Fingerprints cannot be mixed up.
template <class Tag>
struct TaggedDigest {
  Digest bytes{};

  std::string hex() const { return to_hex(bytes); }
  static std::optional<TaggedDigest> from_hex(std::string_view text) {
    auto d = digest_from_hex(text);
    if (!d) return std::nullopt;
    return TaggedDigest{*d};
  }

  friend auto operator<=>(const TaggedDigest&, const TaggedDigest&) = default;
};

struct RowIdTag;
struct FingerprintTag;
using RowId = TaggedDigest<RowIdTag>;
using Fingerprint = TaggedDigest<FingerprintTag>;

/// Field separator between hashed components (ASCII unit separator).
inline constexpr char kSeparator = '\x1f';

/// Canonical bytes of a non-Null value: decimal digits for integers, the
/// normalized string for decimals, raw bytes for text, ISO text for dates.
std::string serialize_value(const storage::Value& v);

/// SHA-256(pk1 0x1F pk2 ... 0x1F lowercase(table)). Throws NullPrimaryKey.
RowId row_id(const storage::Row& pk_values, std::string_view table);

/// SHA-256(hex(rid) 0x1F c1 0x1F c2 ...) over the non-Null columns only.
Fingerprint fingerprint(const RowId& rid, const storage::Row& values);

struct TupleDigest {
  RowId row_id;
  Fingerprint fingerprint;
};

/// Both digests for a full row of `def`.
TupleDigest digest_tuple(const storage::TableDef& def, const storage::Row& values);

}  // namespace verity::fp
