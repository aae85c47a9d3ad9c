#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace verity::storage {

__extension__ using int128 = __int128;

/// Exact decimal number: `mantissa * 10^-scale`, kept in normalized form (no
/// trailing fractional zeros, zero has scale 0).
///
/// Arithmetic results are rounded to `kArithmeticScale` fractional digits with
/// round-half-even. Overflow of the 128-bit mantissa raises EvalError.
class Decimal {
 public:
  static constexpr int kArithmeticScale = 10;

  Decimal() = default;

  /// Accepts `[+-]digits[.digits]` or `[+-].digits`. Returns nullopt on bad input.
  static std::optional<Decimal> parse(std::string_view text);
  static Decimal from_integer(std::int64_t value);

  /// Normalized text: no leading `+`, no redundant zeros, `-0` becomes `0`.
  std::string to_string() const;

  int scale() const noexcept { return scale_; }
  int128 mantissa() const noexcept { return mantissa_; }
  bool is_integral() const noexcept { return scale_ == 0; }
  /// The integer value, if integral and within int64 range.
  std::optional<std::int64_t> to_integer() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  /// Throws EvalError on division by zero.
  friend Decimal operator/(const Decimal& a, const Decimal& b);
  Decimal operator-() const;

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) {
    return a.scale_ == b.scale_ && a.mantissa_ == b.mantissa_;
  }

 private:
  Decimal(int128 mantissa, int scale);
  static Decimal normalized(int128 mantissa, int scale);

  int128 mantissa_ = 0;
  int scale_ = 0;
};

}  // namespace verity::storage
