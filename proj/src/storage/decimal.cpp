#include "verity/storage/decimal.hpp"

#include <algorithm>
#include <limits>

#include "verity/errors.hpp"

namespace verity::storage {
namespace {

constexpr int kMaxDigits = 38;

int128 pow10(int n) {
  int128 r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("decimal overflow");
  return r;
}

int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("decimal overflow");
  return r;
}

int128 abs128(int128 v) { return v < 0 ? -v : v; }

/// numerator / denominator rounded half-to-even; denominator > 0.
int128 divide_round_even(int128 numerator, int128 denominator) {
  int128 q = numerator / denominator;
  int128 r = numerator % denominator;
  if (r == 0) return q;
  const int128 twice = abs128(r) * 2;
  const bool negative = numerator < 0;
  bool up = twice > denominator || (twice == denominator && (abs128(q) % 2) == 1);
  if (up) q += negative ? -1 : 1;
  return q;
}

/// Scale `m` (at `scale`) up to `target` >= scale.
int128 rescale_up(int128 m, int scale, int target) {
  return checked_mul(m, pow10(target - scale));
}

}  // namespace

Decimal::Decimal(int128 mantissa, int scale) : mantissa_(mantissa), scale_(scale) {}

Decimal Decimal::normalized(int128 mantissa, int scale) {
  if (scale > kArithmeticScale) {
    mantissa = divide_round_even(mantissa, pow10(scale - kArithmeticScale));
    scale = kArithmeticScale;
  }
  while (scale > 0 && mantissa % 10 == 0) {
    mantissa /= 10;
    --scale;
  }
  if (mantissa == 0) scale = 0;
  return Decimal(mantissa, scale);
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  int128 mantissa = 0;
  int scale = 0;
  int digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    any_digit = true;
    if (mantissa != 0 || c != '0') ++digits;
    if (digits > kMaxDigits) return std::nullopt;
    mantissa = mantissa * 10 + (c - '0');
    if (seen_dot) ++scale;
  }
  if (!any_digit) return std::nullopt;
  if (negative) mantissa = -mantissa;
  // Strip trailing zeros without rounding: parsed values keep full precision.
  while (scale > 0 && mantissa % 10 == 0) {
    mantissa /= 10;
    --scale;
  }
  if (mantissa == 0) scale = 0;
  return Decimal(mantissa, scale);
}

Decimal Decimal::from_integer(std::int64_t value) { return Decimal(value, 0); }

std::string Decimal::to_string() const {
  std::string digits;
  int128 m = abs128(mantissa_);
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  } while (m != 0);
  while (static_cast<int>(digits.size()) <= scale_) digits.push_back('0');
  std::reverse(digits.begin(), digits.end());
  std::string out;
  if (mantissa_ < 0) out.push_back('-');
  if (scale_ == 0) return out + digits;
  out += digits.substr(0, digits.size() - scale_);
  out.push_back('.');
  out += digits.substr(digits.size() - scale_);
  return out;
}

std::optional<std::int64_t> Decimal::to_integer() const {
  if (scale_ != 0) return std::nullopt;
  if (mantissa_ > std::numeric_limits<std::int64_t>::max() ||
      mantissa_ < std::numeric_limits<std::int64_t>::min()) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(mantissa_);
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  const int s = std::max(a.scale_, b.scale_);
  return Decimal::normalized(
      checked_add(rescale_up(a.mantissa_, a.scale_, s), rescale_up(b.mantissa_, b.scale_, s)), s);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal::normalized(checked_mul(a.mantissa_, b.mantissa_), a.scale_ + b.scale_);
}

Decimal operator/(const Decimal& a, const Decimal& b) {
  if (b.mantissa_ == 0) throw EvalError("division by zero");
  // a/b = (ma * 10^(K + sb)) / (mb * 10^sa) at scale K.
  int128 numerator = checked_mul(a.mantissa_, pow10(Decimal::kArithmeticScale + b.scale_));
  int128 denominator = checked_mul(b.mantissa_, pow10(a.scale_));
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  return Decimal::normalized(divide_round_even(numerator, denominator),
                             Decimal::kArithmeticScale);
}

Decimal Decimal::operator-() const { return Decimal(-mantissa_, scale_); }

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const int s = std::max(a.scale_, b.scale_);
  const int128 x = rescale_up(a.mantissa_, a.scale_, s);
  const int128 y = rescale_up(b.mantissa_, b.scale_, s);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace verity::storage
