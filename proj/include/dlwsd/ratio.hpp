#ifndef DLWSD_RATIO_HPP
#define DLWSD_RATIO_HPP

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dlwsd {

/// Exact nonnegative rational, always stored in lowest terms.
class Ratio {
public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw std::invalid_argument("Ratio: need num >= 0, den > 0");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Ratio operator*(const Ratio& a, const Ratio& b) {
    // cross-reduce first so the products stay small
    const auto g1 = std::gcd(a.num_, b.den_);
    const auto g2 = std::gcd(b.num_, a.den_);
    const auto n = (a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1));
    const auto d = (a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
    return Ratio(n, d);
  }

  friend bool operator==(const Ratio&, const Ratio&) = default;

  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Decimal rendering with `places` digits, rounded half-up on the exact value.
  std::string to_fixed(int places) const {
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const __int128 scaled = (static_cast<__int128>(num_) * scale * 2 + den_) / (2 * static_cast<__int128>(den_));
    const auto whole = static_cast<std::int64_t>(scaled / scale);
    auto frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
    std::string out = std::to_string(whole);
    if (places > 0) out += "." + std::string(places - frac.size(), '0') + frac;
    return out;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

} // namespace dlwsd

#endif
