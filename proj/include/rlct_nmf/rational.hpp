#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace rlct_nmf {

/// Exact rational number over 64-bit integers, always stored reduced with a
/// positive denominator. Every arithmetic operation checks for overflow and
/// throws std::overflow_error rather than wrapping.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// "p/q", or "p" when the denominator is one.
    std::string str() const;

    /// Parses "p", "p/q" or "-p/q".
    static Rational parse(const std::string& text);

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a,
                                            const Rational& b);

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

namespace checked {
std::int64_t mul(std::int64_t a, std::int64_t b);
std::int64_t add(std::int64_t a, std::int64_t b);
std::int64_t sub(std::int64_t a, std::int64_t b);
} // namespace checked

} // namespace rlct_nmf
