#include "rlct_nmf/rational.hpp"

#include <charconv>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rlct_nmf {

namespace checked {

std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw std::overflow_error("rational: integer multiply overflow");
    return out;
}

std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw std::overflow_error("rational: integer add overflow");
    return out;
}

std::int64_t sub(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out))
        throw std::overflow_error("rational: integer subtract overflow");
    return out;
}

} // namespace checked

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0)
        throw std::domain_error("rational: zero denominator");
    if (den < 0) {
        num = checked::sub(0, num);
        den = checked::sub(0, den);
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::str() const {
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    auto parse_int = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw std::invalid_argument("rational: cannot parse '" + text +
                                        "'");
        return v;
    };
    const std::string_view view(text);
    const auto slash = view.find('/');
    if (slash == std::string_view::npos)
        return Rational(parse_int(view));
    return Rational(parse_int(view.substr(0, slash)),
                    parse_int(view.substr(slash + 1)));
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t lhs = checked::mul(a.num_, b.den_ / g);
    const std::int64_t rhs = checked::mul(b.num_, a.den_ / g);
    return Rational(checked::add(lhs, rhs), checked::mul(a.den_ / g, b.den_));
}

Rational Rational::operator-() const {
    return Rational(checked::sub(0, num_), den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    // Cross-reduce first so intermediate products stay small. Denominators
    // are positive, so both gcds are nonzero.
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t n1 = a.num_ / g1, d2 = b.den_ / g1;
    const std::int64_t n2 = b.num_ / g2, d1 = a.den_ / g2;
    return Rational(checked::mul(n1, n2), checked::mul(d1, d2));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0)
        throw std::domain_error("rational: division by zero");
    return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    // Denominators are positive, so cross-multiplication preserves order.
    return checked::mul(a.num_, b.den_) <=> checked::mul(b.num_, a.den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

} // namespace rlct_nmf
