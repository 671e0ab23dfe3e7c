#include "doctest.h"

#include <limits>
#include <random>
#include <stdexcept>

#include "rlct_nmf/rational.hpp"

using rlct_nmf::Rational;

TEST_CASE("rational normalises sign and common factors") {
    CHECK(Rational(6, 8) == Rational(3, 4));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(-3, -6).den() == 2);
    CHECK(Rational(0, 5) == Rational(0));
    CHECK(Rational(0, 5).den() == 1);
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational arithmetic and ordering") {
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) - Rational(3, 4) == Rational(-1, 4));
    CHECK(Rational(3, 8) * Rational(4, 9) == Rational(1, 6));
    CHECK(Rational(3, 8) / Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(5, 2) > Rational(2));
    CHECK(Rational(-1, 3) < Rational(0));
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational string form") {
    CHECK(Rational(45, 2).str() == "45/2");
    CHECK(Rational(14).str() == "14");
    CHECK(Rational::parse("9/2") == Rational(9, 2));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK_THROWS(Rational::parse("3/"));
    CHECK_THROWS(Rational::parse("x"));
}

TEST_CASE("rational overflow is detected, not wrapped") {
    const auto big = std::numeric_limits<std::int64_t>::max() / 2;
    CHECK_THROWS_AS(Rational(big) * Rational(3), std::overflow_error);
    CHECK_THROWS_AS(Rational(big) + Rational(big) + Rational(big),
                    std::overflow_error);
}

TEST_CASE("rational field laws on random small values") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> num(-50, 50), den(1, 12);
    for (int i = 0; i < 500; ++i) {
        const Rational a(num(rng), den(rng)), b(num(rng), den(rng)),
            c(num(rng), den(rng));
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a - b) + b == a);
        if (b != Rational(0))
            CHECK((a / b) * b == a);
        CHECK(Rational::parse(a.str()) == a);
    }
}
