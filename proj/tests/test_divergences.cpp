#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rlct_nmf/divergences.hpp"

using namespace rlct_nmf;

TEST_CASE("gaussian divergence") {
    NonnegMatrix a(2, 2);
    a << 1, 0, 0, 1;
    CHECK(kl_gaussian(a, a) == 0.0);
    CHECK(kl_gaussian(a, NonnegMatrix::Zero(2, 2)) == doctest::Approx(1.0));
    NonnegMatrix x(1, 1), y(1, 1);
    x << 2;
    y << 5;
    CHECK(kl_gaussian(x, y) == doctest::Approx(4.5));
    CHECK_THROWS_AS(kl_gaussian(a, NonnegMatrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("poisson divergence against the series oracle") {
    CHECK(kl_poisson_scalar(2.5, 2.5) == 0.0);
    // Hand-checked closed values.
    CHECK(kl_poisson_scalar(1.0, 2.0) == doctest::Approx(1 - std::log(2.0)));
    CHECK(kl_poisson_scalar(3.0, 1.0) ==
          doctest::Approx(1 - 3 + 3 * std::log(3.0)));
    CHECK(std::abs(oracle::poisson_kl_series(1, 2) - (1 - std::log(2.0))) <
          1e-12);
    CHECK(std::abs(oracle::poisson_kl_series(3, 1) -
                   (1 - 3 + 3 * std::log(3.0))) < 1e-12);

    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; j += 7) {
            const double a = 0.1 + 9.9 * i / 49.0, b = 0.1 + 9.9 * j / 49.0;
            CHECK(std::abs(kl_poisson_scalar(a, b) -
                           oracle::poisson_kl_series(a, b)) < 1e-8);
        }
    CHECK_THROWS_AS(kl_poisson_scalar(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(kl_poisson_scalar(1.0, -1.0), ValidationError);
}

TEST_CASE("exponential divergence against the quadrature oracle") {
    CHECK(kl_exponential_scalar(0.7, 0.7) == 0.0);
    CHECK(std::abs(oracle::exponential_kl_quadrature(1, 2) -
                   (std::log(2.0) - 0.5)) < 1e-10);
    CHECK(std::abs(oracle::exponential_kl_quadrature(2, 1) -
                   (1 - std::log(2.0))) < 1e-10);
    CHECK(kl_exponential_scalar(1.0, 2.0) ==
          doctest::Approx(std::log(2.0) - 0.5));
    CHECK(kl_exponential_scalar(2.0, 1.0) ==
          doctest::Approx(1 - std::log(2.0)));
    for (int i = 0; i < 50; i += 3)
        for (int j = 0; j < 50; j += 5) {
            const double a = 0.1 + 9.9 * i / 49.0, b = 0.1 + 9.9 * j / 49.0;
            CHECK(std::abs(kl_exponential_scalar(a, b) -
                           oracle::exponential_kl_quadrature(a, b)) < 1e-8);
        }
    CHECK_THROWS_AS(kl_exponential_scalar(1.0, 0.0), ValidationError);
}

TEST_CASE("matrix divergence sums elementwise") {
    NonnegMatrix a(1, 2), b(1, 2);
    a << 1, 1;
    b << 2, 2;
    CHECK(kl_matrix(Family::Exponential, a, b) ==
          doctest::Approx(2 * (std::log(2.0) - 0.5)));
    CHECK(kl_matrix(Family::Poisson, a, a) == 0.0);
    CHECK(kl_matrix(Family::Gaussian, a, b) == kl_gaussian(a, b));
    NonnegMatrix z = NonnegMatrix::Zero(1, 2);
    CHECK_THROWS_AS(kl_matrix(Family::Poisson, a, z), ValidationError);
    CHECK_NOTHROW(kl_matrix(Family::Gaussian, a, z));
    CHECK_THROWS_AS(kl_matrix(Family::Poisson, a, NonnegMatrix::Ones(2, 1)),
                    ValidationError);
}

TEST_CASE("near-diagonal divergences keep relative accuracy") {
    // (b-a)^2 scaling must survive |a-b| = 1e-6: the ratio stays close to
    // its diagonal limit 1/(2a) (Poisson) and 1/(2b^2) (exponential).
    for (double a : {0.1, 1.0, 7.0}) {
        const double b = a + 1e-6;
        CHECK(kl_poisson_scalar(a, b) / 1e-12 ==
              doctest::Approx(1 / (2 * a)).epsilon(1e-4));
        CHECK(kl_exponential_scalar(a, b) / 1e-12 ==
              doctest::Approx(1 / (2 * b * b)).epsilon(1e-4));
    }
}

TEST_CASE("divergences: nonnegativity and identity (property)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        for (Family f : {Family::Gaussian, Family::Poisson, Family::Exponential}) {
            CHECK(kl_scalar(f, a, b) > 0.0);
            CHECK(kl_scalar(f, a, a) == 0.0);
        }
    }
}

TEST_CASE("divergences: partial derivative signs by finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 10.0);
    for (Family f : {Family::Poisson, Family::Exponential}) {
        for (int i = 0; i < 300; ++i) {
            double a = u(rng), b = u(rng);
            if (std::abs(a - b) < 1e-2)
                continue;
            const double da = oracle::derivative(
                [&](double x) { return kl_scalar(f, x, b); }, a);
            const double db = oracle::derivative(
                [&](double y) { return kl_scalar(f, a, y); }, b);
            if (a > b) {
                CHECK(da > 0);
                CHECK(db < 0);
            } else {
                CHECK(da < 0);
                CHECK(db > 0);
            }
        }
    }
}

TEST_CASE("sandwich constants") {
    const auto g = sandwich_constants(Family::Gaussian, 0.0, 3.0, 50);
    CHECK(g.c1 == doctest::Approx(0.5));
    CHECK(g.c2 == doctest::Approx(0.5));

    for (Family f : {Family::Poisson, Family::Exponential}) {
        const auto s = sandwich_constants(f, 0.5, 2.0, 200);
        CHECK(s.c1 > 0);
        CHECK(s.c1 <= s.c2);
        CHECK(std::isfinite(s.c2));
    }
    // Away from the diagonal limits: the Poisson ratio is 1/(2a) near the
    // diagonal, so on [0.5, 2] it spans roughly [1/4, 1].
    const auto p = sandwich_constants(Family::Poisson, 0.5, 2.0, 200);
    CHECK(p.c1 > 0.15);
    CHECK(p.c2 < 1.1);

    CHECK_THROWS_AS(sandwich_constants(Family::Poisson, 0.0, 2.0),
                    ValidationError);
    CHECK_THROWS_AS(sandwich_constants(Family::Gaussian, 2.0, 1.0),
                    ValidationError);
}

TEST_CASE("sandwich scan csv") {
    std::ostringstream os;
    write_sandwich_scan_csv(os, Family::Exponential, 0.5, 2.0, 3);
    const std::string s = os.str();
    CHECK(s.rfind("a,b,kl,ratio\n", 0) == 0);
    // 3x3 grid without the diagonal.
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 6);
}

TEST_CASE("family names") {
    CHECK(parse_family("poisson") == Family::Poisson);
    CHECK(to_string(Family::Exponential) == "exponential");
    CHECK_THROWS_AS(parse_family("gamma"), ValidationError);
}
