#pragma once

// Independent reference computations used only by tests. They evaluate the
// divergences from their definitions (sums and integrals of densities), not
// from the closed forms under test.

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rlct_nmf::oracle {

/// sum_{x >= 0} p(x|a) log(p(x|a) / p(x|b)) for Poisson pmfs, truncated at
/// a + 20 sqrt(a) + 50 where the remaining mass is far below 1e-14.
inline double poisson_kl_series(double a, double b) {
    const long cutoff = static_cast<long>(std::ceil(a + 20 * std::sqrt(a) + 50));
    double sum = 0;
    for (long x = 0; x <= cutoff; ++x) {
        const double lf = std::lgamma(static_cast<double>(x) + 1.0);
        const double log_pa = -a + x * std::log(a) - lf;
        const double log_pb = -b + x * std::log(b) - lf;
        sum += std::exp(log_pa) * (log_pa - log_pb);
    }
    return sum;
}

/// int_0^inf p(x|a) log(p(x|a) / p(x|b)) dx for exponential densities with
/// means a and b: adaptive Gauss-Kronrod on [0, 50a] plus the exact tail.
inline double exponential_kl_quadrature(double a, double b) {
    auto log_p = [](double x, double mean) { return -std::log(mean) - x / mean; };
    auto integrand = [&](double x) {
        return std::exp(log_p(x, a)) * (log_p(x, a) - log_p(x, b));
    };
    const double L = 50 * a;
    double err = 0;
    const double body =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, 0.0, L, 30, 1e-14, &err);
    // Tail: log ratio is log(b/a) + x (1/b - 1/a); under p(.|a) the tail
    // mass beyond L is e^{-L/a} and its first moment is e^{-L/a} (L + a).
    const double tail_mass = std::exp(-L / a);
    const double tail =
        tail_mass * std::log(b / a) + (1 / b - 1 / a) * tail_mass * (L + a);
    return body + tail;
}

/// Central finite difference.
template <typename F> double derivative(F&& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

} // namespace rlct_nmf::oracle
