#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/matrix.hpp"

namespace rlct_nmf {

/// Observation model for W given its mean matrix.
///   Gaussian    : unit variance, any mean
///   Poisson     : strictly positive mean
///   Exponential : strictly positive mean
enum class Family { Gaussian, Poisson, Exponential };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Whether the family needs strictly positive means.
constexpr bool requires_positive_mean(Family family) {
    return family != Family::Gaussian;
}

namespace detail {

/// u - log(1 + u) for u > -1, accurate when |u| is small.
template <typename Scalar> Scalar excess_log1p(Scalar u) {
    using std::abs;
    using std::log1p;
    if (abs(u) < Scalar(1e-3)) {
        // Alternating series u^2/2 - u^3/3 + ...; ten terms reach well below
        // double epsilon for |u| < 1e-3.
        Scalar term = u * u;
        Scalar sum = 0;
        for (int k = 2; k < 12; ++k) {
            sum += ((k % 2 == 0) ? term : -term) / Scalar(k);
            term *= u;
        }
        return sum;
    }
    return u - log1p(u);
}

template <typename Scalar>
void require_positive_pair(Scalar a, Scalar b, const char* what) {
    if (!(a > 0) || !(b > 0) || !std::isfinite(static_cast<double>(a)) ||
        !std::isfinite(static_cast<double>(b)))
        throw ValidationError(std::string(what) +
                              ": arguments must be finite and positive");
}

} // namespace detail

/// KL divergence between unit-variance Gaussians with means a and b.
template <typename Scalar> Scalar kl_gaussian_scalar(Scalar a, Scalar b) {
    const Scalar d = a - b;
    return Scalar(0.5) * d * d;
}

/// I-divergence b - a + a log(a/b): KL from Poisson(a) to Poisson(b).
template <typename Scalar> Scalar kl_poisson_scalar(Scalar a, Scalar b) {
    detail::require_positive_pair(a, b, "kl_poisson_scalar");
    // = a * phi(b/a - 1) with phi(u) = u - log(1+u).
    return a * detail::excess_log1p((b - a) / a);
}

/// Itakura-Saito divergence log b - log a - 1 + a/b: KL from the exponential
/// law with mean a to the one with mean b.
template <typename Scalar> Scalar kl_exponential_scalar(Scalar a, Scalar b) {
    detail::require_positive_pair(a, b, "kl_exponential_scalar");
    // = phi(a/b - 1).
    return detail::excess_log1p((a - b) / b);
}

template <typename Scalar>
Scalar kl_scalar(Family family, Scalar a, Scalar b) {
    switch (family) {
    case Family::Gaussian:
        return kl_gaussian_scalar(a, b);
    case Family::Poisson:
        return kl_poisson_scalar(a, b);
    case Family::Exponential:
        return kl_exponential_scalar(a, b);
    }
    throw ValidationError("unknown family");
}

/// (1/2) ||A - B||_F^2.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kl_gaussian(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
    require_same_shape(a, b, "kl_gaussian");
    using Scalar = typename DerivedA::Scalar;
    return Scalar(0.5) * (a - b).squaredNorm();
}

/// Sum of elementwise divergences between mean matrices, KL(p(.|a) || p(.|b)).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kl_matrix(Family family,
                                    const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
    if (family == Family::Gaussian)
        return kl_gaussian(a, b);
    require_same_shape(a, b, "kl_matrix");
    using Scalar = typename DerivedA::Scalar;
    if (!all_positive(a) || !all_positive(b))
        throw ValidationError(std::string("kl_matrix: ") +
                              std::string(to_string(family)) +
                              " means must be strictly positive");
    Scalar sum = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            sum += kl_scalar<Scalar>(family, a(i, j), b(i, j));
    return sum;
}

struct SandwichConstants {
    double c1 = 0; // min of K(a,b) / (b-a)^2 over the grid
    double c2 = 0; // max of the same ratio
};

/// Empirical extremes of K(a,b)/(b-a)^2 over a grid x grid lattice on
/// [lo, hi]^2, diagonal excluded.
SandwichConstants sandwich_constants(Family family, double lo, double hi,
                                     int grid = 200);

/// Writes the lattice scan behind sandwich_constants as CSV (a,b,kl,ratio).
void write_sandwich_scan_csv(std::ostream& os, Family family, double lo,
                             double hi, int grid = 200);

} // namespace rlct_nmf
