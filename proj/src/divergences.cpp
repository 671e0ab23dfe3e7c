#include "rlct_nmf/divergences.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace rlct_nmf {

std::string_view to_string(Family family) {
    switch (family) {
    case Family::Gaussian:
        return "gaussian";
    case Family::Poisson:
        return "poisson";
    case Family::Exponential:
        return "exponential";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    if (name == "gaussian")
        return Family::Gaussian;
    if (name == "poisson")
        return Family::Poisson;
    if (name == "exponential")
        return Family::Exponential;
    throw ValidationError("unknown family '" + std::string(name) +
                          "' (expected gaussian, poisson or exponential)");
}

namespace {

void check_box(Family family, double lo, double hi, int grid) {
    if (!(lo >= 0) || !(hi > lo) || !std::isfinite(hi))
        throw ValidationError("sandwich box must satisfy 0 <= lo < hi");
    if (requires_positive_mean(family) && !(lo > 0))
        throw ValidationError("sandwich box for " +
                              std::string(to_string(family)) +
                              " needs lo > 0");
    if (grid < 2)
        throw ValidationError("sandwich grid needs at least 2 points");
}

template <typename Visit>
void scan(Family family, double lo, double hi, int grid, Visit&& visit) {
    const double step = (hi - lo) / (grid - 1);
    for (int i = 0; i < grid; ++i) {
        const double a = lo + step * i;
        for (int j = 0; j < grid; ++j) {
            if (i == j)
                continue;
            const double b = lo + step * j;
            const double k = kl_scalar(family, a, b);
            visit(a, b, k, k / ((b - a) * (b - a)));
        }
    }
}

} // namespace

SandwichConstants sandwich_constants(Family family, double lo, double hi,
                                     int grid) {
    check_box(family, lo, hi, grid);
    SandwichConstants out{std::numeric_limits<double>::infinity(), 0.0};
    scan(family, lo, hi, grid, [&](double, double, double, double ratio) {
        out.c1 = std::min(out.c1, ratio);
        out.c2 = std::max(out.c2, ratio);
    });
    return out;
}

void write_sandwich_scan_csv(std::ostream& os, Family family, double lo,
                             double hi, int grid) {
    check_box(family, lo, hi, grid);
    const auto prec = os.precision(17);
    os << "a,b,kl,ratio\n";
    scan(family, lo, hi, grid, [&](double a, double b, double k, double ratio) {
        os << a << ',' << b << ',' << k << ',' << ratio << '\n';
    });
    os.precision(prec);
}

} // namespace rlct_nmf
