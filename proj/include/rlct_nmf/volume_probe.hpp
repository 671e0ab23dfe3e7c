#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"

#include "rlct_nmf/rlct_core.hpp"

namespace rlct_nmf {

/// Monte Carlo estimate of V(t) = vol{(X,Y) in [0,c]^(MH+HN) :
/// ||XY - AB||^2 <= t} at a list of thresholds. Near t = 0, V(t) behaves like
/// t^lambda up to a power of log(1/t), so the log-log slope estimates the
/// learning coefficient.
struct VolumeScan {
    std::vector<double> thresholds; // strictly decreasing
    std::vector<std::uint64_t> hits;
    std::vector<double> volumes;
    std::vector<double> stderrs;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    double box_upper = 0;  // c
    double box_volume = 0; // c^(MH+HN)
};

struct SlopeFit {
    double lambda_hat = 0;
    double std_error = 0;
    double t_lo = 0;
    double t_hi = 0;
    double r_squared = 0;
    int points = 0;
};

struct VolumeOptions {
    /// Box edge c; defaults to 2 max(1, max entry of AB).
    std::optional<double> box_upper;
    /// Decreasing thresholds; defaults to default_thresholds().
    std::vector<double> thresholds;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Log-spaced thresholds from t_hi downwards, `per_decade` points per decade
/// over `decades` decades (both ends included).
std::vector<double> log_thresholds(double t_hi, int decades,
                                   int per_decade = 12);

/// 12 points per decade from 1 down to 1e-6.
std::vector<double> default_thresholds();

double default_box_upper(const NonnegMatrix& ab);

/// Uniform hit-or-miss sampling on the box. Samples are drawn in fixed-size
/// blocks with per-block RNG substreams, so the scan is bit-identical for
/// any worker count.
VolumeScan estimate_volume(const ModelDims& dims, const TrueStructure& truth,
                           const VolumeOptions& options);

/// Minimum hits per threshold for a point to enter the fit window.
inline constexpr std::uint64_t kMinFitHits = 100;

/// Weighted least squares of log V against log t over one decade starting
/// at the smallest threshold with at least kMinFitHits hits. Falls back to
/// all thresholds with nonzero hits when fewer than four points qualify;
/// throws EstimationError if even that leaves fewer than four.
SlopeFit fit_lambda(const VolumeScan& scan);

struct BoundCheck {
    double lambda_hat = 0;
    double std_error = 0;
    RlctValue bound;
    bool consistent = false; // lambda_hat <= bound + 3 stderr
};

BoundCheck check_bound(const ModelDims& dims, const TrueStructure& truth,
                       const SlopeFit& fit);

nlohmann::json to_json(const VolumeScan& scan);
nlohmann::json to_json(const SlopeFit& fit);
nlohmann::json to_json(const BoundCheck& check);

/// t,volume,stderr,hits rows.
void write_scan_csv(std::ostream& os, const VolumeScan& scan);

} // namespace rlct_nmf
