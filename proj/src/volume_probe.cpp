#include "rlct_nmf/volume_probe.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/random/uniform_real_distribution.hpp>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/parallel.hpp"
#include "rlct_nmf/random.hpp"

namespace rlct_nmf {

namespace {

constexpr std::uint64_t kBlockSize = 1u << 16;
constexpr std::uint64_t kMinSamples = 100'000;

} // namespace

std::vector<double> log_thresholds(double t_hi, int decades, int per_decade) {
    if (!(t_hi > 0) || decades < 1 || per_decade < 1)
        throw ValidationError("log_thresholds: need t_hi > 0, decades >= 1, "
                              "per_decade >= 1");
    const int count = decades * per_decade + 1;
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = t_hi * std::pow(10.0, -static_cast<double>(i) / per_decade);
    return out;
}

std::vector<double> default_thresholds() { return log_thresholds(1.0, 6); }

double default_box_upper(const NonnegMatrix& ab) {
    const double top = ab.size() ? ab.maxCoeff() : 0.0;
    return 2.0 * std::max(1.0, top);
}

VolumeScan estimate_volume(const ModelDims& dims, const TrueStructure& truth,
                           const VolumeOptions& options) {
    truth.validate(dims);
    if (dims.H < 1)
        throw ValidationError("volume probe needs H >= 1");
    if (options.samples < kMinSamples)
        throw ValidationError("volume probe needs at least 1e5 samples");

    const NonnegMatrix ab = truth.product(dims.M, dims.N);
    const double c = options.box_upper.value_or(default_box_upper(ab));
    if (!(c > 0) || !std::isfinite(c))
        throw ValidationError("box upper bound must be positive and finite");
    if (ab.size() && ab.maxCoeff() >= c * c * dims.H)
        throw ValidationError("truth AB is not reachable inside the box "
                              "[0, c]: some entry exceeds c^2 H");

    std::vector<double> thresholds =
        options.thresholds.empty() ? default_thresholds() : options.thresholds;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0))
            throw ValidationError("thresholds must be positive");
        if (i > 0 && !(thresholds[i] < thresholds[i - 1]))
            throw ValidationError("thresholds must be strictly decreasing");
    }
    const std::size_t T = thresholds.size();

    const std::uint64_t blocks = (options.samples + kBlockSize - 1) / kBlockSize;
    // counts[b][k]: samples in block b with exactly k thresholds >= K.
    std::vector<std::vector<std::uint64_t>> counts(
        blocks, std::vector<std::uint64_t>(T + 1, 0));

    parallel_for(blocks, options.workers, [&](std::size_t b) {
        Engine rng = make_engine(options.seed, {b});
        boost::random::uniform_real_distribution<double> unif(0.0, c);
        NonnegMatrix X(dims.M, dims.H), Y(dims.H, dims.N), R(dims.M, dims.N);
        const std::uint64_t begin = b * kBlockSize;
        const std::uint64_t end =
            std::min(options.samples, begin + kBlockSize);
        auto& local = counts[b];
        for (std::uint64_t s = begin; s < end; ++s) {
            for (Eigen::Index i = 0; i < X.size(); ++i)
                X.data()[i] = unif(rng);
            for (Eigen::Index i = 0; i < Y.size(); ++i)
                Y.data()[i] = unif(rng);
            R.noalias() = X * Y;
            R -= ab;
            const double k = R.squaredNorm();
            // thresholds are decreasing: the prefix with t >= k is hit.
            const auto it = std::partition_point(
                thresholds.begin(), thresholds.end(),
                [k](double t) { return t >= k; });
            ++local[static_cast<std::size_t>(it - thresholds.begin())];
        }
    });

    VolumeScan scan;
    scan.thresholds = thresholds;
    scan.sample_count = options.samples;
    scan.seed = options.seed;
    scan.box_upper = c;
    scan.box_volume = std::pow(c, dims.M * dims.H + dims.H * dims.N);
    scan.hits.assign(T, 0);

    std::vector<std::uint64_t> merged(T + 1, 0);
    for (const auto& local : counts)
        for (std::size_t k = 0; k <= T; ++k)
            merged[k] += local[k];
    std::uint64_t running = 0;
    for (std::size_t k = T; k >= 1; --k) {
        running += merged[k];
        scan.hits[k - 1] = running;
    }

    const double S = static_cast<double>(options.samples);
    for (std::size_t j = 0; j < T; ++j) {
        const double p = static_cast<double>(scan.hits[j]) / S;
        scan.volumes.push_back(scan.box_volume * p);
        scan.stderrs.push_back(scan.box_volume * std::sqrt(p * (1 - p) / S));
    }
    return scan;
}

namespace {

std::string scan_diagnostics(const VolumeScan& scan) {
    std::ostringstream os;
    os << "samples=" << scan.sample_count << " hits:";
    for (std::size_t j = 0; j < scan.thresholds.size(); ++j)
        os << ' ' << scan.thresholds[j] << ':' << scan.hits[j];
    return os.str();
}

} // namespace

SlopeFit fit_lambda(const VolumeScan& scan) {
    const std::size_t T = scan.thresholds.size();
    if (scan.hits.size() != T || scan.volumes.size() != T)
        throw ValidationError("fit_lambda: inconsistent scan");

    std::vector<std::size_t> idx;
    std::size_t lowest = T;
    for (std::size_t j = 0; j < T; ++j)
        if (scan.hits[j] >= kMinFitHits)
            lowest = j; // thresholds decrease, so the last one is smallest
    if (lowest < T) {
        const double t_lo = scan.thresholds[lowest];
        for (std::size_t j = 0; j <= lowest; ++j)
            if (scan.thresholds[j] <= 10.0 * t_lo * (1 + 1e-12))
                idx.push_back(j);
    }
    if (idx.size() < 4) {
        idx.clear();
        for (std::size_t j = 0; j < T; ++j)
            if (scan.hits[j] > 0)
                idx.push_back(j);
    }
    if (idx.size() < 4)
        throw EstimationError("fit_lambda: fewer than 4 thresholds with hits; "
                              "raise the sample count or the thresholds",
                              scan_diagnostics(scan));

    const double S = static_cast<double>(scan.sample_count);
    std::vector<double> x, y, w;
    for (std::size_t j : idx) {
        const double h = static_cast<double>(scan.hits[j]);
        const double p = S > 0 ? h / S : 1.0;
        x.push_back(std::log(scan.thresholds[j]));
        y.push_back(std::log(scan.volumes[j]));
        // Delta-method variance of log V is (1 - p) / hits; floor it so an
        // exact (synthetic) scan still has finite weights.
        w.push_back(1.0 / std::max((1.0 - p) / h, 1e-12));
    }

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xm) * (x[i] - xm);
        sxy += w[i] * (x[i] - xm) * (y[i] - ym);
        syy += w[i] * (y[i] - ym) * (y[i] - ym);
    }
    if (!(sxx > 0))
        throw EstimationError("fit_lambda: degenerate threshold window",
                              scan_diagnostics(scan));

    SlopeFit fit;
    fit.lambda_hat = sxy / sxx;
    fit.points = static_cast<int>(idx.size());
    fit.t_hi = scan.thresholds[idx.front()];
    fit.t_lo = scan.thresholds[idx.back()];
    fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;

    // The cumulative counts are nested, so the per-point weights overstate
    // the information. The endpoint log-ratio has variance
    // 1/h_lo - 1/h_hi for nested binomial counts; report the larger error.
    const double wls_se = std::sqrt(1.0 / sxx);
    const double h_hi = static_cast<double>(scan.hits[idx.front()]);
    const double h_lo = static_cast<double>(scan.hits[idx.back()]);
    const double span = x.front() - x.back();
    const double end_var = (h_lo > 0 && h_hi > 0 && S > 0)
                               ? std::max(0.0, 1.0 / h_lo - 1.0 / h_hi)
                               : 0.0;
    fit.std_error = std::max(wls_se, std::sqrt(end_var) / span);
    return fit;
}

BoundCheck check_bound(const ModelDims& dims, const TrueStructure& truth,
                       const SlopeFit& fit) {
    BoundCheck out;
    out.lambda_hat = fit.lambda_hat;
    out.std_error = fit.std_error;
    out.bound = nmf_rlct_bound(dims, truth);
    out.consistent =
        fit.lambda_hat <= out.bound.value.to_double() + 3.0 * fit.std_error;
    return out;
}

nlohmann::json to_json(const VolumeScan& scan) {
    return {{"thresholds", scan.thresholds},
            {"hits", scan.hits},
            {"volumes", scan.volumes},
            {"stderrs", scan.stderrs},
            {"sample_count", scan.sample_count},
            {"seed", scan.seed},
            {"box_upper", scan.box_upper},
            {"box_volume", scan.box_volume}};
}

nlohmann::json to_json(const SlopeFit& fit) {
    return {{"lambda_hat", fit.lambda_hat},
            {"stderr", fit.std_error},
            {"fit_window", {fit.t_lo, fit.t_hi}},
            {"r_squared", fit.r_squared},
            {"points", fit.points}};
}

nlohmann::json to_json(const BoundCheck& check) {
    return {{"lambda_hat", check.lambda_hat},
            {"stderr", check.std_error},
            {"bound", check.bound.value.str()},
            {"bound_float", check.bound.value.to_double()},
            {"kind", to_string(check.bound.kind)},
            {"source", to_string(check.bound.source)},
            {"consistent", check.consistent}};
}

void write_scan_csv(std::ostream& os, const VolumeScan& scan) {
    const auto prec = os.precision(17);
    os << "t,volume,stderr,hits\n";
    for (std::size_t j = 0; j < scan.thresholds.size(); ++j)
        os << scan.thresholds[j] << ',' << scan.volumes[j] << ','
           << scan.stderrs[j] << ',' << scan.hits[j] << '\n';
    os.precision(prec);
}

} // namespace rlct_nmf
