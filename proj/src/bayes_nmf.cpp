#include "rlct_nmf/bayes_nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/parallel.hpp"
#include "rlct_nmf/random.hpp"

namespace rlct_nmf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorial_sum(const NonnegMatrix& W) {
    double s = 0;
    for (Eigen::Index i = 0; i < W.size(); ++i)
        s += std::lgamma(W.data()[i] + 1.0);
    return s;
}

/// Reflects v into [lo, hi] (any number of bounces).
double reflect(double v, double lo, double hi) {
    const double w = hi - lo;
    if (w <= 0)
        return lo;
    double y = std::fmod(v - lo, 2 * w);
    if (y < 0)
        y += 2 * w;
    return y <= w ? lo + y : hi - (y - w);
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double top = v.maxCoeff();
    if (!std::isfinite(top))
        return top;
    return top + std::log((v.array() - top).exp().sum());
}

} // namespace

// ---------------------------------------------------------------------------
// Prior and parameters

void PriorBox::validate(Family family) const {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower < 0 ||
        upper < lower)
        throw ValidationError("prior box needs 0 <= lower <= upper < inf");
    if (requires_positive_mean(family) && !(lower > 0))
        throw ValidationError("prior box for " +
                              std::string(to_string(family)) +
                              " needs a strictly positive lower edge");
    if (!(upper > 0))
        throw ValidationError("prior box upper edge must be positive");
}

PriorBox default_prior_box(Family family, const NonnegMatrix& ab) {
    const double top = ab.size() ? ab.maxCoeff() : 0.0;
    const double c = 2.0 * std::max(1.0, top);
    return {requires_positive_mean(family) ? 1e-3 * c : 0.0, c};
}

bool ParamPoint::inside(const PriorBox& box) const {
    auto within = [&](const NonnegMatrix& m) {
        return (m.array() >= box.lower).all() && (m.array() <= box.upper).all();
    };
    return within(X) && within(Y);
}

// ---------------------------------------------------------------------------
// Data

void Dataset::validate() const {
    if (M < 1 || N < 1)
        throw ValidationError("dataset shape must be at least 1 x 1");
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& W = observations[i];
        const std::string where = "observation " + std::to_string(i + 1);
        if (W.rows() != M || W.cols() != N)
            throw ValidationError(where + ": expected " + std::to_string(M) +
                                  "x" + std::to_string(N));
        if (!W.allFinite())
            throw ValidationError(where + ": non-finite entry");
        if (family == Family::Poisson &&
            !(W.array() >= 0 && W.array() == W.array().floor()).all())
            throw ValidationError(where +
                                  ": Poisson observations must be "
                                  "nonnegative integers");
        if (family == Family::Exponential && !all_nonnegative(W))
            throw ValidationError(where + ": exponential observations must "
                                          "be nonnegative");
    }
}

Dataset Dataset::prefix(std::size_t k) const {
    Dataset out = *this;
    out.observations.resize(std::min(k, observations.size()));
    return out;
}

Dataset generate_dataset(Family family, const ModelDims& dims,
                         const TrueStructure& truth, std::size_t n,
                         std::uint64_t seed, const GenerateOptions& opts) {
    truth.validate(dims);
    const NonnegMatrix mean = truth.product(dims.M, dims.N);
    if (requires_positive_mean(family) && !all_positive(mean))
        throw ValidationError(std::string(to_string(family)) +
                              " data needs a strictly positive mean AB");

    Dataset data;
    data.family = family;
    data.M = dims.M;
    data.N = dims.N;
    data.truth = truth;
    data.seed = seed;
    data.observations.reserve(n);

    Engine rng = make_engine(seed, {});
    boost::random::normal_distribution<double> normal;
    boost::random::exponential_distribution<double> expo;
    for (std::size_t i = 0; i < n; ++i) {
        NonnegMatrix W(dims.M, dims.N);
        for (Eigen::Index j = 0; j < W.size(); ++j) {
            const double m = mean.data()[j];
            double w = 0;
            switch (family) {
            case Family::Gaussian:
                do {
                    w = m + normal(rng);
                } while (opts.truncate_gaussian && w < 0);
                break;
            case Family::Poisson:
                w = static_cast<double>(
                    boost::random::poisson_distribution<long, double>(m)(rng));
                break;
            case Family::Exponential:
                w = m * expo(rng);
                break;
            }
            W.data()[j] = w;
        }
        data.observations.push_back(std::move(W));
    }
    return data;
}

// ---------------------------------------------------------------------------
// Likelihood

double log_likelihood(Family family, const NonnegMatrix& W,
                      const NonnegMatrix& mean) {
    require_same_shape(W, mean, "log_likelihood");
    switch (family) {
    case Family::Gaussian:
        return -0.5 * (W - mean).squaredNorm();
    case Family::Poisson:
        if (!all_positive(mean))
            throw ValidationError("Poisson mean must be strictly positive");
        return (W.array() * mean.array().log()).sum() - mean.sum() -
               log_factorial_sum(W);
    case Family::Exponential:
        if (!all_positive(mean))
            throw ValidationError("exponential mean must be strictly positive");
        return -mean.array().log().sum() - (W.array() / mean.array()).sum();
    }
    throw ValidationError("unknown family");
}

double log_likelihood(Family family, const NonnegMatrix& W,
                      const ParamPoint& point) {
    return log_likelihood(family, W, point.mean());
}

DatasetLikelihood::DatasetLikelihood(const Dataset& data)
    : family_(data.family), n_(data.size()),
      sum_(NonnegMatrix::Zero(data.M, data.N)) {
    for (const auto& W : data.observations) {
        sum_ += W;
        switch (family_) {
        case Family::Gaussian:
            constant_ -= 0.5 * W.squaredNorm();
            break;
        case Family::Poisson:
            constant_ -= log_factorial_sum(W);
            break;
        case Family::Exponential:
            break;
        }
    }
}

double DatasetLikelihood::operator()(const NonnegMatrix& mean) const {
    if (n_ == 0)
        return 0.0;
    const double n = static_cast<double>(n_);
    switch (family_) {
    case Family::Gaussian:
        return constant_ + (sum_.array() * mean.array()).sum() -
               0.5 * n * mean.squaredNorm();
    case Family::Poisson:
        if (!all_positive(mean))
            return kNegInf;
        return constant_ + (sum_.array() * mean.array().log()).sum() -
               n * mean.sum();
    case Family::Exponential:
        if (!all_positive(mean))
            return kNegInf;
        return -n * mean.array().log().sum() -
               (sum_.array() / mean.array()).sum();
    }
    return kNegInf;
}

// ---------------------------------------------------------------------------
// Sampling

ChainResult run_chain(const Dataset& data, int H, const PriorBox& prior,
                      const ChainConfig& config, std::uint64_t seed,
                      double beta, const std::optional<ParamPoint>& start) {
    data.validate();
    prior.validate(data.family);
    if (H < 1)
        throw ValidationError("run_chain: H must be >= 1");
    if (config.thinning < 1)
        throw ValidationError("run_chain: thinning must be >= 1");
    if (!(config.initial_step > 0))
        throw ValidationError("run_chain: initial step must be positive");
    if (!(beta >= 0) || !std::isfinite(beta))
        throw ValidationError("run_chain: inverse temperature must be >= 0");

    const DatasetLikelihood loglik(data);
    Engine rng = make_engine(seed, {});
    boost::random::uniform_real_distribution<double> prior_draw(prior.lower,
                                                                prior.upper);
    boost::random::normal_distribution<double> normal;
    boost::random::uniform_01<double> unif;

    ParamPoint cur;
    if (start) {
        if (start->X.rows() != data.M || start->X.cols() != H ||
            start->Y.rows() != H || start->Y.cols() != data.N)
            throw ValidationError("run_chain: start point has wrong shape");
        if (!start->inside(prior))
            throw ValidationError("run_chain: start point lies outside the "
                                  "prior box (zero prior density)");
        cur = *start;
    } else {
        cur.X.resize(data.M, H);
        cur.Y.resize(H, data.N);
        for (Eigen::Index i = 0; i < cur.X.size(); ++i)
            cur.X.data()[i] = prior.width() > 0 ? prior_draw(rng) : prior.lower;
        for (Eigen::Index i = 0; i < cur.Y.size(); ++i)
            cur.Y.data()[i] = prior.width() > 0 ? prior_draw(rng) : prior.lower;
    }
    double cur_ll = loglik(cur.X * cur.Y);
    if (beta > 0 && !std::isfinite(cur_ll))
        throw ValidationError("run_chain: start point has zero likelihood");

    ChainResult result;
    result.best_log_likelihood = cur_ll;
    result.best_point = cur;
    result.samples.reserve(config.samples);
    result.log_likelihoods.reserve(config.samples);

    const double width = prior.width();
    double step = width > 0 ? std::min(config.initial_step, width) : 0.0;
    const double step_floor = 1e-9 * width;

    ParamPoint prop = cur;
    NonnegMatrix mean(data.M, data.N);
    std::size_t accepted = 0, proposed = 0;
    const std::size_t total = config.burn_in + config.samples * config.thinning;

    for (std::size_t t = 0; t < total; ++t) {
        for (Eigen::Index i = 0; i < cur.X.size(); ++i)
            prop.X.data()[i] = reflect(cur.X.data()[i] + step * normal(rng),
                                       prior.lower, prior.upper);
        for (Eigen::Index i = 0; i < cur.Y.size(); ++i)
            prop.Y.data()[i] = reflect(cur.Y.data()[i] + step * normal(rng),
                                       prior.lower, prior.upper);
        mean.noalias() = prop.X * prop.Y;
        const double prop_ll = loglik(mean);

        bool accept;
        if (beta == 0)
            accept = true;
        else if (!std::isfinite(prop_ll))
            accept = false;
        else
            accept = std::log(unif(rng)) < beta * (prop_ll - cur_ll);

        if (accept) {
            std::swap(cur, prop);
            cur_ll = prop_ll;
            if (cur_ll > result.best_log_likelihood) {
                result.best_log_likelihood = cur_ll;
                result.best_point = cur;
            }
        }

        if (t < config.burn_in) {
            if (width > 0) {
                const double gain =
                    1.0 / std::pow(1.0 + static_cast<double>(t) / 10.0, 0.6);
                step *= std::exp(gain * ((accept ? 1.0 : 0.0) -
                                         config.target_acceptance));
                step = std::clamp(step, step_floor, width);
            }
            continue;
        }
        ++proposed;
        accepted += accept ? 1 : 0;
        if ((t - config.burn_in + 1) % config.thinning == 0) {
            result.samples.push_back(cur);
            result.log_likelihoods.push_back(cur_ll);
        }
    }

    result.acceptance_rate =
        proposed ? static_cast<double>(accepted) / proposed : 0.0;
    result.step_size = step;
    return result;
}

ChainResult sample_posterior(const Dataset& data, int H, const PriorBox& prior,
                             const ChainConfig& config, std::uint64_t seed,
                             int workers, double beta) {
    if (config.chains < 1)
        throw ValidationError("sample_posterior: need at least one chain");
    std::vector<ChainResult> runs(config.chains);
    parallel_for(config.chains, workers, [&](std::size_t c) {
        runs[c] = run_chain(data, H, prior, config, derive_seed(seed, {c}),
                            beta);
    });

    ChainResult pooled = std::move(runs.front());
    double acc = pooled.acceptance_rate, step = pooled.step_size;
    for (std::size_t c = 1; c < runs.size(); ++c) {
        auto& r = runs[c];
        pooled.samples.insert(pooled.samples.end(),
                              std::make_move_iterator(r.samples.begin()),
                              std::make_move_iterator(r.samples.end()));
        pooled.log_likelihoods.insert(pooled.log_likelihoods.end(),
                                      r.log_likelihoods.begin(),
                                      r.log_likelihoods.end());
        acc += r.acceptance_rate;
        step += r.step_size;
        if (r.best_log_likelihood > pooled.best_log_likelihood) {
            pooled.best_log_likelihood = r.best_log_likelihood;
            pooled.best_point = std::move(r.best_point);
        }
    }
    pooled.acceptance_rate = acc / static_cast<double>(runs.size());
    pooled.step_size = step / static_cast<double>(runs.size());
    return pooled;
}

// ---------------------------------------------------------------------------
// Predictive density

PredictiveDensity::PredictiveDensity(Family family,
                                     std::span<const ParamPoint> samples)
    : family_(family) {
    if (samples.empty())
        throw ValidationError("predictive density needs at least one "
                              "posterior sample");
    const Eigen::Index M = samples.front().X.rows();
    const Eigen::Index N = samples.front().Y.cols();
    const auto S = static_cast<Eigen::Index>(samples.size());
    rows_ = M;
    cols_ = N;
    coeffs_.resize(S, M * N);
    offset_.resize(S);
    for (Eigen::Index s = 0; s < S; ++s) {
        const NonnegMatrix m = samples[s].mean();
        if (m.rows() != M || m.cols() != N)
            throw ValidationError("posterior samples disagree in shape");
        const Eigen::Map<const Eigen::RowVectorXd> flat(m.data(), M * N);
        switch (family_) {
        case Family::Gaussian:
            coeffs_.row(s) = flat;
            offset_(s) = -0.5 * m.squaredNorm();
            break;
        case Family::Poisson:
            if (!all_positive(m))
                throw ValidationError("Poisson posterior mean not positive");
            coeffs_.row(s) = flat.array().log();
            offset_(s) = -m.sum();
            break;
        case Family::Exponential:
            if (!all_positive(m))
                throw ValidationError("exponential posterior mean not "
                                      "positive");
            coeffs_.row(s) = -flat.array().inverse();
            offset_(s) = -flat.array().log().sum();
            break;
        }
    }
    scratch_.resize(S);
}

double PredictiveDensity::log_density(const NonnegMatrix& W) const {
    if (W.rows() != rows_ || W.cols() != cols_)
        throw ValidationError("predictive density: observation shape "
                              "mismatch");
    const Eigen::Map<const Eigen::VectorXd> w(W.data(), W.size());
    scratch_.noalias() = coeffs_ * w;
    scratch_ += offset_;
    double base = 0;
    switch (family_) {
    case Family::Gaussian:
        base = -0.5 * W.squaredNorm();
        break;
    case Family::Poisson:
        base = -log_factorial_sum(W);
        break;
    case Family::Exponential:
        break;
    }
    return base + log_sum_exp(scratch_) -
           std::log(static_cast<double>(scratch_.size()));
}

double log_predictive(const NonnegMatrix& W,
                      std::span<const ParamPoint> posterior_samples,
                      Family family) {
    return PredictiveDensity(family, posterior_samples).log_density(W);
}

// ---------------------------------------------------------------------------
// Generalization error

std::pair<double, double> mean_and_stderr(std::span<const double> values) {
    if (values.empty())
        return {0.0, 0.0};
    double sum = 0;
    for (double v : values)
        sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2)
        return {mean, 0.0};
    double ss = 0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double k = static_cast<double>(values.size());
    return {mean, std::sqrt(ss / (k - 1) / k)};
}

GEstimate estimate_generalization_error(const GeneralizationConfig& config) {
    config.truth.validate(config.dims);
    if (config.dims.H < 1)
        throw ValidationError("generalization error: H must be >= 1");
    if (config.replications < 1)
        throw ValidationError("generalization error: need >= 1 replication");
    if (config.mc_test_draws < 2)
        throw ValidationError("generalization error: need >= 2 test draws");

    const Family family = config.family;
    const NonnegMatrix truth_mean =
        config.truth.product(config.dims.M, config.dims.N);
    const PriorBox prior =
        config.prior.value_or(default_prior_box(family, truth_mean));
    prior.validate(family);
    const bool antithetic = config.antithetic && family == Family::Gaussian;

    std::vector<double> g(config.replications);
    std::vector<double> acceptance(config.replications);

    parallel_for(config.replications, config.workers, [&](std::size_t r) {
        const Dataset data =
            generate_dataset(family, config.dims, config.truth, config.n,
                             derive_seed(config.seed, {r, 0}), config.generate);
        const ChainResult post =
            sample_posterior(data, config.dims.H, prior, config.chain,
                             derive_seed(config.seed, {r, 1}));
        acceptance[r] = post.acceptance_rate;
        const PredictiveDensity predictive(family, post.samples);

        // Test draws always come from q, untruncated: G is defined against
        // the model's own law of W.
        Engine rng = make_engine(config.seed, {r, 2});
        boost::random::normal_distribution<double> normal;
        boost::random::exponential_distribution<double> expo;
        NonnegMatrix W(config.dims.M, config.dims.N);
        NonnegMatrix Z(config.dims.M, config.dims.N);
        double total = 0;
        std::size_t evaluated = 0;
        auto accumulate = [&](const NonnegMatrix& w) {
            total += log_likelihood(family, w, truth_mean) -
                     predictive.log_density(w);
            ++evaluated;
        };
        while (evaluated < config.mc_test_draws) {
            switch (family) {
            case Family::Gaussian:
                for (Eigen::Index j = 0; j < Z.size(); ++j)
                    Z.data()[j] = normal(rng);
                W = truth_mean + Z;
                accumulate(W);
                if (antithetic && evaluated < config.mc_test_draws) {
                    W = truth_mean - Z;
                    accumulate(W);
                }
                break;
            case Family::Poisson:
                for (Eigen::Index j = 0; j < W.size(); ++j)
                    W.data()[j] = static_cast<double>(
                        boost::random::poisson_distribution<long, double>(
                            truth_mean.data()[j])(rng));
                accumulate(W);
                break;
            case Family::Exponential:
                for (Eigen::Index j = 0; j < W.size(); ++j)
                    W.data()[j] = truth_mean.data()[j] * expo(rng);
                accumulate(W);
                break;
            }
        }
        g[r] = total / static_cast<double>(evaluated);
    });

    GEstimate out;
    std::tie(out.g_mean, out.std_error) = mean_and_stderr(g);
    out.n = config.n;
    out.replications = config.replications;
    out.posterior_samples_per_chain = config.chain.samples;
    out.per_replication = std::move(g);
    out.mean_acceptance = mean_and_stderr(acceptance).first;
    out.min_acceptance = *std::min_element(acceptance.begin(), acceptance.end());
    out.max_acceptance = *std::max_element(acceptance.begin(), acceptance.end());
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const PriorBox& prior) {
    return {{"lower", prior.lower}, {"upper", prior.upper}};
}

nlohmann::json to_json(const ChainConfig& c) {
    return {{"burn_in", c.burn_in},
            {"samples", c.samples},
            {"thinning", c.thinning},
            {"chains", c.chains},
            {"initial_step", c.initial_step},
            {"target_acceptance", c.target_acceptance}};
}

nlohmann::json to_json(const GEstimate& e) {
    return {{"g_mean", e.g_mean},
            {"stderr", e.std_error},
            {"n_times_g", static_cast<double>(e.n) * e.g_mean},
            {"n_times_stderr", static_cast<double>(e.n) * e.std_error},
            {"n", e.n},
            {"replications", e.replications},
            {"posterior_samples_per_chain", e.posterior_samples_per_chain},
            {"acceptance", {{"mean", e.mean_acceptance},
                            {"min", e.min_acceptance},
                            {"max", e.max_acceptance}}},
            {"per_replication", e.per_replication}};
}

} // namespace rlct_nmf
