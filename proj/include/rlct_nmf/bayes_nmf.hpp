#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "rlct_nmf/divergences.hpp"
#include "rlct_nmf/rlct_core.hpp"

namespace rlct_nmf {

/// Uniform prior on [lower, upper] for every entry of X and Y.
/// lower == upper is accepted and gives a point-mass prior.
struct PriorBox {
    double lower = 0.0;
    double upper = 2.0;

    void validate(Family family) const;
    double width() const { return upper - lower; }
    bool contains(double v) const { return v >= lower && v <= upper; }
};

/// Default box [eps, c] with c = 2 max(1, max entry of AB). eps is zero for
/// the Gaussian family and 1e-3 c for the positive families.
PriorBox default_prior_box(Family family, const NonnegMatrix& ab);

struct ParamPoint {
    NonnegMatrix X; // M x H
    NonnegMatrix Y; // H x N

    NonnegMatrix mean() const { return X * Y; }
    bool inside(const PriorBox& box) const;
};

struct Dataset {
    Family family = Family::Gaussian;
    int M = 1;
    int N = 1;
    std::vector<NonnegMatrix> observations;
    std::optional<TrueStructure> truth;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return observations.size(); }
    /// Shape and family checks (including integrality for Poisson).
    void validate() const;
    /// First k observations, sharing truth and seed.
    Dataset prefix(std::size_t k) const;
};

struct GenerateOptions {
    /// Redraw Gaussian entries until nonnegative. Changes the data law only;
    /// the likelihood stays the untruncated Gaussian.
    bool truncate_gaussian = false;
};

/// n independent draws of W with entrywise law family(mean = AB).
Dataset generate_dataset(Family family, const ModelDims& dims,
                         const TrueStructure& truth, std::size_t n,
                         std::uint64_t seed, const GenerateOptions& opts = {});

/// log p(W | mean) up to a family constant:
///   Gaussian    -||W - mean||^2 / 2                (zero at W = mean)
///   Poisson     sum w log m - m - log w!            (full pmf)
///   Exponential sum -log m - w / m                  (full density)
double log_likelihood(Family family, const NonnegMatrix& W,
                      const NonnegMatrix& mean);
double log_likelihood(Family family, const NonnegMatrix& W,
                      const ParamPoint& point);

/// Sum of log_likelihood over a dataset, evaluated in O(MN) from sufficient
/// statistics (n, sum of W, and a constant).
class DatasetLikelihood {
  public:
    explicit DatasetLikelihood(const Dataset& data);

    double operator()(const NonnegMatrix& mean) const;
    std::size_t n() const { return n_; }

  private:
    Family family_;
    std::size_t n_;
    NonnegMatrix sum_;
    double constant_ = 0;
};

struct ChainConfig {
    std::size_t burn_in = 5000;
    std::size_t samples = 2000; // retained per chain
    std::size_t thinning = 5;
    std::size_t chains = 4;
    double initial_step = 0.1;
    double target_acceptance = 0.3;
};

struct ChainResult {
    std::vector<ParamPoint> samples;
    std::vector<double> log_likelihoods; // at each retained sample
    double acceptance_rate = 0;          // post burn-in
    double step_size = 0;                // frozen value after burn-in
    double best_log_likelihood = 0;      // over every visited state
    ParamPoint best_point;
};

/// Random-walk Metropolis on the tempered posterior prior * L^beta, with
/// reflecting Gaussian proposals inside the prior box. The step size adapts
/// (Robbins-Monro, multiplicative) during burn-in only. The start point
/// defaults to a draw from the prior.
ChainResult run_chain(const Dataset& data, int H, const PriorBox& prior,
                      const ChainConfig& config, std::uint64_t seed,
                      double beta = 1.0,
                      const std::optional<ParamPoint>& start = std::nullopt);

/// config.chains independent chains with substreams {chain}, pooled.
ChainResult sample_posterior(const Dataset& data, int H, const PriorBox& prior,
                             const ChainConfig& config, std::uint64_t seed,
                             int workers = 1, double beta = 1.0);

/// Posterior means precomputed for repeated predictive evaluation.
class PredictiveDensity {
  public:
    PredictiveDensity(Family family, std::span<const ParamPoint> samples);

    /// log (1/S) sum_s p(W | X_s, Y_s), log-sum-exp stabilised.
    double log_density(const NonnegMatrix& W) const;
    std::size_t size() const { return static_cast<std::size_t>(offset_.size()); }

  private:
    // log p(W | m_s) = base(W) + coeffs_.row(s) . vec(W) + offset_(s)
    Family family_;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Eigen::MatrixXd coeffs_;
    Eigen::VectorXd offset_;
    mutable Eigen::VectorXd scratch_;
};

double log_predictive(const NonnegMatrix& W,
                      std::span<const ParamPoint> posterior_samples,
                      Family family);

struct GEstimate {
    double g_mean = 0;
    double std_error = 0;
    std::size_t n = 0;
    std::size_t replications = 0;
    std::size_t posterior_samples_per_chain = 0;
    double mean_acceptance = 0;
    double min_acceptance = 0;
    double max_acceptance = 0;
    std::vector<double> per_replication;
};

struct GeneralizationConfig {
    Family family = Family::Gaussian;
    ModelDims dims;
    TrueStructure truth;
    std::size_t n = 200;
    std::size_t replications = 50;
    ChainConfig chain;
    std::size_t mc_test_draws = 10'000;
    /// Gaussian only: pair each test draw AB + Z with AB - Z.
    bool antithetic = true;
    std::optional<PriorBox> prior;
    std::uint64_t seed = 0;
    int workers = 1;
    GenerateOptions generate;
};

/// Monte Carlo estimate of E[G] = E[KL(q || predictive)]. Each replication
/// draws a fresh dataset, samples the posterior and averages
/// log q(W) - log predictive(W) over test draws W ~ q. Substreams per
/// replication r are {r, 0} (data), {r, 1} (chains) and {r, 2} (test draws).
GEstimate estimate_generalization_error(const GeneralizationConfig& config);

nlohmann::json to_json(const PriorBox& prior);
nlohmann::json to_json(const ChainConfig& config);
nlohmann::json to_json(const GEstimate& estimate);

/// Mean and standard error of the mean.
std::pair<double, double> mean_and_stderr(std::span<const double> values);

} // namespace rlct_nmf
