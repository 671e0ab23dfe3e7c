#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rlct_nmf/bayes_nmf.hpp"

namespace rlct_nmf {

struct FreeEnergyEstimate {
    std::size_t n = 0;
    int H = 0;
    double f_value = 0;
    double std_error = 0;
    std::string method = "ThermodynamicIntegration";
    std::size_t ladder_size = 0;
    std::uint64_t seed = 0;
    std::vector<double> ladder;
    std::vector<double> rung_means; // E_beta[log L] per rung
    std::vector<double> rung_stderrs;
};

/// beta_k = (k / rungs)^power for k = 0..rungs.
std::vector<double> power_ladder(int rungs, double power);

/// beta_k = (k / 16)^2.
std::vector<double> quadratic_ladder(int rungs = 16);

/// beta_k = (k / 32)^5. Crowding rungs near beta = 0, where
/// E_beta[log L] changes fastest, keeps the trapezoid bias on F below the
/// Monte Carlo noise for the desk-scale configurations.
std::vector<double> default_ladder();

/// F = -log int prior * L, by thermodynamic integration:
/// F = -int_0^1 E_beta[log L] d beta with the trapezoid rule on `ladder`.
/// beta = 0 uses exact prior draws; other rungs run tempered chains with
/// substreams {k}. The ladder must rise strictly from 0 to 1 with at least
/// 10 points.
FreeEnergyEstimate estimate_free_energy(const Dataset& data,
                                        const PriorBox& prior, int H,
                                        const std::vector<double>& ladder,
                                        const ChainConfig& chain,
                                        std::uint64_t seed, int workers = 1);

/// Sum over the dataset of log q(W_i), with q the generating law; same
/// additive convention as log_likelihood.
double truth_log_likelihood(const Dataset& data);

struct FreeEnergyPoint {
    std::size_t n = 0;
    double f_value = 0;
    double truth_log_likelihood = 0;
};

struct SlopeEstimate {
    double slope = 0;
    double std_error = 0;
    double intercept = 0;
    std::size_t points = 0;
};

/// Least-squares slope of F(n) + sum log q(W_i) against log n. Several
/// points may share an n (replications); at least 3 distinct n are needed.
SlopeEstimate fit_lambda_from_free_energy(std::span<const FreeEnergyPoint> pts);

struct SbicCandidate {
    int H = 0;
    int working_h0 = 0;
    double best_log_likelihood = 0;
    RlctValue penalty;
    double score = 0;
    double acceptance_rate = 0;
    /// Scores under every working H0 in 0..min(H, M, N).
    std::vector<std::pair<int, double>> scores_by_h0;
};

struct SbicReport {
    std::size_t n = 0;
    std::vector<SbicCandidate> candidates;
    int selected_H = 0;
};

/// -best_log_likelihood + lambda log n.
double sbic_score(double best_log_likelihood, const Rational& lambda,
                  std::size_t n);

/// Index of the minimal score; ties go to the smaller H.
std::size_t select_candidate(std::span<const SbicCandidate> candidates);

/// Scores each candidate H with the best log-likelihood its posterior
/// sampler visited plus the NMF bound at working H0 = min(H, M, N) times
/// log n, and selects the minimum. Chains for candidate H use substream {H}.
SbicReport sbic_select(const Dataset& data,
                       const std::vector<int>& candidate_H,
                       const PriorBox& prior, const ChainConfig& chain,
                       std::uint64_t seed, int workers = 1);

nlohmann::json to_json(const FreeEnergyEstimate& estimate);
nlohmann::json to_json(const SlopeEstimate& slope);
nlohmann::json to_json(const SbicReport& report);

/// H,score rows.
std::string sbic_summary_csv(const SbicReport& report);

} // namespace rlct_nmf
