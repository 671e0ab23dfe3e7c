#include "rlct_nmf/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/random/uniform_real_distribution.hpp>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/parallel.hpp"
#include "rlct_nmf/random.hpp"

namespace rlct_nmf {

std::vector<double> power_ladder(int rungs, double power) {
    if (rungs < 1 || !(power > 0))
        throw ValidationError("ladder needs rungs >= 1 and power > 0");
    std::vector<double> out(rungs + 1);
    for (int k = 0; k <= rungs; ++k)
        out[k] = std::pow(static_cast<double>(k) / rungs, power);
    out.back() = 1.0;
    return out;
}

std::vector<double> quadratic_ladder(int rungs) {
    return power_ladder(rungs, 2.0);
}

std::vector<double> default_ladder() { return power_ladder(32, 5.0); }

namespace {

void check_ladder(const std::vector<double>& ladder) {
    if (ladder.size() < 10)
        throw ValidationError("temperature ladder needs at least 10 points");
    if (ladder.front() != 0.0 || ladder.back() != 1.0)
        throw ValidationError("temperature ladder must run from 0 to 1");
    for (std::size_t k = 1; k < ladder.size(); ++k)
        if (!(ladder[k] > ladder[k - 1]))
            throw ValidationError("temperature ladder must be increasing");
}

/// Mean and batch-means standard error of a (possibly autocorrelated)
/// sequence.
std::pair<double, double> batch_mean(const std::vector<double>& v,
                                     std::size_t batches = 20) {
    const std::size_t per = v.size() / batches;
    if (per < 1)
        return mean_and_stderr(v);
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i)
            s += v[i];
        means.push_back(s / static_cast<double>(per));
    }
    double total = 0;
    for (double x : v)
        total += x;
    return {total / static_cast<double>(v.size()),
            mean_and_stderr(means).second};
}

} // namespace

FreeEnergyEstimate estimate_free_energy(const Dataset& data,
                                        const PriorBox& prior, int H,
                                        const std::vector<double>& ladder,
                                        const ChainConfig& chain,
                                        std::uint64_t seed, int workers) {
    check_ladder(ladder);
    data.validate();
    prior.validate(data.family);
    if (H < 1)
        throw ValidationError("free energy: H must be >= 1");

    const std::size_t K = ladder.size();
    std::vector<double> means(K), errs(K);
    const DatasetLikelihood loglik(data);

    parallel_for(K, workers, [&](std::size_t k) {
        std::vector<double> values;
        if (ladder[k] == 0.0) {
            Engine rng = make_engine(seed, {k});
            boost::random::uniform_real_distribution<double> draw(prior.lower,
                                                                  prior.upper);
            const std::size_t draws = chain.samples * chain.chains;
            NonnegMatrix X(data.M, H), Y(H, data.N);
            values.reserve(draws);
            for (std::size_t i = 0; i < draws; ++i) {
                for (Eigen::Index j = 0; j < X.size(); ++j)
                    X.data()[j] = prior.width() > 0 ? draw(rng) : prior.lower;
                for (Eigen::Index j = 0; j < Y.size(); ++j)
                    Y.data()[j] = prior.width() > 0 ? draw(rng) : prior.lower;
                values.push_back(loglik(X * Y));
            }
        } else {
            values = sample_posterior(data, H, prior, chain,
                                      derive_seed(seed, {k}), 1, ladder[k])
                         .log_likelihoods;
        }
        std::tie(means[k], errs[k]) = batch_mean(values);
    });

    FreeEnergyEstimate out;
    out.n = data.size();
    out.H = H;
    out.ladder = ladder;
    out.ladder_size = K;
    out.seed = seed;
    double f = 0, var = 0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double h = ladder[k + 1] - ladder[k];
        f -= 0.5 * h * (means[k] + means[k + 1]);
    }
    for (std::size_t k = 0; k < K; ++k) {
        const double left = k > 0 ? ladder[k] - ladder[k - 1] : 0.0;
        const double right = k + 1 < K ? ladder[k + 1] - ladder[k] : 0.0;
        const double w = 0.5 * (left + right);
        var += w * w * errs[k] * errs[k];
    }
    out.f_value = f;
    out.std_error = std::sqrt(var);
    out.rung_means = std::move(means);
    out.rung_stderrs = std::move(errs);
    return out;
}

double truth_log_likelihood(const Dataset& data) {
    if (!data.truth)
        throw ValidationError("dataset carries no truth");
    const NonnegMatrix mean = data.truth->product(data.M, data.N);
    double s = 0;
    for (const auto& W : data.observations)
        s += log_likelihood(data.family, W, mean);
    return s;
}

SlopeEstimate fit_lambda_from_free_energy(std::span<const FreeEnergyPoint> pts) {
    std::set<std::size_t> distinct;
    for (const auto& p : pts) {
        if (p.n < 1)
            throw ValidationError("free-energy fit: n must be >= 1");
        distinct.insert(p.n);
    }
    if (distinct.size() < 3)
        throw ValidationError("free-energy fit needs at least 3 distinct n");

    const double k = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += std::log(static_cast<double>(p.n));
        sy += p.f_value + p.truth_log_likelihood;
    }
    const double xm = sx / k, ym = sy / k;
    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double x = std::log(static_cast<double>(p.n)) - xm;
        sxx += x * x;
        sxy += x * (p.f_value + p.truth_log_likelihood - ym);
    }
    SlopeEstimate out;
    out.slope = sxy / sxx;
    out.intercept = ym - out.slope * xm;
    out.points = pts.size();
    double rss = 0;
    for (const auto& p : pts) {
        const double x = std::log(static_cast<double>(p.n));
        const double e =
            p.f_value + p.truth_log_likelihood - out.intercept - out.slope * x;
        rss += e * e;
    }
    out.std_error = pts.size() > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
    return out;
}

double sbic_score(double best_log_likelihood, const Rational& lambda,
                  std::size_t n) {
    const double log_n = n > 0 ? std::log(static_cast<double>(n)) : 0.0;
    return -best_log_likelihood + lambda.to_double() * log_n;
}

std::size_t select_candidate(std::span<const SbicCandidate> candidates) {
    if (candidates.empty())
        throw ValidationError("sBIC: no candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const auto& b = candidates[best];
        if (c.score < b.score || (c.score == b.score && c.H < b.H))
            best = i;
    }
    return best;
}

SbicReport sbic_select(const Dataset& data,
                       const std::vector<int>& candidate_H,
                       const PriorBox& prior, const ChainConfig& chain,
                       std::uint64_t seed, int workers) {
    if (candidate_H.empty())
        throw ValidationError("sBIC: candidate list is empty");
    for (int H : candidate_H)
        if (H < 1)
            throw ValidationError("sBIC: candidate H must be >= 1");
    data.validate();

    SbicReport report;
    report.n = data.size();
    report.candidates.resize(candidate_H.size());

    parallel_for(candidate_H.size(), workers, [&](std::size_t i) {
        const int H = candidate_H[i];
        const ChainResult post =
            sample_posterior(data, H, prior, chain,
                             derive_seed(seed, {static_cast<std::uint64_t>(H)}));
        const ModelDims dims{data.M, data.N, H};
        const int h0_max = std::min({H, data.M, data.N});

        SbicCandidate c;
        c.H = H;
        c.working_h0 = h0_max;
        c.best_log_likelihood = post.best_log_likelihood;
        c.acceptance_rate = post.acceptance_rate;
        for (int h0 = 0; h0 <= h0_max; ++h0) {
            const RlctValue lam = nmf_rlct_bound(dims, TrueStructure::of_rank(h0));
            const double s = sbic_score(c.best_log_likelihood, lam.value,
                                        report.n);
            c.scores_by_h0.emplace_back(h0, s);
            if (h0 == h0_max) {
                c.penalty = lam;
                c.score = s;
            }
        }
        report.candidates[i] = std::move(c);
    });

    report.selected_H =
        report.candidates[select_candidate(report.candidates)].H;
    return report;
}

nlohmann::json to_json(const FreeEnergyEstimate& e) {
    return {{"n", e.n},
            {"H", e.H},
            {"f_value", e.f_value},
            {"stderr", e.std_error},
            {"method", e.method},
            {"ladder_size", e.ladder_size},
            {"seed", e.seed},
            {"ladder", e.ladder},
            {"rung_means", e.rung_means},
            {"rung_stderrs", e.rung_stderrs}};
}

nlohmann::json to_json(const SlopeEstimate& s) {
    return {{"slope", s.slope},
            {"stderr", s.std_error},
            {"intercept", s.intercept},
            {"points", s.points}};
}

nlohmann::json to_json(const SbicReport& report) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : report.candidates) {
        nlohmann::json by_h0 = nlohmann::json::array();
        for (const auto& [h0, s] : c.scores_by_h0)
            by_h0.push_back({{"H0", h0}, {"score", s}});
        cands.push_back({{"H", c.H},
                         {"working_H0", c.working_h0},
                         {"best_log_likelihood", c.best_log_likelihood},
                         {"lambda", c.penalty.value.str()},
                         {"lambda_float", c.penalty.value.to_double()},
                         {"lambda_kind", to_string(c.penalty.kind)},
                         {"score", c.score},
                         {"acceptance_rate", c.acceptance_rate},
                         {"scores_by_H0", std::move(by_h0)}});
    }
    return {{"n", report.n},
            {"candidates", std::move(cands)},
            {"selected_H", report.selected_H},
            {"scoring_rule",
             "minimal instantiation: -(best sampled log-likelihood) + "
             "NMF upper bound at working H0 = min(H, M, N) times log n"}};
}

std::string sbic_summary_csv(const SbicReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "H,score\n";
    for (const auto& c : report.candidates)
        os << c.H << ',' << c.score << '\n';
    return os.str();
}

} // namespace rlct_nmf
