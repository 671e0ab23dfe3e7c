#include "rlct_nmf/rlct_core.hpp"

#include <algorithm>
#include <stdexcept>

#include "rlct_nmf/error.hpp"

namespace rlct_nmf {

namespace {

std::string dims_str(const ModelDims& d) {
    return "(M=" + std::to_string(d.M) + ", N=" + std::to_string(d.N) +
           ", H=" + std::to_string(d.H) + ")";
}

// Dimensions beyond this would not overflow the checked arithmetic, but no
// formula in scope is meaningful there and it keeps products in range.
constexpr int kMaxDim = 1'000'000;

} // namespace

void ModelDims::validate() const {
    if (M < 1 || N < 1 || H < 0)
        throw ValidationError("invalid model dims " + dims_str(*this) +
                              ": need M >= 1, N >= 1, H >= 0");
    if (M > kMaxDim || N > kMaxDim || H > kMaxDim)
        throw ValidationError("model dims " + dims_str(*this) + " too large");
}

NonnegMatrix TrueStructure::product(int M, int N) const {
    if (H0 == 0)
        return NonnegMatrix::Zero(M, N);
    if (!A || !B)
        throw ValidationError("truth with H0 = " + std::to_string(H0) +
                              " needs factors A and B");
    return (*A) * (*B);
}

void TrueStructure::validate(const ModelDims& dims) const {
    dims.validate();
    if (H0 < 0)
        throw ValidationError("H0 must be nonnegative");
    if (H0 > dims.H)
        throw ValidationError("infeasible truth: H0 = " + std::to_string(H0) +
                              " exceeds H = " + std::to_string(dims.H));
    if (H0 > std::min(dims.M, dims.N))
        throw ValidationError("infeasible truth: H0 = " + std::to_string(H0) +
                              " exceeds min(M, N) = " +
                              std::to_string(std::min(dims.M, dims.N)));
    if (A.has_value() != B.has_value())
        throw ValidationError("truth factors must be given together");
    if (!A)
        return;
    if (A->rows() != dims.M || A->cols() != H0)
        throw ValidationError("truth A must be M x H0");
    if (B->rows() != H0 || B->cols() != dims.N)
        throw ValidationError("truth B must be H0 x N");
    if (!all_positive(*A) || !all_positive(*B))
        throw ValidationError("truth factors must be strictly positive");
    if (!A->allFinite() || !B->allFinite())
        throw ValidationError("truth factors must be finite");
}

std::string_view to_string(RlctKind kind) {
    switch (kind) {
    case RlctKind::Exact:
        return "exact";
    case RlctKind::UpperBound:
        return "upper bound";
    }
    return "?";
}

std::string_view to_string(RlctSource source) {
    switch (source) {
    case RlctSource::MainTheorem:
        return "MainTheorem";
    case RlctSource::Lemma1:
        return "Lemma1";
    case RlctSource::Lemma2:
        return "Lemma2";
    case RlctSource::Remark:
        return "Remark";
    case RlctSource::AoyagiCase1:
        return "AoyagiCase1";
    case RlctSource::AoyagiCase2:
        return "AoyagiCase2";
    case RlctSource::AoyagiCase3:
        return "AoyagiCase3";
    case RlctSource::AoyagiCase4:
        return "AoyagiCase4";
    case RlctSource::AoyagiCase5:
        return "AoyagiCase5";
    case RlctSource::RegularDim:
        return "RegularDim";
    }
    return "?";
}

std::string_view to_string(RankFeasibility f) {
    switch (f) {
    case RankFeasibility::Feasible:
        return "feasible";
    case RankFeasibility::Infeasible:
        return "infeasible";
    case RankFeasibility::ForcedEqual:
        return "forced-equal";
    }
    return "?";
}

RlctValue nmf_rlct_bound(const ModelDims& dims, const TrueStructure& truth) {
    truth.validate(dims);
    const std::int64_t M = dims.M, N = dims.N, H = dims.H, H0 = truth.H0;

    const std::int64_t twice =
        checked::add(checked::mul(H - H0, std::min(M, N)),
                     checked::mul(H0, M + N - 1));

    RlctValue out;
    out.value = Rational(twice, 2);
    out.degenerate = (H == 0);
    if (H0 == 0) {
        out.kind = RlctKind::Exact;
        out.source = RlctSource::Lemma1;
    } else if (H == 1 && H0 == 1) {
        out.kind = RlctKind::Exact;
        out.source = RlctSource::Lemma2;
    } else {
        out.kind = RlctKind::UpperBound;
        out.source = RlctSource::MainTheorem;
    }
    return out;
}

RlctValue nmf_rlct_exact_nonneg_residual(const ModelDims& dims,
                                         const TrueStructure& truth) {
    RlctValue out = nmf_rlct_bound(dims, truth);
    out.kind = RlctKind::Exact;
    out.source = RlctSource::Remark;
    return out;
}

std::vector<RlctSource> rrr_matching_cases(const ModelDims& dims, int r) {
    const std::int64_t M = dims.M, N = dims.N, H = dims.H;
    std::vector<RlctSource> hits;
    if (N + r <= M + H && M + r <= N + H && H + r <= M + N)
        hits.push_back((M + H + N + r) % 2 == 0 ? RlctSource::AoyagiCase1
                                                : RlctSource::AoyagiCase2);
    if (M + H < N + r)
        hits.push_back(RlctSource::AoyagiCase3);
    if (N + H < M + r)
        hits.push_back(RlctSource::AoyagiCase4);
    if (M + N < H + r)
        hits.push_back(RlctSource::AoyagiCase5);
    return hits;
}

RlctValue rrr_rlct(const ModelDims& dims, RrrTruth truth) {
    dims.validate();
    const std::int64_t M = dims.M, N = dims.N, H = dims.H, r = truth.r;
    if (r < 0 || r > std::min({M, N, H}))
        throw ValidationError("rrr: rank r = " + std::to_string(r) +
                              " must lie in [0, min(M, N, H)] for " +
                              dims_str(dims));

    const auto cases = rrr_matching_cases(dims, truth.r);
    if (cases.size() != 1)
        throw std::logic_error("rrr: " + std::to_string(cases.size()) +
                               " cases apply for " + dims_str(dims) +
                               ", r = " + std::to_string(r));

    RlctValue out;
    out.kind = RlctKind::Exact;
    out.source = cases.front();
    out.degenerate = (H == 0);

    const std::int64_t hr = H + r;
    switch (out.source) {
    case RlctSource::AoyagiCase1:
    case RlctSource::AoyagiCase2: {
        std::int64_t v = checked::mul(2 * hr, M + N);
        v = checked::sub(v, checked::mul(M - N, M - N));
        v = checked::sub(v, checked::mul(hr, hr));
        if (out.source == RlctSource::AoyagiCase2)
            v = checked::add(v, 1);
        out.value = Rational(v, 8);
        break;
    }
    case RlctSource::AoyagiCase3:
        out.value = Rational(checked::add(checked::mul(H, M - r),
                                          checked::mul(N, r)),
                             2);
        break;
    case RlctSource::AoyagiCase4:
        out.value = Rational(checked::add(checked::mul(H, N - r),
                                          checked::mul(M, r)),
                             2);
        break;
    case RlctSource::AoyagiCase5:
        out.value = Rational(checked::mul(M, N), 2);
        break;
    default:
        throw std::logic_error("rrr: unexpected case");
    }
    return out;
}

RlctValue regular_half_dim(const ModelDims& dims) {
    dims.validate();
    RlctValue out;
    out.value = Rational(
        checked::mul(dims.H, static_cast<std::int64_t>(dims.M) + dims.N), 2);
    out.kind = RlctKind::Exact;
    out.source = RlctSource::RegularDim;
    out.degenerate = (dims.H == 0);
    return out;
}

RankFeasibility rank_feasibility(int M, int N, int rank, int nonneg_rank) {
    if (rank < 0 || nonneg_rank < 0)
        throw ValidationError("ranks must be nonnegative");
    if (rank > nonneg_rank || nonneg_rank > std::min(M, N))
        return RankFeasibility::Infeasible;
    if ((M <= 3 || N <= 3) && rank != nonneg_rank)
        return RankFeasibility::ForcedEqual;
    return RankFeasibility::Feasible;
}

} // namespace rlct_nmf
