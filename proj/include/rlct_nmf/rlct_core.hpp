#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rlct_nmf/matrix.hpp"
#include "rlct_nmf/rational.hpp"

namespace rlct_nmf {

/// Model size: W is M x N, the factors are M x H and H x N.
struct ModelDims {
    int M = 1;
    int N = 1;
    int H = 0;

    /// Throws ValidationError unless M >= 1, N >= 1, H >= 0.
    void validate() const;
};

/// Ground truth of an NMF experiment. H0 is the nonnegative rank of AB; the
/// factors are optional because the closed forms only need H0.
struct TrueStructure {
    int H0 = 0;
    std::optional<NonnegMatrix> A; // M x H0, strictly positive
    std::optional<NonnegMatrix> B; // H0 x N, strictly positive

    /// Truth known only through its nonnegative rank.
    static TrueStructure of_rank(int h0) { return {h0, std::nullopt, std::nullopt}; }

    /// AB, or the M x N zero matrix when H0 = 0.
    NonnegMatrix product(int M, int N) const;

    /// Checks H0 <= H, H0 <= min(M,N) and, when present, the shapes and
    /// strict positivity of A and B.
    void validate(const ModelDims& dims) const;
};

enum class RlctKind { Exact, UpperBound };

enum class RlctSource {
    MainTheorem,
    Lemma1,
    Lemma2,
    Remark,
    AoyagiCase1,
    AoyagiCase2,
    AoyagiCase3,
    AoyagiCase4,
    AoyagiCase5,
    RegularDim,
};

std::string_view to_string(RlctKind kind);
std::string_view to_string(RlctSource source);

struct RlctValue {
    Rational value;
    RlctKind kind = RlctKind::Exact;
    RlctSource source = RlctSource::MainTheorem;
    /// Set when H = 0: the formulas extend to zero, which is reported rather
    /// than rejected.
    bool degenerate = false;
};

/// Rank of the true parameter for reduced rank regression.
struct RrrTruth {
    int r = 0;
};

/// Upper bound on the NMF learning coefficient,
///   (1/2)[(H - H0) min(M,N) + H0 (M + N - 1)].
/// Exact when H0 = 0 or H = H0 = 1.
RlctValue nmf_rlct_bound(const ModelDims& dims, const TrueStructure& truth);

/// Same value as nmf_rlct_bound, tagged exact. Valid only when every
/// coefficient of the residual polynomial is nonnegative; that hypothesis is
/// asserted by the caller and cannot be checked from dimensions.
RlctValue nmf_rlct_exact_nonneg_residual(const ModelDims& dims,
                                         const TrueStructure& truth);

/// Learning coefficient of reduced rank regression with true rank r
/// (five-case closed form). Requires r <= min(M, N, H).
RlctValue rrr_rlct(const ModelDims& dims, RrrTruth truth);

/// Every case guard of the reduced rank regression formula that holds for
/// (dims, r). Exactly one holds whenever r <= min(M, N, H).
std::vector<RlctSource> rrr_matching_cases(const ModelDims& dims, int r);

/// d/2 with d = H(M+N), the value for a regular model of the same size.
RlctValue regular_half_dim(const ModelDims& dims);

enum class RankFeasibility { Feasible, Infeasible, ForcedEqual };

std::string_view to_string(RankFeasibility f);

/// Whether an M x N nonnegative matrix can have the given rank and
/// nonnegative rank, according to rank <= rank+ <= min(M,N) and the
/// equality rank = rank+ when M <= 3 or N <= 3.
RankFeasibility rank_feasibility(int M, int N, int rank, int nonneg_rank);

// ---------------------------------------------------------------------------
// Comparison table

enum class TableModel { Nmf, Rrr };

struct TableCell {
    enum class Marker { Value, Unavailable, NotALowerBound };

    Marker marker = Marker::Unavailable;
    std::optional<Rational> value;

    /// "3/2", "-" or "(9/2)".
    std::string text() const;
};

struct TableRow {
    TableModel model = TableModel::Nmf;
    /// "H=M,H0=0" or "H=H0=k". For the first block H equals M per column.
    std::string block;
    int H0 = 0;
    std::optional<int> H; // unset for the H=M block
    std::optional<int> r; // RRR rows only
    RlctKind kind = RlctKind::Exact;
    std::vector<TableCell> cells; // one per matrix size
};

struct ComparisonTable {
    std::vector<int> sizes; // M = N values, one column each
    std::vector<TableRow> rows;
};

/// NMF-vs-RRR comparison for square M = N matrices. Blocks are H = M with
/// H0 = 0, then H = H0 = k for k = 1..max_h; each NMF row is followed by RRR
/// rows for r = min(k,3)..k.
ComparisonTable comparison_table(const std::vector<int>& sizes,
                                 int max_h = 5);

std::string table_to_csv(const ComparisonTable& table);
nlohmann::json table_to_json(const ComparisonTable& table);

} // namespace rlct_nmf
