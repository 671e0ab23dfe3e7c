#include "doctest.h"

#include <algorithm>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/rlct_core.hpp"
#include "comparison_table_expected.hpp"

using namespace rlct_nmf;

namespace {

RlctValue bound(int M, int N, int H, int H0) {
    return nmf_rlct_bound({M, N, H}, TrueStructure::of_rank(H0));
}

RlctValue rrr(int M, int N, int H, int r) { return rrr_rlct({M, N, H}, {r}); }

} // namespace

TEST_CASE("nmf bound: tabulated values and exactness tags") {
    auto v = bound(2, 2, 2, 0);
    CHECK(v.value == Rational(2));
    CHECK(v.kind == RlctKind::Exact);
    CHECK(v.source == RlctSource::Lemma1);

    v = bound(3, 3, 1, 1);
    CHECK(v.value == Rational(5, 2));
    CHECK(v.kind == RlctKind::Exact);
    CHECK(v.source == RlctSource::Lemma2);

    v = bound(4, 4, 4, 4);
    CHECK(v.value == Rational(14));
    CHECK(v.kind == RlctKind::UpperBound);
    CHECK(v.source == RlctSource::MainTheorem);

    v = bound(5, 5, 5, 5);
    CHECK(v.value == Rational(45, 2));
    CHECK(v.kind == RlctKind::UpperBound);
}

TEST_CASE("nmf bound: infeasible truth is a validation error") {
    CHECK_THROWS_AS(bound(2, 2, 1, 3), ValidationError); // H0 > H
    CHECK_THROWS_AS(bound(3, 3, 4, 4), ValidationError); // H0 > min(M,N)
    CHECK_THROWS_AS(bound(0, 2, 1, 0), ValidationError);
    CHECK_THROWS_AS(bound(2, 2, -1, 0), ValidationError);
}

TEST_CASE("nmf bound: H = 0 is zero and flagged") {
    const auto v = bound(3, 4, 0, 0);
    CHECK(v.value == Rational(0));
    CHECK(v.degenerate);
    CHECK_FALSE(bound(3, 4, 1, 0).degenerate);
}

TEST_CASE("nmf bound: truth factors are checked when present") {
    TrueStructure t = TrueStructure::of_rank(1);
    t.A = NonnegMatrix::Ones(2, 1);
    t.B = NonnegMatrix::Ones(1, 2);
    CHECK(nmf_rlct_bound({2, 2, 1}, t).value == Rational(3, 2));

    t.B = NonnegMatrix::Ones(1, 3);
    CHECK_THROWS_AS(nmf_rlct_bound({2, 2, 1}, t), ValidationError);

    t.B = NonnegMatrix::Zero(1, 2);
    CHECK_THROWS_AS(nmf_rlct_bound({2, 2, 1}, t), ValidationError);
}

TEST_CASE("exact value under a nonnegative residual") {
    auto v = nmf_rlct_exact_nonneg_residual({2, 2, 2}, TrueStructure::of_rank(2));
    CHECK(v.value == Rational(3));
    CHECK(v.kind == RlctKind::Exact);
    CHECK(v.source == RlctSource::Remark);

    CHECK(nmf_rlct_exact_nonneg_residual({2, 2, 1}, TrueStructure::of_rank(0))
              .value == Rational(1));
    // (1/2)[(2-1)*2 + 1*(3+2-1)] = 3, worked by hand.
    CHECK(nmf_rlct_exact_nonneg_residual({3, 2, 2}, TrueStructure::of_rank(1))
              .value == Rational(3));
    CHECK_THROWS_AS(
        nmf_rlct_exact_nonneg_residual({2, 2, 1}, TrueStructure::of_rank(2)),
        ValidationError);
}

TEST_CASE("reduced rank regression: tabulated values") {
    CHECK(rrr(2, 2, 2, 0).value == Rational(3, 2));
    CHECK(rrr(4, 4, 4, 3).value == Rational(8));
    const auto v = rrr(4, 4, 5, 3);
    CHECK(v.value == Rational(8));
    // M + N == H + r: the parity formula applies and agrees with MN / 2.
    CHECK(v.source == RlctSource::AoyagiCase1);
    const auto wide = rrr(4, 4, 6, 3);
    CHECK(wide.value == Rational(8));
    CHECK(wide.source == RlctSource::AoyagiCase5);
    CHECK(rrr(5, 5, 5, 5).value == Rational(25, 2));
}

TEST_CASE("reduced rank regression: parity selects the first two cases") {
    // M+H+N+r = 6 even, 7 odd.
    CHECK(rrr(2, 2, 2, 0).source == RlctSource::AoyagiCase1);
    const auto odd = rrr(2, 2, 2, 1);
    CHECK(odd.source == RlctSource::AoyagiCase2);
    // (2*3*4 - 0 - 9 + 1) / 8 = 2
    CHECK(odd.value == Rational(2));
}

TEST_CASE("reduced rank regression: the asymmetric cases") {
    // M + H < N + r: (HM - Hr + Nr)/2
    const auto c3 = rrr(1, 5, 1, 1);
    CHECK(c3.source == RlctSource::AoyagiCase3);
    CHECK(c3.value == Rational(1 * 1 - 1 * 1 + 5 * 1, 2));
    const auto c4 = rrr(5, 1, 1, 0);
    CHECK(c4.source == RlctSource::AoyagiCase4);
    CHECK(c4.value == Rational(1, 2));
    CHECK_THROWS_AS(rrr(2, 2, 1, 2), ValidationError);
}

TEST_CASE("reduced rank regression: exactly one case over the grid") {
    int checked = 0;
    for (int M = 1; M <= 8; ++M)
        for (int N = 1; N <= 8; ++N)
            for (int H = 0; H <= 8; ++H)
                for (int r = 0; r <= std::min({M, N, H}); ++r) {
                    CHECK(rrr_matching_cases({M, N, H}, r).size() == 1);
                    CHECK_NOTHROW(rrr(M, N, H, r));
                    ++checked;
                }
    CHECK(checked > 1000);
}

TEST_CASE("regular half dimension") {
    CHECK(regular_half_dim({2, 2, 1}).value == Rational(2));
    CHECK(regular_half_dim({3, 4, 2}).value == Rational(7));
    CHECK(regular_half_dim({5, 5, 5}).value == Rational(25));
    CHECK(regular_half_dim({5, 5, 5}).source == RlctSource::RegularDim);
}

TEST_CASE("rank feasibility") {
    CHECK(rank_feasibility(4, 4, 3, 4) == RankFeasibility::Feasible);
    CHECK(rank_feasibility(3, 3, 3, 4) == RankFeasibility::Infeasible);
    CHECK(rank_feasibility(3, 5, 2, 3) == RankFeasibility::ForcedEqual);
    CHECK(rank_feasibility(5, 5, 4, 3) == RankFeasibility::Infeasible);
    CHECK(rank_feasibility(2, 2, 2, 2) == RankFeasibility::Feasible);
    CHECK_THROWS_AS(rank_feasibility(2, 2, -1, 0), ValidationError);
}

TEST_CASE("grid invariants of the closed forms") {
    for (int M = 1; M <= 8; ++M)
        for (int N = 1; N <= 8; ++N)
            for (int H = 1; H <= 8; ++H)
                for (int H0 = 0; H0 <= std::min({M, N, H}); ++H0) {
                    const auto b = bound(M, N, H, H0).value;
                    CAPTURE(M);
                    CAPTURE(N);
                    CAPTURE(H);
                    CAPTURE(H0);
                    // RRR at matched rank never exceeds the NMF bound.
                    CHECK(rrr(M, N, H, H0).value <= b);
                    // Strictly below the regular value.
                    CHECK(b < regular_half_dim({M, N, H}).value);
                    // Each extra inner dimension adds min(M,N)/2.
                    if (H < 8)
                        CHECK(bound(M, N, H + 1, H0).value - b ==
                              Rational(std::min(M, N), 2));
                    if (H0 == 0)
                        CHECK(b == Rational(H * std::min(M, N), 2));
                    // All denominators divide 8.
                    CHECK(8 % b.den() == 0);
                    CHECK(8 % rrr(M, N, H, H0).value.den() == 0);
                }
    for (int M = 1; M <= 12; ++M)
        for (int N = 1; N <= 12; ++N) {
            const Rational expect(M + N - 1, 2);
            CHECK(bound(M, N, 1, 1).value == expect);
            CHECK(rrr(M, N, 1, 1).value == expect);
        }
}

TEST_CASE("comparison table reproduces every cell") {
    const auto table = comparison_table(testing::kTableSizes);
    REQUIRE(table.rows.size() == testing::kComparisonTable.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto& want = testing::kComparisonTable[i];
        CAPTURE(i);
        CHECK(row.block == want.block);
        CHECK((row.model == TableModel::Nmf ? "nmf" : "rrr") ==
              std::string(want.model));
        if (want.r >= 0)
            CHECK(row.r == want.r);
        REQUIRE(row.cells.size() == 4);
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(row.cells[j].text() == want.cells[j]);
    }
}

TEST_CASE("comparison table examples") {
    const auto table = comparison_table({2, 3, 4, 5});
    // M = N = 2 column read top to bottom through the first three blocks.
    std::vector<std::string> col;
    for (std::size_t i = 0; i < 6; ++i)
        col.push_back(table.rows[i].cells[0].text());
    CHECK(col == std::vector<std::string>{"2", "3/2", "3/2", "3/2", "3", "2"});

    const auto& nmf4 = table.rows[8];
    CHECK(nmf4.block == "H=H0=4");
    CHECK(nmf4.cells[1].marker == TableCell::Marker::Unavailable);
    const auto& rrr4 = table.rows[9];
    CHECK(rrr4.cells[1].marker == TableCell::Marker::NotALowerBound);
    CHECK(rrr4.cells[1].value == Rational(9, 2));
}

TEST_CASE("comparison table serialisation") {
    const auto table = comparison_table({2, 3});
    const std::string csv = table_to_csv(table);
    CHECK(csv.rfind("block,model,H0,r,M=N=2,M=N=3\n", 0) == 0);
    CHECK(csv.find("\"H=M,H0=0\",NMF (exact value),0,,2,9/2\n") !=
          std::string::npos);

    const auto json = table_to_json(table);
    CHECK(json["sizes"] == nlohmann::json({2, 3}));
    const auto& cell = json["rows"][1]["cells"][0];
    CHECK(cell["value"] == "3/2");
    CHECK(cell["value_float"].get<double>() == doctest::Approx(1.5));
    CHECK(json["rows"][0]["H"] == "M");
}
