#pragma once

// Comparison table of NMF and reduced-rank-regression learning
// coefficients, transcribed cell by cell. Columns are M = N = 2, 3, 4, 5.

#include <array>
#include <string>
#include <vector>

namespace rlct_nmf::testing {

struct ExpectedRow {
    const char* block;
    const char* model; // "nmf" or "rrr"
    int r;             // -1 for NMF rows
    std::array<const char*, 4> cells;
};

inline const std::vector<int> kTableSizes{2, 3, 4, 5};

inline const std::vector<ExpectedRow> kComparisonTable{
    {"H=M,H0=0", "nmf", -1, {"2", "9/2", "8", "25/2"}},
    {"H=M,H0=0", "rrr", 0, {"3/2", "7/2", "6", "19/2"}},
    {"H=H0=1", "nmf", -1, {"3/2", "5/2", "7/2", "9/2"}},
    {"H=H0=1", "rrr", 1, {"3/2", "5/2", "7/2", "9/2"}},
    {"H=H0=2", "nmf", -1, {"3", "5", "7", "9"}},
    {"H=H0=2", "rrr", 2, {"2", "4", "6", "8"}},
    {"H=H0=3", "nmf", -1, {"-", "15/2", "21/2", "27/2"}},
    {"H=H0=3", "rrr", 3, {"-", "9/2", "15/2", "21/2"}},
    {"H=H0=4", "nmf", -1, {"-", "-", "14", "18"}},
    {"H=H0=4", "rrr", 3, {"-", "(9/2)", "8", "23/2"}},
    {"H=H0=4", "rrr", 4, {"-", "-", "8", "12"}},
    {"H=H0=5", "nmf", -1, {"-", "-", "-", "45/2"}},
    {"H=H0=5", "rrr", 3, {"-", "(9/2)", "(8)", "12"}},
    {"H=H0=5", "rrr", 4, {"-", "-", "(8)", "25/2"}},
    {"H=H0=5", "rrr", 5, {"-", "-", "-", "25/2"}},
};

} // namespace rlct_nmf::testing
