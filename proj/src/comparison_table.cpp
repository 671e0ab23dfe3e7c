#include "rlct_nmf/rlct_core.hpp"

#include <algorithm>
#include <sstream>

namespace rlct_nmf {

std::string TableCell::text() const {
    switch (marker) {
    case Marker::Value:
        return value->str();
    case Marker::NotALowerBound:
        return "(" + value->str() + ")";
    case Marker::Unavailable:
        break;
    }
    return "-";
}

namespace {

TableCell value_cell(Rational v) {
    return {TableCell::Marker::Value, v};
}

TableCell nmf_cell(int size, int H, int H0) {
    if (H0 > size)
        return {};
    return value_cell(nmf_rlct_bound({size, size, H}, TrueStructure::of_rank(H0)).value);
}

TableCell rrr_cell(int size, int H, int H0, int r) {
    if (r > size || r > H)
        return {};
    const Rational v = rrr_rlct({size, size, H}, {r}).value;
    if (rank_feasibility(size, size, r, H0) != RankFeasibility::Feasible)
        return {TableCell::Marker::NotALowerBound, v};
    return value_cell(v);
}

} // namespace

ComparisonTable comparison_table(const std::vector<int>& sizes, int max_h) {
    for (int s : sizes)
        if (s < 1)
            throw ValidationError("comparison table: sizes must be >= 1");

    ComparisonTable table;
    table.sizes = sizes;

    {
        TableRow nmf{TableModel::Nmf, "H=M,H0=0", 0, std::nullopt,
                     std::nullopt, RlctKind::Exact, {}};
        TableRow rrr{TableModel::Rrr, "H=M,H0=0", 0, std::nullopt, 0,
                     RlctKind::Exact, {}};
        for (int s : sizes) {
            nmf.cells.push_back(nmf_cell(s, s, 0));
            rrr.cells.push_back(rrr_cell(s, s, 0, 0));
        }
        table.rows.push_back(std::move(nmf));
        table.rows.push_back(std::move(rrr));
    }

    for (int k = 1; k <= max_h; ++k) {
        const std::string block = "H=H0=" + std::to_string(k);
        TableRow nmf{TableModel::Nmf, block, k, k, std::nullopt,
                     k == 1 ? RlctKind::Exact : RlctKind::UpperBound, {}};
        for (int s : sizes)
            nmf.cells.push_back(nmf_cell(s, k, k));
        table.rows.push_back(std::move(nmf));

        // Below rank 3 the rank and nonnegative rank coincide, so only
        // r >= 3 can differ from H0.
        for (int r = std::min(k, 3); r <= k; ++r) {
            TableRow rrr{TableModel::Rrr, block, k, k, r, RlctKind::Exact, {}};
            for (int s : sizes)
                rrr.cells.push_back(rrr_cell(s, k, k, r));
            table.rows.push_back(std::move(rrr));
        }
    }
    return table;
}

namespace {

std::string model_label(const TableRow& row) {
    if (row.model == TableModel::Rrr)
        return "reduced rank regression";
    return row.kind == RlctKind::Exact ? "NMF (exact value)" : "NMF (bound)";
}

} // namespace

std::string table_to_csv(const ComparisonTable& table) {
    std::ostringstream os;
    os << "block,model,H0,r";
    for (int s : table.sizes)
        os << ",M=N=" << s;
    os << '\n';
    for (const auto& row : table.rows) {
        os << '"' << row.block << "\"," << model_label(row) << ',' << row.H0
           << ',';
        if (row.r)
            os << *row.r;
        for (const auto& cell : row.cells)
            os << ',' << cell.text();
        os << '\n';
    }
    return os.str();
}

nlohmann::json table_to_json(const ComparisonTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            const auto& cell = row.cells[i];
            nlohmann::json c{{"M", table.sizes[i]},
                             {"N", table.sizes[i]},
                             {"text", cell.text()}};
            switch (cell.marker) {
            case TableCell::Marker::Value:
                c["marker"] = "value";
                break;
            case TableCell::Marker::NotALowerBound:
                c["marker"] = "not-a-lower-bound";
                break;
            case TableCell::Marker::Unavailable:
                c["marker"] = "unavailable";
                break;
            }
            if (cell.value) {
                c["value"] = cell.value->str();
                c["value_float"] = cell.value->to_double();
            } else {
                c["value"] = nullptr;
                c["value_float"] = nullptr;
            }
            cells.push_back(std::move(c));
        }
        nlohmann::json j{{"block", row.block},
                         {"model", row.model == TableModel::Nmf ? "nmf"
                                                                 : "rrr"},
                         {"label", model_label(row)},
                         {"kind", to_string(row.kind)},
                         {"H0", row.H0},
                         {"cells", std::move(cells)}};
        j["H"] = row.H ? nlohmann::json(*row.H) : nlohmann::json("M");
        j["r"] = row.r ? nlohmann::json(*row.r) : nlohmann::json(nullptr);
        rows.push_back(std::move(j));
    }
    return {{"sizes", table.sizes}, {"rows", std::move(rows)}};
}

} // namespace rlct_nmf
