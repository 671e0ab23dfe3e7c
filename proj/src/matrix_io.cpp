#include "rlct_nmf/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "rlct_nmf/error.hpp"

namespace rlct_nmf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, std::size_t line,
                  const CsvOptions& options) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec == std::errc::invalid_argument ||
        ptr != cell.data() + cell.size())
        throw ParseError(ParseError::Kind::NonNumeric, line,
                         "row " + std::to_string(line) + ": non-numeric "
                         "cell '" + std::string(cell) + "'");
    if (ec == std::errc::result_out_of_range || !std::isfinite(v))
        throw ParseError(ParseError::Kind::NonFinite, line,
                         "row " + std::to_string(line) + ": non-finite "
                         "value '" + std::string(cell) + "'");
    if (v < 0 && !options.allow_negative)
        throw ParseError(ParseError::Kind::Negative, line,
                         "row " + std::to_string(line) + ": negative "
                         "entry " + std::string(cell));
    return v;
}

} // namespace

NonnegMatrix parse_matrix_csv(const std::string& text,
                              const CsvOptions& options) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (options.header && line == 1)
            continue;
        const std::string_view view = trim(raw);
        if (view.empty())
            continue;
        std::vector<double> row;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t comma = view.find(',', pos);
            row.push_back(parse_cell(view.substr(pos, comma - pos), line,
                                     options));
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(ParseError::Kind::Ragged, line,
                             "row " + std::to_string(line) + ": expected " +
                                 std::to_string(rows.front().size()) +
                                 " columns, found " +
                                 std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(ParseError::Kind::Empty, 0, "empty matrix file");

    NonnegMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

NonnegMatrix load_matrix_csv(const std::filesystem::path& path,
                             const CsvOptions& options) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseError::Kind::Io, 0,
                         "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_csv(buf.str(), options);
}

void write_matrix_csv(std::ostream& os, const NonnegMatrix& m) {
    const auto prec = os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                os << ',';
            os << m(i, j);
        }
        os << '\n';
    }
    os.precision(prec);
}

void write_matrix_csv(const std::filesystem::path& path,
                      const NonnegMatrix& m) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_matrix_csv(out, m);
}

nlohmann::json matrix_to_json(const NonnegMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

NonnegMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ValidationError("matrix JSON must be a non-empty array of rows");
    NonnegMatrix m(j.size(), j.front().size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != j.front().size())
            throw ValidationError("matrix JSON row " + std::to_string(i + 1) +
                                  " is ragged");
        for (std::size_t k = 0; k < j[i].size(); ++k)
            m(i, k) = j[i][k].get<double>();
    }
    return m;
}

void write_report_json(const std::filesystem::path& path,
                       const nlohmann::json& report) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << report.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseError::Kind::Io, 0,
                         "cannot open " + path.string());
    return nlohmann::json::parse(in);
}

void write_dataset(const std::filesystem::path& dir, const Dataset& data) {
    std::filesystem::create_directories(dir);
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        std::ostringstream name;
        name << "obs_" << std::setw(4) << std::setfill('0') << (i + 1)
             << ".csv";
        write_matrix_csv(dir / name.str(), data.observations[i]);
        files.push_back(name.str());
    }
    nlohmann::json manifest{{"family", to_string(data.family)},
                            {"n", data.size()},
                            {"shape", {data.M, data.N}},
                            {"files", std::move(files)}};
    manifest["seed"] = data.seed ? nlohmann::json(*data.seed)
                                 : nlohmann::json(nullptr);
    if (data.truth) {
        nlohmann::json t{{"H0", data.truth->H0}};
        if (data.truth->A) {
            t["A"] = matrix_to_json(*data.truth->A);
            t["B"] = matrix_to_json(*data.truth->B);
        }
        manifest["truth"] = std::move(t);
    } else {
        manifest["truth"] = nullptr;
    }
    write_report_json(dir / "manifest.json", manifest);
}

Dataset read_dataset(const std::filesystem::path& manifest_path) {
    const nlohmann::json m = read_json(manifest_path);
    Dataset data;
    data.family = parse_family(m.at("family").get<std::string>());
    data.M = m.at("shape").at(0).get<int>();
    data.N = m.at("shape").at(1).get<int>();
    if (m.contains("seed") && !m["seed"].is_null())
        data.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("truth") && !m["truth"].is_null()) {
        TrueStructure t;
        t.H0 = m["truth"].at("H0").get<int>();
        if (m["truth"].contains("A")) {
            t.A = matrix_from_json(m["truth"]["A"]);
            t.B = matrix_from_json(m["truth"]["B"]);
        }
        data.truth = std::move(t);
    }
    const CsvOptions opts{false, data.family == Family::Gaussian};
    const auto dir = manifest_path.parent_path();
    for (const auto& f : m.at("files"))
        data.observations.push_back(
            load_matrix_csv(dir / f.get<std::string>(), opts));
    if (m.contains("n") && m["n"].get<std::size_t>() != data.size())
        throw ValidationError("manifest n does not match the file list");
    data.validate();
    return data;
}

} // namespace rlct_nmf
