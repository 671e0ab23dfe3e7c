#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "rlct_nmf/bayes_nmf.hpp"

namespace rlct_nmf {

struct CsvOptions {
    bool header = false;         // skip the first line
    bool allow_negative = false; // Gaussian observations may be negative
};

/// Parses a rectangular, comma-separated matrix. Errors distinguish ragged
/// rows, negative entries, non-numeric cells and non-finite values, and name
/// the 1-based line they occur on.
NonnegMatrix parse_matrix_csv(const std::string& text,
                              const CsvOptions& options = {});
NonnegMatrix load_matrix_csv(const std::filesystem::path& path,
                             const CsvOptions& options = {});

/// Row-major, 17 significant digits, so values round-trip exactly.
void write_matrix_csv(std::ostream& os, const NonnegMatrix& m);
void write_matrix_csv(const std::filesystem::path& path,
                      const NonnegMatrix& m);

nlohmann::json matrix_to_json(const NonnegMatrix& m);
NonnegMatrix matrix_from_json(const nlohmann::json& j);

/// Pretty-printed JSON file; doubles are written with round-trip precision.
void write_report_json(const std::filesystem::path& path,
                       const nlohmann::json& report);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes obs_0001.csv ... and manifest.json (family, n, shape, seed, truth)
/// into `dir`.
void write_dataset(const std::filesystem::path& dir, const Dataset& data);
/// Reads a dataset from its manifest path.
Dataset read_dataset(const std::filesystem::path& manifest);

} // namespace rlct_nmf
