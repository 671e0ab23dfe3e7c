#pragma once

#include <stdexcept>
#include <string>

namespace rlct_nmf {

/// Raised when inputs violate an operation's preconditions.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a Monte Carlo estimator cannot produce a result from the data
/// it was given (e.g. no threshold collected any hits).
class EstimationError : public std::runtime_error {
  public:
    EstimationError(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

  private:
    std::string diagnostics_;
};

/// Malformed matrix file. `row` is 1-based, 0 when not tied to a row.
class ParseError : public std::runtime_error {
  public:
    enum class Kind { Ragged, Negative, NonNumeric, NonFinite, Empty, Io };

    ParseError(Kind kind, std::size_t row, const std::string& what)
        : std::runtime_error(what), kind_(kind), row_(row) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t row() const noexcept { return row_; }

  private:
    Kind kind_;
    std::size_t row_;
};

} // namespace rlct_nmf
