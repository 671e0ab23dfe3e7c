#include "doctest.h"

#include <filesystem>
#include <random>
#include <sstream>

#include "rlct_nmf/error.hpp"
#include "rlct_nmf/matrix_io.hpp"

using namespace rlct_nmf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("rlct_nmf_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

template <class F>
std::string error_of(F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parse a plain matrix") {
    const auto m = parse_matrix_csv("1,2\n3,4");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    CHECK(m(0, 0) == 1);
    CHECK(m(0, 1) == 2);
    CHECK(m(1, 0) == 3);
    CHECK(m(1, 1) == 4);
    const auto h = parse_matrix_csv("a,b\n1.5, 2e-3\n", {.header = true});
    CHECK(h.rows() == 1);
    CHECK(h(0, 1) == 2e-3);
}

TEST_CASE("parse errors name the line") {
    CHECK_THROWS_AS(parse_matrix_csv("1,2\n3"), ParseError);
    CHECK(error_of([] { parse_matrix_csv("1,2\n3"); }).find("row 2") !=
          std::string::npos);
    try {
        parse_matrix_csv("1,2\n3");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Ragged);
        CHECK(e.row() == 2);
    }
    try {
        parse_matrix_csv("-1");
        FAIL("negative accepted");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Negative);
    }
    CHECK(parse_matrix_csv("-1", {.allow_negative = true})(0, 0) == -1);
    try {
        parse_matrix_csv("1,x");
        FAIL("non-numeric accepted");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::NonNumeric);
    }
    try {
        parse_matrix_csv("1,inf");
        FAIL("inf accepted");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::NonFinite);
    }
    try {
        parse_matrix_csv("");
        FAIL("empty accepted");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Empty);
    }
    CHECK_THROWS_AS(load_matrix_csv("/nonexistent/matrix.csv"), ParseError);
}

TEST_CASE("17-digit round trip is exact (property)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1e3);
    for (int trial = 0; trial < 50; ++trial) {
        NonnegMatrix m(3, 4);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = u(rng) * std::pow(10.0, trial % 7 - 3);
        std::ostringstream os;
        write_matrix_csv(os, m);
        CHECK(parse_matrix_csv(os.str()) == m);
        CHECK(matrix_from_json(matrix_to_json(m)) == m);
    }
}

TEST_CASE("dataset directory round trip") {
    TrueStructure t = TrueStructure::of_rank(1);
    t.A = NonnegMatrix::Ones(2, 1);
    t.B = NonnegMatrix::Constant(1, 3, 0.5);
    const auto d = generate_dataset(Family::Gaussian, {2, 3, 1}, t, 7, 42);
    const auto dir = scratch_dir("dataset");
    write_dataset(dir, d);
    CHECK(fs::exists(dir / "obs_0001.csv"));
    CHECK(fs::exists(dir / "obs_0007.csv"));
    const auto back = read_dataset(dir / "manifest.json");
    CHECK(back.family == Family::Gaussian);
    CHECK(back.M == 2);
    CHECK(back.N == 3);
    REQUIRE(back.size() == 7);
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(back.observations[i] == d.observations[i]);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 42);
    REQUIRE(back.truth.has_value());
    CHECK(back.truth->H0 == 1);
    CHECK(*back.truth->B == *t.B);
    fs::remove_all(dir);
}

TEST_CASE("report json round trip") {
    const auto dir = scratch_dir("json");
    nlohmann::json j{{"x", 0.1}, {"name", "a"}};
    write_report_json(dir / "r.json", j);
    CHECK(read_json(dir / "r.json") == j);
    fs::remove_all(dir);
}
