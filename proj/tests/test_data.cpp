#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "lcga/data.hpp"
#include "lcga/error.hpp"
#include "lcga/rng.hpp"

using namespace lcga;

namespace {

TrajectoryDataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

TrajectoryDataset toy(int n) {
    std::vector<std::string> ids;
    Eigen::MatrixXd y(n, 3);
    for (int i = 0; i < n; ++i) {
        ids.push_back("s" + std::to_string(i));
        for (int t = 0; t < 3; ++t) y(i, t) = i * i + 0.5 * t;
    }
    return TrajectoryDataset(ids, Eigen::Vector3d(0, 1, 2), y);
}

}  // namespace

TEST_CASE("load_long regroups rows by subject") {
    std::vector<LongRow> rows = {{"a", 0, 1.0}, {"a", 1, 2.0}, {"b", 0, 0.0}, {"b", 1, 1.0}};
    const auto ds = load_long(rows);
    CHECK(ds.n_subjects() == 2);
    CHECK(ds.n_times() == 2);
    CHECK(ds.subject_ids() == std::vector<std::string>{"a", "b"});
    CHECK(ds.outcomes()(0, 1) == 2.0);
    CHECK(ds.outcomes()(1, 0) == 0.0);
}

TEST_CASE("load_long sorts each subject by time and keeps first-appearance order") {
    std::vector<LongRow> rows = {{"z", 2, 3.0}, {"y", 0, 4.0}, {"z", 0, 1.0}, {"y", 2, 6.0}};
    const auto ds = load_long(rows);
    CHECK(ds.subject_ids() == std::vector<std::string>{"z", "y"});
    CHECK(ds.times() == Eigen::Vector2d(0, 2));
    CHECK(ds.outcomes()(0, 0) == 1.0);
    CHECK(ds.outcomes()(0, 1) == 3.0);
}

TEST_CASE("load_long rejects ragged and duplicated cells") {
    std::vector<LongRow> ragged = {{"a", 0, 1.0}, {"b", 0, 0.0}, {"b", 1, 1.0}};
    CHECK_THROWS_AS(load_long(ragged), RaggedData);
    try {
        load_long(ragged);
    } catch (const RaggedData& e) {
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
    std::vector<LongRow> dup = {{"a", 0, 1.0}, {"a", 0, 2.0}, {"a", 1, 1.0}};
    CHECK_THROWS_AS(load_long(dup), DuplicateCell);
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS_AS(TrajectoryDataset({"a"}, Eigen::Vector2d(1, 1), Eigen::MatrixXd::Zero(1, 2)), DataError);
    CHECK_THROWS_AS(TrajectoryDataset({"a"}, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1)), DataError);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(1, 2);
    y(0, 1) = std::nan("");
    CHECK_THROWS_AS(TrajectoryDataset({"a"}, Eigen::Vector2d(0, 1), y), NonNumeric);
}

TEST_CASE("outcome variance is the population variance") {
    const auto ds = TrajectoryDataset({"a", "b"}, Eigen::Vector2d(0, 1), (Eigen::MatrixXd(2, 2) << 1, 2, 3, 4).finished());
    CHECK(ds.outcome_variance() == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("resample identity and forced duplication") {
    const auto ds = toy(4);
    std::vector<Eigen::Index> id = {0, 1, 2, 3};
    const auto same = resample(ds, id);
    CHECK(same.outcomes() == ds.outcomes());
    CHECK(same.times() == ds.times());

    const auto two = toy(2);
    std::vector<Eigen::Index> dup = {0, 0};
    const auto r = resample(two, dup);
    CHECK(r.n_subjects() == 2);
    CHECK(r.outcomes().row(0) == two.outcomes().row(0));
    CHECK(r.outcomes().row(1) == two.outcomes().row(0));
    CHECK(r.subject_ids()[0] != r.subject_ids()[1]);

    std::vector<Eigen::Index> bad = {0, 2};
    CHECK_THROWS_AS(resample(two, bad), IndexOutOfRange);
    std::vector<Eigen::Index> neg = {-1};
    CHECK_THROWS_AS(resample(two, neg), IndexOutOfRange);
}

TEST_CASE("uniform resample means agree with the exact resampling moments") {
    const auto ds = toy(10);
    const Eigen::VectorXd subject_means = ds.outcomes().rowwise().mean();
    const double mu = subject_means.mean();
    const double var = (subject_means.array() - mu).square().mean();
    auto rng = make_stream(99, {1});
    const int M = 1000;
    double total = 0;
    for (int m = 0; m < M; ++m) {
        std::vector<Eigen::Index> idx(10);
        for (auto& v : idx) v = static_cast<Eigen::Index>(uniform_index(rng, 10));
        total += resample(ds, idx).outcomes().mean();
    }
    // Each resample mean has variance var / 10.
    const double se = std::sqrt(var / 10.0 / M);
    CHECK(std::abs(total / M - mu) < 3 * se);
}

TEST_CASE("parse_csv long layout") {
    const auto ds = parse("id,time,y\n1,0,1.5\n1,1,2.5\n2,0,0\n2,1,-1\n");
    CHECK(ds.n_subjects() == 2);
    CHECK(ds.outcomes()(1, 1) == -1.0);
}

TEST_CASE("parse_csv wide layout reads the grid from the header") {
    const auto ds = parse("\xEF\xBB\xBFid,y_2015,y_2016,y_2017,y_2018\nA,1,2,3,4\nB,0,0,1,1\n");
    CHECK(ds.n_times() == 4);
    CHECK(ds.times() == Eigen::Vector4d(2015, 2016, 2017, 2018));
    CHECK(ds.outcomes()(0, 3) == 4.0);
}

TEST_CASE("parse_csv reports the offending line") {
    try {
        parse("id,time,y\n1,0,1\n1,1,abc\n");
        FAIL("expected NonNumeric");
    } catch (const NonNumeric& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        parse("id,time,y\n1,0,1\n1,1\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("subject,time,y\n"), DataError);
}

TEST_CASE("long and wide writers round-trip exactly") {
    auto rng = make_stream(5, {});
    Eigen::MatrixXd y(3, 4);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = standard_normal(rng) * 1e3;
    const TrajectoryDataset ds({"a", "b", "c"}, Eigen::Vector4d(0, 0.5, 1.25, 7), y);
    std::stringstream lng, wide;
    write_long_csv(lng, ds);
    write_wide_csv(wide, ds);
    CHECK(parse_csv(lng) == ds);
    CHECK(parse_csv(wide) == ds);
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_double(x)) == x);
}
