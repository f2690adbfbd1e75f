#include <doctest.h>

#include "lcga/basis.hpp"
#include "oracles.hpp"

using namespace lcga;

TEST_CASE("raw design on the normalized grid") {
    const auto b = Basis::build(Eigen::Vector2d(0, 1), 1);
    Eigen::Matrix2d expected;
    expected << 1, 0, 1, 1;
    CHECK(b.raw_design() == expected);
}

TEST_CASE("degree bound") {
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(5, 0, 4);
    CHECK(Basis::build(t, 4).ortho_design().cols() == 5);
    CHECK_THROWS_AS(Basis::build(t, 5), DegreeTooHigh);
    CHECK_THROWS_AS(Basis::build(Eigen::Vector3d(0, 2, 1), 1), std::invalid_argument);
}

TEST_CASE("orthonormal columns") {
    const auto b = Basis::build(Eigen::VectorXd::LinSpaced(5, 0, 4), 3);
    const Eigen::MatrixXd gram = b.ortho_design().transpose() * b.ortho_design();
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("raw design factors as Q R with positive diagonal") {
    const auto b = Basis::build(Eigen::Vector4d(2015, 2016, 2017, 2018), 2);
    CHECK((b.ortho_design() * b.change_of_basis() - b.raw_design()).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(b.change_of_basis()(j, j) > 0);
    CHECK(b.normalized_times()[0] == 0.0);
    CHECK(b.normalized_times()[3] == 1.0);
}

TEST_CASE("coefficient conversions invert each other and reproduce the polynomial") {
    const Eigen::VectorXd times = (Eigen::VectorXd(5) << 0, 1, 3, 4, 9).finished();
    const auto b = Basis::build(times, 3);
    const Eigen::Vector4d raw(1.5, -2, 0.25, 3);
    const Eigen::VectorXd g = b.to_ortho(raw);
    CHECK((b.to_raw(g) - raw).cwiseAbs().maxCoeff() < 1e-10);
    const oracle::Row u = oracle::normalize({0, 1, 3, 4, 9});
    const Eigen::VectorXd fitted = b.ortho_design() * g;
    for (int t = 0; t < 5; ++t)
        CHECK(static_cast<double>(std::abs(fitted[t] - oracle::mean_at({1.5, -2, 0.25, 3}, u[t]))) < 1e-12);
}

TEST_CASE("long double instantiation") {
    const auto b = PolynomialBasis<long double>::build(Eigen::VectorXd::LinSpaced(5, 0, 4), 2);
    const auto gram = (b.ortho_design().transpose() * b.ortho_design()).eval();
    CHECK(static_cast<double>((gram - decltype(gram)::Identity(3, 3)).cwiseAbs().maxCoeff()) < 1e-15);
}
