#include <random>

#include "doctest.h"
#include "support.hpp"
#include "trajsplit/qp.hpp"

using namespace trajsplit;
using support::vec;

namespace {

qp::Problem unconstrained(const Mat& h, const Vec& g) {
    qp::Problem p;
    p.hessian = h;
    p.linear = g;
    p.eq_matrix = Mat(0, g.size());
    p.eq_rhs = Vec(0);
    p.ineq_matrix = Mat(0, g.size());
    p.ineq_rhs = Vec(0);
    return p;
}

}  // namespace

TEST_CASE("unconstrained minimizer") {
    auto p = unconstrained(Mat::Identity(2, 2) * 2.0, vec({-2, 4}));
    const auto r = qp::solve(p);
    REQUIRE(r.status == qp::Status::Optimal);
    CHECK((r.x - vec({1, -2})).norm() < 1e-12);
    CHECK(r.objective == doctest::Approx(-5.0));
}

TEST_CASE("single active inequality") {
    auto p = unconstrained(Mat::Identity(1, 1) * 2.0, vec({0}));
    p.ineq_matrix = Mat::Ones(1, 1);
    p.ineq_rhs = vec({1});
    const auto r = qp::solve(p);
    REQUIRE(r.status == qp::Status::Optimal);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.ineq_multipliers[0] == doctest::Approx(2.0));
    CHECK(r.active_inequalities == std::vector<int>{0});
}

TEST_CASE("equality constrained by symmetry") {
    auto p = unconstrained(Mat::Identity(2, 2) * 2.0, vec({0, 0}));
    p.eq_matrix = Mat::Ones(1, 2);
    p.eq_rhs = vec({1});
    const auto r = qp::solve(p);
    REQUIRE(r.status == qp::Status::Optimal);
    CHECK((r.x - vec({0.5, 0.5})).norm() < 1e-12);
}

TEST_CASE("infeasible and non-convex problems are reported") {
    auto p = unconstrained(Mat::Identity(1, 1), vec({0}));
    p.ineq_matrix = Mat(2, 1);
    p.ineq_matrix << 1, -1;
    p.ineq_rhs = vec({1, 0});
    CHECK(qp::solve(p).status == qp::Status::Infeasible);

    auto q = unconstrained(-Mat::Identity(2, 2), vec({0, 0}));
    CHECK(qp::solve(q).status == qp::Status::NotConvex);
    CHECK(std::string(qp::to_string(qp::Status::Optimal)) == "optimal");
}

TEST_CASE("random convex QPs match exhaustive active-set enumeration") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 5;
        Mat a(n, n);
        for (Eigen::Index i = 0; i < n * n; ++i) a.data()[i] = g(rng);
        auto p = unconstrained(a * a.transpose() + 0.1 * Mat::Identity(n, n), Vec(n));
        for (Eigen::Index i = 0; i < n; ++i) p.linear[i] = 3.0 * g(rng);
        const Eigen::Index m = 3 + trial % 4;
        p.ineq_matrix = Mat(m, n);
        p.ineq_rhs = Vec(m);
        for (Eigen::Index i = 0; i < m * n; ++i) p.ineq_matrix.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < m; ++i) p.ineq_rhs[i] = g(rng);
        if (trial % 3 == 0) {
            p.eq_matrix = Mat(1, n);
            for (Eigen::Index i = 0; i < n; ++i) p.eq_matrix(0, i) = g(rng);
            p.eq_rhs = vec({g(rng)});
        }
        const auto oracle = support::enumerate_qp(p);
        const auto r = qp::solve(p);
        if (!oracle.feasible) {
            CHECK(r.status == qp::Status::Infeasible);
            continue;
        }
        REQUIRE(r.status == qp::Status::Optimal);
        CHECK((r.x - oracle.x).lpNorm<Eigen::Infinity>() <= 1e-5);
        CHECK(r.objective == doctest::Approx(oracle.objective).epsilon(1e-8));
        ++solved;
        // KKT: stationarity with the reported multipliers.
        Vec grad = p.hessian * r.x + p.linear - p.ineq_matrix.transpose() * r.ineq_multipliers;
        if (p.eq_matrix.rows() > 0) grad -= p.eq_matrix.transpose() * r.eq_multipliers;
        CHECK(grad.norm() <= 1e-8);
        CHECK(r.ineq_multipliers.minCoeff() >= 0.0);
    }
    CHECK(solved >= 40);
}

TEST_CASE("redundant constraints do not break the factorization") {
    auto p = unconstrained(Mat::Identity(2, 2), vec({-3, -3}));
    p.ineq_matrix = Mat(3, 2);
    p.ineq_matrix << -1, 0, -1, 0, -2, 0;
    p.ineq_rhs = vec({-1, -1, -2});
    const auto r = qp::solve(p);
    REQUIRE(r.status == qp::Status::Optimal);
    CHECK((r.x - vec({1, 3})).norm() < 1e-10);
}
