#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "trajsplit/kinematics.hpp"

using namespace trajsplit;
using support::vec;

namespace {

// World position of a point given in the frame of `link` at configuration q.
Vec2 attached_point(const RobotModel& m, const Vec& q, int link, const Vec2& local) {
    const auto pose = forward_kinematics(m, q)[static_cast<std::size_t>(link)];
    const Eigen::Rotation2Dd rot(pose.orientation);
    return pose.origin + rot * local;
}

Vec2 to_local(const RobotModel& m, const Vec& q, int link, const Vec2& world) {
    const auto pose = forward_kinematics(m, q)[static_cast<std::size_t>(link)];
    return Eigen::Rotation2Dd(-pose.orientation) * (world - pose.origin);
}

}  // namespace

TEST_CASE("forward kinematics of a two-link arm") {
    const auto arm = RobotModel::planar_arm({1.0, 1.0}, 0.1);
    CHECK(forward_kinematics(arm, vec({0, 0}))[1].endpoint_b.isApprox(Vec2(2, 0)));
    CHECK((forward_kinematics(arm, vec({std::numbers::pi / 2, 0}))[1].endpoint_b - Vec2(0, 2)).norm() < 1e-15);
    const auto bent = forward_kinematics(arm, vec({std::numbers::pi / 2, -std::numbers::pi / 2}));
    CHECK((bent[0].endpoint_b - Vec2(0, 1)).norm() < 1e-15);
    CHECK((bent[1].endpoint_b - Vec2(1, 1)).norm() < 1e-15);
    CHECK(bent[1].orientation == doctest::Approx(0.0));
}

TEST_CASE("forward kinematics applies the base pose") {
    const auto arm = RobotModel::planar_arm({1.0}, 0.1, Pose2{Vec2(1, 2), std::numbers::pi / 2});
    const auto fk = forward_kinematics(arm, vec({0}));
    CHECK(fk[0].endpoint_a == Vec2(1, 2));
    CHECK((fk[0].endpoint_b - Vec2(1, 3)).norm() < 1e-15);
}

TEST_CASE("point robot kinematics is the identity") {
    const auto p = RobotModel::point2d();
    const auto fk = forward_kinematics(p, vec({0.3, -0.2}));
    REQUIRE(fk.size() == 1);
    CHECK(fk[0].endpoint_a == Vec2(0.3, -0.2));
    CHECK(fk[0].endpoint_b == Vec2(0.3, -0.2));
    CHECK(point_jacobian(p, vec({0.3, -0.2}), 0, Vec2(0.3, -0.2)).isIdentity());
    CHECK_THROWS_AS(forward_kinematics(p, vec({1})), DimensionMismatch);
}

TEST_CASE("analytic Jacobian of a planar 2R arm") {
    const auto arm = RobotModel::planar_arm({1.0, 1.0}, 0.1);
    Eigen::Matrix2d tip;
    tip << 0, 0, 2, 1;
    CHECK(point_jacobian(arm, vec({0, 0}), 1, Vec2(2, 0)) == tip);
    Eigen::Matrix2d elbow;
    elbow << 0, 0, 1, 0;
    CHECK(point_jacobian(arm, vec({0, 0}), 0, Vec2(1, 0)) == elbow);
    CHECK_THROWS_AS(point_jacobian(arm, vec({0, 0}), 2, Vec2(0, 0)), std::out_of_range);
}

TEST_CASE("Jacobian matches central finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto arm = RobotModel::planar_arm({0.8, 0.7, 0.5}, 0.05, Pose2{Vec2(0.2, -0.1), 0.3});
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec q = vec({angle(rng), angle(rng), angle(rng)});
        const int link = trial % 3;
        const Vec2 world = attached_point(arm, q, link, Vec2(0.5 * unit(rng) + 0.5, 0.2 * unit(rng)));
        const Vec2 local = to_local(arm, q, link, world);
        const auto jac = point_jacobian(arm, q, link, world);
        for (int j = 0; j < 3; ++j) {
            Vec qp = q;
            Vec qm = q;
            qp[j] += h;
            qm[j] -= h;
            const Vec2 fd = (attached_point(arm, qp, link, local) - attached_point(arm, qm, link, local)) / (2 * h);
            const double scale = std::max(1.0, fd.norm());
            CHECK((jac.col(j) - fd).norm() / scale <= 1e-6);
        }
    }
}

TEST_CASE("double integrator step") {
    auto s = dynamics_step(RobotState(vec({0}), vec({1}), vec({0})), 0.1);
    CHECK(s.position[0] == doctest::Approx(0.1));
    CHECK(s.velocity[0] == 1.0);
    s = dynamics_step(RobotState(vec({0.7}), vec({0}), vec({0})), 0.3);
    CHECK(s.position[0] == 0.7);
    CHECK(s.velocity[0] == 0.0);
    s = dynamics_step(RobotState(vec({0}), vec({0}), vec({2})), 0.5);
    CHECK(s.position[0] == 0.0);
    CHECK(s.velocity[0] == 1.0);
}

TEST_CASE("dynamics residual") {
    Trajectory t;
    t.dt = 0.2;
    RobotState s(vec({0, 1}), vec({1, -1}), vec({0.5, 2}));
    for (int i = 0; i < 6; ++i) {
        t.states.push_back(s);
        const auto n = dynamics_step(s, t.dt);
        s = RobotState(n.position, n.velocity, vec({0.1 * i, -0.3}));
    }
    CHECK(dynamics_residual(t) <= 1e-15);

    Scenario sc;
    sc.robot = RobotModel::point2d();
    sc.start = RobotState::at_rest(vec({0, 0}));
    sc.goal = RobotState::at_rest(vec({4, 0}));
    sc.num_waypoints = 5;
    sc.dt = 1.0;
    auto line = straight_line_init(sc);
    CHECK(dynamics_residual(line) <= 1e-15);
    line.states[2].position[1] += 0.01;
    CHECK(dynamics_residual(line) == doctest::Approx(0.01).epsilon(1e-12));
}
