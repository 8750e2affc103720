#include "trajsplit/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trajsplit {

std::vector<LinkPose> forward_kinematics(const RobotModel& model, const Vec& q) {
    if (q.size() != model.dof()) {
        throw DimensionMismatch("forward_kinematics: expected " + std::to_string(model.dof()) +
                                " joints, got " + std::to_string(q.size()));
    }
    if (model.kind == RobotKind::Point2D) {
        const Vec2 p(q[0], q[1]);
        return {LinkPose{p, 0.0, p, p}};
    }
    std::vector<LinkPose> poses;
    poses.reserve(model.link_lengths.size());
    Vec2 origin = model.base.position;
    double angle = model.base.orientation;
    for (std::size_t k = 0; k < model.link_lengths.size(); ++k) {
        angle += q[static_cast<Eigen::Index>(k)];
        const Vec2 tip = origin + model.link_lengths[k] * Vec2(std::cos(angle), std::sin(angle));
        poses.push_back(LinkPose{origin, angle, origin, tip});
        origin = tip;
    }
    return poses;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> point_jacobian(const RobotModel& model, const Vec& q,
                                                        int link_index, const Vec2& point) {
    const auto n = model.dof();
    if (q.size() != n) throw DimensionMismatch("point_jacobian: joint vector dimension");
    Eigen::Matrix<double, 2, Eigen::Dynamic> jac = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n);
    if (model.kind == RobotKind::Point2D) {
        if (link_index != 0) throw std::out_of_range("point_jacobian: link index out of range");
        jac.setIdentity();
        return jac;
    }
    if (link_index < 0 || link_index >= n) {
        throw std::out_of_range("point_jacobian: link index out of range");
    }
    const auto poses = forward_kinematics(model, q);
    for (int j = 0; j <= link_index; ++j) {
        const Vec2 r = point - poses[static_cast<std::size_t>(j)].origin;
        jac(0, j) = -r.y();
        jac(1, j) = r.x();
    }
    return jac;
}

DynamicsStep dynamics_step(const RobotState& state, double dt) {
    return {state.position + dt * state.velocity, state.velocity + dt * state.acceleration};
}

double dynamics_residual(const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        const auto next = dynamics_step(traj.states[i], traj.dt);
        const auto& s = traj.states[i + 1];
        worst = std::max(worst, (s.position - next.position).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (s.velocity - next.velocity).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace trajsplit
