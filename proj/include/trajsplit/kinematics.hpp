#pragma once

#include <utility>
#include <vector>

#include "trajsplit/model.hpp"

namespace trajsplit {

// World-frame pose of one link. For a point robot the single "link" is the
// degenerate segment at the point.
struct LinkPose {
    Vec2 origin = Vec2::Zero();
    double orientation = 0.0;
    Vec2 endpoint_a = Vec2::Zero();
    Vec2 endpoint_b = Vec2::Zero();
};

std::vector<LinkPose> forward_kinematics(const RobotModel& model, const Vec& q);

// 2 x dof translational Jacobian of a point rigidly attached to `link_index`.
// Columns of joints distal to the link are zero.
Eigen::Matrix<double, 2, Eigen::Dynamic> point_jacobian(const RobotModel& model, const Vec& q,
                                                        int link_index, const Vec2& point);

struct DynamicsStep {
    Vec position;
    Vec velocity;
};

// Double integrator: p' = p + dt v, v' = v + dt a.
DynamicsStep dynamics_step(const RobotState& state, double dt);

// max_i ‖(p_{i+1}, v_{i+1}) - dynamics_step(x_i)‖∞.
double dynamics_residual(const Trajectory& traj);

}  // namespace trajsplit
