#pragma once

#include <Eigen/Core>

#include <optional>
#include <variant>
#include <vector>

#include "trajsplit/error.hpp"

namespace trajsplit {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat = Eigen::MatrixXd;

// Position, velocity and acceleration of the robot at one waypoint. All three
// blocks share the configuration dimension.
struct RobotState {
    Vec position;
    Vec velocity;
    Vec acceleration;

    RobotState() = default;
    RobotState(Vec p, Vec v, Vec a);

    // State at rest at the given configuration.
    static RobotState at_rest(const Vec& position);

    [[nodiscard]] Eigen::Index dim() const noexcept { return position.size(); }
    [[nodiscard]] bool valid() const noexcept;

    friend bool operator==(const RobotState& a, const RobotState& b) {
        return a.position == b.position && a.velocity == b.velocity &&
               a.acceleration == b.acceleration;
    }
};

struct Trajectory {
    std::vector<RobotState> states;
    double dt = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept {
        return states.empty() ? 0 : states.front().dim();
    }
    [[nodiscard]] bool valid() const noexcept;
};

enum class RobotKind { Point2D, PlanarArm };

struct JointLimit {
    double lo = 0.0;
    double hi = 0.0;
};

struct Pose2 {
    Vec2 position = Vec2::Zero();
    double orientation = 0.0;  // radians
};

struct RobotModel {
    RobotKind kind = RobotKind::Point2D;
    std::vector<double> link_lengths;  // PlanarArm only
    double link_radius = 0.0;          // PlanarArm only
    std::optional<std::vector<JointLimit>> joint_limits;
    Pose2 base;

    static RobotModel point2d();
    static RobotModel planar_arm(std::vector<double> link_lengths, double link_radius,
                                 Pose2 base = {});

    // Configuration dimension: 2 for a point, number of links for an arm.
    [[nodiscard]] Eigen::Index dof() const noexcept;
    void validate() const;
};

struct Circle {
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
};

struct ConvexPolygon {
    std::vector<Vec2> vertices;  // counterclockwise
};

struct Obstacle {
    std::variant<Circle, ConvexPolygon> shape;
};

struct Scenario {
    RobotModel robot;
    std::vector<Obstacle> obstacles;
    RobotState start;
    RobotState goal;
    int num_waypoints = 2;
    double dt = 1.0;
    double safety_margin = 0.0;
    // When false only positions are decision variables and the double
    // integrator constraint is dropped.
    bool dynamics_enabled = true;

    // Throws InvalidScenario describing the first violated invariant.
    void validate() const;
};

// Straight line from start to goal. Every state, endpoints included, carries
// the constant velocity (goal - start) / ((N - 1) dt) and zero acceleration.
Trajectory straight_line_init(const Scenario& scenario);

// Sum of Euclidean norms of consecutive position displacements.
double path_length(const Trajectory& traj);

// Sum of squared velocity norms over all waypoints.
double objective_cost(const Trajectory& traj);

// Sum of squared finite-difference velocities, Σ‖q_{i+1} - q_i‖² / dt². This is
// the objective when dynamics are disabled.
double path_energy(const Trajectory& traj);

// Overwrites velocities and accelerations with forward differences of the
// positions (last velocity and acceleration zero). Used for path-only results.
void fill_finite_difference_derivatives(Trajectory& traj);

}  // namespace trajsplit
