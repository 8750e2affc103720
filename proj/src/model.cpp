#include "trajsplit/model.hpp"

#include <cmath>
#include <string>

namespace trajsplit {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void validate_obstacle(const Obstacle& obstacle, std::size_t index) {
    const std::string where = "obstacle " + std::to_string(index);
    if (const auto* c = std::get_if<Circle>(&obstacle.shape)) {
        if (!(c->radius > 0.0) || !c->center.allFinite()) {
            throw InvalidScenario(where + ": circle radius must be positive and finite");
        }
        return;
    }
    const auto& poly = std::get<ConvexPolygon>(obstacle.shape);
    const auto n = poly.vertices.size();
    if (n < 3) throw InvalidScenario(where + ": polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly.vertices[i];
        const Vec2& b = poly.vertices[(i + 1) % n];
        const Vec2& c = poly.vertices[(i + 2) % n];
        if (!a.allFinite()) throw InvalidScenario(where + ": non-finite vertex");
        if (!(cross(b - a, c - b) > 0.0)) {
            throw InvalidScenario(where + ": polygon must be strictly convex and counterclockwise");
        }
    }
}

}  // namespace

RobotState::RobotState(Vec p, Vec v, Vec a)
    : position(std::move(p)), velocity(std::move(v)), acceleration(std::move(a)) {}

RobotState RobotState::at_rest(const Vec& position) {
    return RobotState(position, Vec::Zero(position.size()), Vec::Zero(position.size()));
}

bool RobotState::valid() const noexcept {
    return position.size() >= 1 && velocity.size() == position.size() &&
           acceleration.size() == position.size() && all_finite(position) &&
           all_finite(velocity) && all_finite(acceleration);
}

bool Trajectory::valid() const noexcept {
    if (states.size() < 2 || !(dt > 0.0)) return false;
    const auto d = states.front().dim();
    for (const auto& s : states) {
        if (!s.valid() || s.dim() != d) return false;
    }
    return true;
}

RobotModel RobotModel::point2d() { return RobotModel{}; }

RobotModel RobotModel::planar_arm(std::vector<double> link_lengths, double link_radius,
                                  Pose2 base) {
    RobotModel m;
    m.kind = RobotKind::PlanarArm;
    m.link_lengths = std::move(link_lengths);
    m.link_radius = link_radius;
    m.base = base;
    return m;
}

Eigen::Index RobotModel::dof() const noexcept {
    return kind == RobotKind::Point2D ? 2 : static_cast<Eigen::Index>(link_lengths.size());
}

void RobotModel::validate() const {
    if (kind == RobotKind::PlanarArm) {
        if (link_lengths.empty()) throw InvalidScenario("planar arm needs at least one link");
        for (double l : link_lengths) {
            if (!(l > 0.0) || !std::isfinite(l)) {
                throw InvalidScenario("link lengths must be positive");
            }
        }
        if (!(link_radius > 0.0) || !std::isfinite(link_radius)) {
            throw InvalidScenario("link radius must be positive");
        }
    }
    if (joint_limits) {
        if (static_cast<Eigen::Index>(joint_limits->size()) != dof()) {
            throw InvalidScenario("joint_limits must have one entry per configuration dimension");
        }
        for (const auto& lim : *joint_limits) {
            if (!(lim.lo <= lim.hi)) throw InvalidScenario("joint limit requires lo <= hi");
        }
    }
}

void Scenario::validate() const {
    robot.validate();
    const auto d = robot.dof();
    if (!start.valid() || start.dim() != d) {
        throw InvalidScenario("start state dimension does not match the robot");
    }
    if (!goal.valid() || goal.dim() != d) {
        throw InvalidScenario("goal state dimension does not match the robot");
    }
    if (num_waypoints < 2) throw InvalidScenario("num_waypoints must be at least 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidScenario("dt must be positive");
    if (!(safety_margin >= 0.0) || !std::isfinite(safety_margin)) {
        throw InvalidScenario("safety_margin must be non-negative");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) validate_obstacle(obstacles[i], i);
}

Trajectory straight_line_init(const Scenario& scenario) {
    const auto d = scenario.robot.dof();
    if (scenario.start.dim() != d || scenario.goal.dim() != d || !scenario.start.valid() ||
        !scenario.goal.valid()) {
        throw InvalidScenario("start/goal dimension mismatch");
    }
    if (scenario.num_waypoints < 2 || !(scenario.dt > 0.0)) {
        throw InvalidScenario("num_waypoints must be >= 2 and dt > 0");
    }
    const int n = scenario.num_waypoints;
    const Vec delta = scenario.goal.position - scenario.start.position;
    const Vec velocity = delta / (static_cast<double>(n - 1) * scenario.dt);

    Trajectory traj;
    traj.dt = scenario.dt;
    traj.states.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        traj.states.emplace_back(scenario.start.position + s * delta, velocity, Vec::Zero(d));
    }
    traj.states.front().position = scenario.start.position;
    traj.states.back().position = scenario.goal.position;
    return traj;
}

double path_length(const Trajectory& traj) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        total += (traj.states[i + 1].position - traj.states[i].position).norm();
    }
    return total;
}

double objective_cost(const Trajectory& traj) {
    double total = 0.0;
    for (const auto& s : traj.states) total += s.velocity.squaredNorm();
    return total;
}

double path_energy(const Trajectory& traj) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        total += (traj.states[i + 1].position - traj.states[i].position).squaredNorm();
    }
    return total / (traj.dt * traj.dt);
}

void fill_finite_difference_derivatives(Trajectory& traj) {
    const auto n = traj.states.size();
    if (n == 0) return;
    const auto d = traj.dim();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        traj.states[i].velocity = (traj.states[i + 1].position - traj.states[i].position) / traj.dt;
    }
    traj.states[n - 1].velocity = Vec::Zero(d);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        traj.states[i].acceleration =
            (traj.states[i + 1].velocity - traj.states[i].velocity) / traj.dt;
    }
    traj.states[n - 1].acceleration = Vec::Zero(d);
}

}  // namespace trajsplit
