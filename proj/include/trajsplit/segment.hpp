#pragma once

#include <vector>

#include "trajsplit/model.hpp"
#include "trajsplit/nlp.hpp"

namespace trajsplit {

// How one waypoint is laid out in a decision vector. With dynamics the block is
// (q, v, a); in path-only mode it is q alone.
struct StateLayout {
    Eigen::Index dof = 0;
    bool dynamics = true;

    static StateLayout of(const Scenario& scenario);

    [[nodiscard]] Eigen::Index block() const noexcept { return dynamics ? 3 * dof : dof; }
    [[nodiscard]] Eigen::Index position_offset() const noexcept { return 0; }
    [[nodiscard]] Eigen::Index velocity_offset() const noexcept { return dof; }
    [[nodiscard]] Eigen::Index acceleration_offset() const noexcept { return 2 * dof; }
};

Vec pack_state(const RobotState& state, const StateLayout& layout);
// Path-only blocks unpack with zero velocity and acceleration.
RobotState unpack_state(const Vec& block, const StateLayout& layout);

// Waypoints [begin, end] (0-based, inclusive) of the full trajectory owned by
// one segment. A leading slack means `begin` holds the copy x'_s of the
// previous split point; a trailing split means `end` holds the original x_s.
struct SegmentLayout {
    int index = 0;
    int begin = 0;
    int end = 0;
    bool leading_slack = false;
    bool trailing_split = false;

    [[nodiscard]] int num_waypoints() const noexcept { return end - begin + 1; }
};

Vec pack_states(const std::vector<RobotState>& states, const StateLayout& layout);
std::vector<RobotState> unpack_states(const Vec& x, const StateLayout& layout);

enum class TermKind {
    StateCost,         // weight · ‖v_j‖²
    EdgeCost,          // weight · ‖q_{j+1} - q_j‖² / dt²
    DualLinear,        // yᵀ (x_j - z)
    ConsensusPenalty,  // ρ/2 ‖x_j - z‖²
};

// One additive term of a segment's augmented Lagrangian. `waypoint` is local
// to the segment.
struct ObjectiveTerm {
    TermKind kind = TermKind::StateCost;
    int waypoint = 0;
    double weight = 1.0;
    Vec dual;
    Vec target;
    double rho = 0.0;
};

struct SegmentObjective {
    StateLayout layout;
    int num_waypoints = 0;
    double dt = 1.0;
    std::vector<ObjectiveTerm> terms;

    [[nodiscard]] Eigen::Index dimension() const noexcept {
        return layout.block() * num_waypoints;
    }
    [[nodiscard]] double term_value(const ObjectiveTerm& term, const Vec& x) const;
    [[nodiscard]] double value(const Vec& x) const;
    // Sum of the StateCost and EdgeCost terms only.
    [[nodiscard]] double cost_value(const Vec& x) const;
    [[nodiscard]] nlp::QuadraticObjective to_quadratic() const;
};

}  // namespace trajsplit
