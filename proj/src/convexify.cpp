#include "trajsplit/convexify.hpp"

#include <limits>

namespace trajsplit::nlp {

namespace {

// A configuration (1 - t)·q_j + t·q_{j+1}; t = 0 is waypoint j itself. A
// swept sample stands for the whole edge j -> j+1.
struct Sample {
    int waypoint = 0;
    double t = 0.0;
    bool swept = false;
};

}  // namespace

NlpProblem convexify_segment(const Scenario& scenario, const SegmentLayout& segment,
                             const SegmentObjective& objective, const Vec& iterate,
                             const ConvexifyOptions& options) {
    const StateLayout layout = objective.layout;
    const Eigen::Index b = layout.block();
    const Eigen::Index d = layout.dof;
    const int n_wp = segment.num_waypoints();
    const Eigen::Index n = b * n_wp;
    if (objective.num_waypoints != n_wp || iterate.size() != n) {
        throw DimensionMismatch("iterate does not match the segment layout");
    }

    NlpProblem p;
    p.dimension = n;
    p.objective = objective.to_quadratic();
    p.initial = iterate;
    p.lower = Vec::Constant(n, -std::numeric_limits<double>::infinity());
    p.upper = Vec::Constant(n, std::numeric_limits<double>::infinity());

    if (scenario.robot.joint_limits) {
        const auto& limits = *scenario.robot.joint_limits;
        for (int j = 0; j < n_wp; ++j) {
            for (Eigen::Index k = 0; k < d; ++k) {
                p.lower[b * j + k] = limits[static_cast<std::size_t>(k)].lo;
                p.upper[b * j + k] = limits[static_cast<std::size_t>(k)].hi;
            }
        }
    }

    auto pin = [&](Eigen::Index at, const Vec& value) {
        p.lower.segment(at, d) = value;
        p.upper.segment(at, d) = value;
    };
    const bool first_pinned = segment.begin == 0;
    const bool last_pinned = segment.end == scenario.num_waypoints - 1;
    if (first_pinned) {
        pin(0, scenario.start.position);
        if (layout.dynamics) pin(layout.velocity_offset(), scenario.start.velocity);
    }
    if (last_pinned) {
        const Eigen::Index off = b * (n_wp - 1);
        pin(off, scenario.goal.position);
        if (layout.dynamics) {
            pin(off + layout.velocity_offset(), scenario.goal.velocity);
            // The final acceleration enters no constraint and no cost.
            pin(off + layout.acceleration_offset(), scenario.goal.acceleration);
        }
    }

    if (layout.dynamics && n_wp > 1) {
        const Eigen::Index rows = 2 * d * (n_wp - 1);
        p.equalities.matrix = Mat::Zero(rows, n);
        p.equalities.rhs = Vec::Zero(rows);
        const double dt = scenario.dt;
        Eigen::Index r = 0;
        for (int j = 0; j + 1 < n_wp; ++j) {
            const Eigen::Index o0 = b * j;
            const Eigen::Index o1 = b * (j + 1);
            for (Eigen::Index k = 0; k < d; ++k, ++r) {
                p.equalities.matrix(r, o1 + k) = 1.0;
                p.equalities.matrix(r, o0 + k) = -1.0;
                p.equalities.matrix(r, o0 + layout.velocity_offset() + k) = -dt;
            }
            for (Eigen::Index k = 0; k < d; ++k, ++r) {
                p.equalities.matrix(r, o1 + layout.velocity_offset() + k) = 1.0;
                p.equalities.matrix(r, o0 + layout.velocity_offset() + k) = -1.0;
                p.equalities.matrix(r, o0 + layout.acceleration_offset() + k) = -dt;
            }
        }
    } else {
        p.equalities.matrix = Mat(0, n);
        p.equalities.rhs = Vec(0);
    }

    for (int j = 0; j < n_wp; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) p.trust_region_variables.push_back(b * j + k);
    }

    if (scenario.obstacles.empty()) return p;

    std::vector<Sample> samples;
    for (int j = 0; j < n_wp; ++j) {
        const bool pinned = (j == 0 && first_pinned) || (j == n_wp - 1 && last_pinned);
        if (!pinned) samples.push_back({j, 0.0, false});
        if (j + 1 < n_wp) {
            if (options.swept_edges) samples.push_back({j, 0.0, true});
            if (scenario.robot.kind == RobotKind::Point2D && options.swept_edges) continue;
            for (int s = 1; s <= options.edge_samples; ++s) {
                samples.push_back({j, static_cast<double>(s) / (options.edge_samples + 1), false});
            }
        }
    }
    const double threshold = scenario.safety_margin + options.clearance_buffer;
    const double activation = options.activation_for(scenario);
    const int links = static_cast<int>(scenario.robot.kind == RobotKind::Point2D
                                           ? 1
                                           : scenario.robot.link_lengths.size());
    const int obstacles = static_cast<int>(scenario.obstacles.size());

    p.inequalities = [scenario, samples, threshold, activation, links, obstacles, b, d,
                      n](const Vec& x) {
        std::vector<InequalityRow> rows;
        for (const Sample& s : samples) {
            const Eigen::Index o0 = b * s.waypoint;
            if (s.swept) {
                const Vec q0 = x.segment(o0, d);
                const Vec q1 = x.segment(o0 + b, d);
                for (int link = 0; link < links; ++link) {
                    for (int obs = 0; obs < obstacles; ++obs) {
                        const auto lin = linearize_swept(scenario, q0, q1, {link, obs});
                        if (!(lin.sd0 < activation)) continue;
                        InequalityRow row;
                        row.value = lin.sd0 - threshold;
                        row.gradient = Vec::Zero(n);
                        row.gradient.segment(o0, d) = lin.gradient_from;
                        row.gradient.segment(o0 + b, d) += lin.gradient_to;
                        rows.push_back(std::move(row));
                    }
                }
                continue;
            }
            Vec q = x.segment(o0, d);
            if (s.t > 0.0) q = (1.0 - s.t) * q + s.t * x.segment(o0 + b, d);
            for (int link = 0; link < links; ++link) {
                for (int obs = 0; obs < obstacles; ++obs) {
                    const auto lin = linearize_at_configuration(scenario, q, {link, obs});
                    if (!(lin.sd0 < activation)) continue;
                    InequalityRow row;
                    row.value = lin.sd0 - threshold;
                    row.gradient = Vec::Zero(n);
                    row.gradient.segment(o0, d) += (1.0 - s.t) * lin.gradient;
                    if (s.t > 0.0) row.gradient.segment(o0 + b, d) += s.t * lin.gradient;
                    rows.push_back(std::move(row));
                }
            }
        }
        return rows;
    };
    return p;
}

}  // namespace trajsplit::nlp
