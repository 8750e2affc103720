#include "trajsplit/segment.hpp"

namespace trajsplit {

StateLayout StateLayout::of(const Scenario& scenario) {
    return {scenario.robot.dof(), scenario.dynamics_enabled};
}

Vec pack_state(const RobotState& state, const StateLayout& layout) {
    if (state.dim() != layout.dof) throw DimensionMismatch("state dimension does not match layout");
    Vec block(layout.block());
    block.segment(layout.position_offset(), layout.dof) = state.position;
    if (layout.dynamics) {
        block.segment(layout.velocity_offset(), layout.dof) = state.velocity;
        block.segment(layout.acceleration_offset(), layout.dof) = state.acceleration;
    }
    return block;
}

RobotState unpack_state(const Vec& block, const StateLayout& layout) {
    if (block.size() != layout.block()) throw DimensionMismatch("block size does not match layout");
    const Eigen::Index d = layout.dof;
    if (!layout.dynamics) return RobotState::at_rest(block);
    return RobotState(block.segment(layout.position_offset(), d),
                      block.segment(layout.velocity_offset(), d),
                      block.segment(layout.acceleration_offset(), d));
}

Vec pack_states(const std::vector<RobotState>& states, const StateLayout& layout) {
    const Eigen::Index b = layout.block();
    Vec x(b * static_cast<Eigen::Index>(states.size()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        x.segment(b * static_cast<Eigen::Index>(j), b) = pack_state(states[j], layout);
    }
    return x;
}

std::vector<RobotState> unpack_states(const Vec& x, const StateLayout& layout) {
    const Eigen::Index b = layout.block();
    if (b == 0 || x.size() % b != 0) throw DimensionMismatch("vector is not a whole number of blocks");
    std::vector<RobotState> states;
    states.reserve(static_cast<std::size_t>(x.size() / b));
    for (Eigen::Index j = 0; j * b < x.size(); ++j) {
        states.push_back(unpack_state(x.segment(j * b, b), layout));
    }
    return states;
}

double SegmentObjective::term_value(const ObjectiveTerm& term, const Vec& x) const {
    const Eigen::Index b = layout.block();
    const Eigen::Index d = layout.dof;
    const Eigen::Index off = b * term.waypoint;
    switch (term.kind) {
        case TermKind::StateCost:
            return term.weight * x.segment(off + layout.velocity_offset(), d).squaredNorm();
        case TermKind::EdgeCost: {
            const Vec diff = x.segment(off + b, d) - x.segment(off, d);
            return term.weight * diff.squaredNorm() / (dt * dt);
        }
        case TermKind::DualLinear:
            return term.dual.dot(x.segment(off, b) - term.target);
        case TermKind::ConsensusPenalty:
            return 0.5 * term.rho * (x.segment(off, b) - term.target).squaredNorm();
    }
    return 0.0;
}

double SegmentObjective::value(const Vec& x) const {
    double total = 0.0;
    for (const auto& t : terms) total += term_value(t, x);
    return total;
}

double SegmentObjective::cost_value(const Vec& x) const {
    double total = 0.0;
    for (const auto& t : terms) {
        if (t.kind == TermKind::StateCost || t.kind == TermKind::EdgeCost) total += term_value(t, x);
    }
    return total;
}

nlp::QuadraticObjective SegmentObjective::to_quadratic() const {
    const Eigen::Index n = dimension();
    const Eigen::Index b = layout.block();
    const Eigen::Index d = layout.dof;
    auto q = nlp::QuadraticObjective::zero(n);
    for (const auto& t : terms) {
        const Eigen::Index off = b * t.waypoint;
        switch (t.kind) {
            case TermKind::StateCost:
                q.hessian.diagonal().segment(off + layout.velocity_offset(), d).array() += 2.0 * t.weight;
                break;
            case TermKind::EdgeCost: {
                const double w = 2.0 * t.weight / (dt * dt);
                for (Eigen::Index k = 0; k < d; ++k) {
                    const Eigen::Index i0 = off + k;
                    const Eigen::Index i1 = off + b + k;
                    q.hessian(i0, i0) += w;
                    q.hessian(i1, i1) += w;
                    q.hessian(i0, i1) -= w;
                    q.hessian(i1, i0) -= w;
                }
                break;
            }
            case TermKind::DualLinear:
                q.linear.segment(off, b) += t.dual;
                q.constant -= t.dual.dot(t.target);
                break;
            case TermKind::ConsensusPenalty:
                q.hessian.diagonal().segment(off, b).array() += t.rho;
                q.linear.segment(off, b) -= t.rho * t.target;
                q.constant += 0.5 * t.rho * t.target.squaredNorm();
                break;
        }
    }
    return q;
}

}  // namespace trajsplit
