#pragma once

#include "trajsplit/collision.hpp"
#include "trajsplit/nlp.hpp"
#include "trajsplit/segment.hpp"

namespace trajsplit::nlp {

struct ConvexifyOptions {
    // Surrogates require sd >= safety_margin + clearance_buffer, so active
    // constraints still pass the strict clearance check.
    double clearance_buffer = 1e-3;
    // Interpolated configurations constrained per edge, matching the checker.
    // Point robots skip them: the swept constraint already covers the edge.
    int edge_samples = 5;
    // One constraint per edge on the hull of the body at both ends.
    bool swept_edges = true;
    // Pairs with sd above this are omitted; negative selects 3·margin + 0.2.
    double activation_distance = -1.0;

    [[nodiscard]] double activation_for(const Scenario& scenario) const noexcept {
        return activation_distance >= 0.0 ? activation_distance
                                          : 3.0 * scenario.safety_margin + 0.2;
    }
};

// NLP over the segment's stacked waypoint blocks: the objective's quadratic,
// double-integrator equalities on every edge (dynamics mode), pinned boundary
// states, joint-limit bounds and linearized collision surrogates.
NlpProblem convexify_segment(const Scenario& scenario, const SegmentLayout& segment,
                             const SegmentObjective& objective, const Vec& iterate,
                             const ConvexifyOptions& options = {});

}  // namespace trajsplit::nlp
