#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "trajsplit/convexify.hpp"
#include "trajsplit/model.hpp"
#include "trajsplit/nlp.hpp"
#include "trajsplit/segment.hpp"

namespace trajsplit {
class WorkerPool;
}

namespace trajsplit::admm {

struct SplitConfig {
    int num_splits = 2;  // M
    double rho = 50.0;
    double epsilon = 0.1745;
    int max_admm_iterations = 100;
    bool parallel = true;
    // Wall-clock budget checked between iterations; 0 disables it.
    double time_limit_seconds = 0.0;
    // Non-zero seeds jitter the interior initial waypoints by up to ±1e-3.
    std::uint64_t seed = 0;
    // Worker count for parallel primal updates; 0 selects WorkerPool::default_threads().
    std::size_t threads = 0;
    nlp::SolverOptions solver;
    nlp::ConvexifyOptions convexify;

    // Throws InvalidConfig; needs the waypoint count to bound M.
    void validate(int num_waypoints) const;
};

struct SegmentProblem {
    SegmentLayout layout;
    std::vector<RobotState> states;  // one per waypoint of the layout
    bool converged = true;           // last subproblem solve
    int nlp_iterations = 0;
};

// Split-point globals and duals, stored as layout blocks (full state with
// dynamics, positions otherwise). y1 pairs with x_s, y2 with the slack x'_s.
struct ConsensusState {
    std::vector<Vec> z;
    std::vector<Vec> y1;
    std::vector<Vec> y2;
    int iteration = 0;
    std::vector<double> residual_history;
};

struct IterationRecord {
    double residual = 0.0;
    double cumulative_seconds = 0.0;
    double primal_seconds = 0.0;
    double consensus_seconds = 0.0;
    int nonconverged_segments = 0;
};

struct SolveReport {
    Trajectory trajectory;
    std::vector<double> residuals;
    std::vector<IterationRecord> iterations_log;
    int iterations = 0;
    double wall_seconds = 0.0;
    double primal_seconds = 0.0;
    double consensus_seconds = 0.0;
    double objective = 0.0;
    double path_length = 0.0;
    bool collision_free = false;
    bool converged = false;
    bool timed_out = false;
    int nonconverged_segment_solves = 0;
};

// 0-based split waypoint indices s_i - 1 for i = 1..M.
std::vector<int> split_indices(int num_waypoints, int num_splits);

// M + 1 segments abutting at the split indices. Throws InvalidConfig unless
// 0 <= M < N - 1.
std::vector<SegmentLayout> split_uniform(int num_waypoints, int num_splits);

SegmentObjective build_segment_objective(const Scenario& scenario, const SegmentLayout& segment,
                                         const ConsensusState& consensus, double rho);

// Straight-line initialization with the scenario boundary states at both ends,
// plus the seeded interior jitter.
Trajectory initial_trajectory(const Scenario& scenario, std::uint64_t seed);

ConsensusState init_consensus(const Scenario& scenario, const std::vector<SegmentProblem>& segments);

std::vector<SegmentProblem> make_segments(const Scenario& scenario, const Trajectory& init,
                                          int num_splits);

// Solves every segment once. Runs on `pool` when given, otherwise serially.
void primal_update(std::vector<SegmentProblem>& segments, const ConsensusState& consensus,
                   const Scenario& scenario, const SplitConfig& config, WorkerPool* pool = nullptr);

// z = average of the split pair, then y += ρ(x - z) for both copies.
void consensus_update(const std::vector<SegmentProblem>& segments, ConsensusState& consensus,
                      const StateLayout& layout, double rho);

// (1/M)·sqrt(Σ‖q_s - q'_s‖²) on positions; 0 when M = 0.
double splitting_residual(const std::vector<SegmentProblem>& segments);

// Joins the segments, writing z_i at each split point.
Trajectory assemble_trajectory(const Scenario& scenario, const std::vector<SegmentProblem>& segments,
                               const ConsensusState& consensus);

// Called after every consensus update.
using Observer = std::function<void(const ConsensusState&, const std::vector<SegmentProblem>&)>;

SolveReport run(const Scenario& scenario, const SplitConfig& config,
                const std::optional<Trajectory>& warm_start = std::nullopt,
                const Observer& observer = {});

}  // namespace trajsplit::admm
