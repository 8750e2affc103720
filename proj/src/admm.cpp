#include "trajsplit/admm.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <random>

#include "trajsplit/collision.hpp"
#include "trajsplit/worker_pool.hpp"

namespace trajsplit::admm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr int kCheckSamples = 5;

}  // namespace

void SplitConfig::validate(int num_waypoints) const {
    if (num_splits < 0) throw InvalidConfig("number of splits must be non-negative");
    if (num_splits >= num_waypoints - 1) {
        throw InvalidConfig("number of splits " + std::to_string(num_splits) +
                            " must be smaller than num_waypoints - 1 = " +
                            std::to_string(num_waypoints - 1));
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidConfig("rho must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidConfig("epsilon must be positive");
    if (max_admm_iterations < 1) throw InvalidConfig("max ADMM iterations must be at least 1");
    if (time_limit_seconds < 0.0) throw InvalidConfig("time limit must be non-negative");
    if (solver.max_outer_iterations < 1) throw InvalidConfig("NLP iteration limit must be at least 1");
    if (!(solver.feasibility_tolerance > 0.0)) throw InvalidConfig("feasibility tolerance must be positive");
    if (!(solver.step_tolerance > 0.0)) throw InvalidConfig("step tolerance must be positive");
    if (convexify.edge_samples < 0) throw InvalidConfig("edge samples must be non-negative");
}

std::vector<int> split_indices(int num_waypoints, int num_splits) {
    if (num_splits < 0 || num_splits >= num_waypoints - 1) {
        throw InvalidConfig("number of splits must satisfy 0 <= M < N - 1");
    }
    std::vector<int> s;
    s.reserve(static_cast<std::size_t>(num_splits));
    for (int i = 1; i <= num_splits; ++i) {
        const double pos = static_cast<double>(i) * (num_waypoints - 1) / (num_splits + 1);
        s.push_back(static_cast<int>(std::lround(pos)));
    }
    return s;
}

std::vector<SegmentLayout> split_uniform(int num_waypoints, int num_splits) {
    const auto s = split_indices(num_waypoints, num_splits);
    std::vector<SegmentLayout> out;
    int begin = 0;
    for (int i = 0; i <= num_splits; ++i) {
        SegmentLayout seg;
        seg.index = i;
        seg.begin = begin;
        seg.end = i < num_splits ? s[static_cast<std::size_t>(i)] : num_waypoints - 1;
        seg.leading_slack = i > 0;
        seg.trailing_split = i < num_splits;
        begin = seg.end;
        out.push_back(seg);
    }
    return out;
}

SegmentObjective build_segment_objective(const Scenario& scenario, const SegmentLayout& segment,
                                         const ConsensusState& consensus, double rho) {
    SegmentObjective obj;
    obj.layout = StateLayout::of(scenario);
    obj.num_waypoints = segment.num_waypoints();
    obj.dt = scenario.dt;
    const int last = obj.num_waypoints - 1;

    if (obj.layout.dynamics) {
        for (int j = 0; j <= last; ++j) {
            const bool half = (j == 0 && segment.leading_slack) || (j == last && segment.trailing_split);
            obj.terms.push_back({TermKind::StateCost, j, half ? 0.5 : 1.0, {}, {}, 0.0});
        }
    } else {
        for (int j = 0; j < last; ++j) obj.terms.push_back({TermKind::EdgeCost, j, 1.0, {}, {}, 0.0});
    }

    auto couple = [&](int waypoint, const Vec& dual, const Vec& target) {
        obj.terms.push_back({TermKind::DualLinear, waypoint, 1.0, dual, target, 0.0});
        obj.terms.push_back({TermKind::ConsensusPenalty, waypoint, 1.0, {}, target, rho});
    };
    if (segment.leading_slack) {
        const auto i = static_cast<std::size_t>(segment.index - 1);
        couple(0, consensus.y2.at(i), consensus.z.at(i));
    }
    if (segment.trailing_split) {
        const auto i = static_cast<std::size_t>(segment.index);
        couple(last, consensus.y1.at(i), consensus.z.at(i));
    }
    return obj;
}

Trajectory initial_trajectory(const Scenario& scenario, std::uint64_t seed) {
    Trajectory traj = straight_line_init(scenario);
    traj.states.front() = scenario.start;
    traj.states.back() = scenario.goal;
    if (seed == 0) return traj;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
        for (Eigen::Index k = 0; k < traj.dim(); ++k) traj.states[i].position[k] += jitter(rng);
    }
    return traj;
}

std::vector<SegmentProblem> make_segments(const Scenario& scenario, const Trajectory& init,
                                          int num_splits) {
    if (static_cast<int>(init.size()) != scenario.num_waypoints || init.dim() != scenario.robot.dof()) {
        throw DimensionMismatch("initial trajectory does not match the scenario");
    }
    std::vector<SegmentProblem> out;
    for (const auto& layout : split_uniform(scenario.num_waypoints, num_splits)) {
        SegmentProblem seg;
        seg.layout = layout;
        seg.states.assign(init.states.begin() + layout.begin, init.states.begin() + layout.end + 1);
        out.push_back(std::move(seg));
    }
    return out;
}

ConsensusState init_consensus(const Scenario& scenario, const std::vector<SegmentProblem>& segments) {
    const StateLayout layout = StateLayout::of(scenario);
    ConsensusState c;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        const Vec z = pack_state(segments[i].states.back(), layout);
        c.z.push_back(z);
        c.y1.push_back(Vec::Zero(z.size()));
        c.y2.push_back(Vec::Zero(z.size()));
    }
    return c;
}

void primal_update(std::vector<SegmentProblem>& segments, const ConsensusState& consensus,
                   const Scenario& scenario, const SplitConfig& config, WorkerPool* pool) {
    const StateLayout layout = StateLayout::of(scenario);
    const nlp::SequentialConvexSolver solver;
    auto solve_one = [&](std::size_t i) {
        SegmentProblem& seg = segments[i];
        const auto objective = build_segment_objective(scenario, seg.layout, consensus, config.rho);
        const auto problem = nlp::convexify_segment(scenario, seg.layout, objective,
                                                    pack_states(seg.states, layout), config.convexify);
        const auto sol = solver.solve(problem, config.solver);
        seg.states = unpack_states(sol.point, layout);
        seg.converged = sol.converged;
        seg.nlp_iterations = sol.iterations;
    };
    if (pool != nullptr && segments.size() > 1) {
        pool->parallel_for(segments.size(), solve_one);
    } else {
        for (std::size_t i = 0; i < segments.size(); ++i) solve_one(i);
    }
}

void consensus_update(const std::vector<SegmentProblem>& segments, ConsensusState& consensus,
                      const StateLayout& layout, double rho) {
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        const Vec xs = pack_state(segments[i].states.back(), layout);
        const Vec xps = pack_state(segments[i + 1].states.front(), layout);
        consensus.z[i] = 0.5 * (xs + xps);
        consensus.y1[i] += rho * (xs - consensus.z[i]);
        consensus.y2[i] += rho * (xps - consensus.z[i]);
    }
    ++consensus.iteration;
}

double splitting_residual(const std::vector<SegmentProblem>& segments) {
    if (segments.size() <= 1) return 0.0;
    const std::size_t m = segments.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sum += (segments[i].states.back().position - segments[i + 1].states.front().position).squaredNorm();
    }
    return std::sqrt(sum) / static_cast<double>(m);
}

Trajectory assemble_trajectory(const Scenario& scenario, const std::vector<SegmentProblem>& segments,
                               const ConsensusState& consensus) {
    const StateLayout layout = StateLayout::of(scenario);
    Trajectory traj;
    traj.dt = scenario.dt;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& states = segments[i].states;
        const std::size_t first = i == 0 ? 0 : 1;
        for (std::size_t j = first; j + 1 < states.size(); ++j) traj.states.push_back(states[j]);
        if (i + 1 < segments.size()) {
            traj.states.push_back(unpack_state(consensus.z[i], layout));
        } else {
            traj.states.push_back(states.back());
        }
    }
    if (!layout.dynamics) fill_finite_difference_derivatives(traj);
    return traj;
}

SolveReport run(const Scenario& scenario, const SplitConfig& config,
                const std::optional<Trajectory>& warm_start, const Observer& observer) {
    scenario.validate();
    config.validate(scenario.num_waypoints);
    const StateLayout layout = StateLayout::of(scenario);

    const auto t0 = Clock::now();
    Trajectory init = warm_start ? *warm_start : initial_trajectory(scenario, config.seed);
    if (warm_start) {
        init.states.front() = scenario.start;
        init.states.back() = scenario.goal;
    }
    auto segments = make_segments(scenario, init, config.num_splits);
    ConsensusState consensus = init_consensus(scenario, segments);

    std::unique_ptr<WorkerPool> pool;
    if (config.parallel && segments.size() > 1) {
        const std::size_t threads = config.threads > 0 ? config.threads : WorkerPool::default_threads();
        if (threads > 1) pool = std::make_unique<WorkerPool>(std::min(threads, segments.size()));
    }

    SolveReport report;
    for (int k = 0; k < config.max_admm_iterations; ++k) {
        IterationRecord rec;
        const auto tp = Clock::now();
        primal_update(segments, consensus, scenario, config, pool.get());
        rec.primal_seconds = seconds_since(tp);
        const auto tc = Clock::now();
        consensus_update(segments, consensus, layout, config.rho);
        rec.residual = splitting_residual(segments);
        consensus.residual_history.push_back(rec.residual);
        rec.consensus_seconds = seconds_since(tc);
        rec.cumulative_seconds = seconds_since(t0);
        for (const auto& seg : segments) rec.nonconverged_segments += seg.converged ? 0 : 1;

        report.primal_seconds += rec.primal_seconds;
        report.consensus_seconds += rec.consensus_seconds;
        report.nonconverged_segment_solves += rec.nonconverged_segments;
        report.residuals.push_back(rec.residual);
        report.iterations_log.push_back(rec);
        report.iterations = k + 1;
        if (observer) observer(consensus, segments);

        if (rec.residual <= config.epsilon) {
            report.converged = true;
            break;
        }
        if (config.time_limit_seconds > 0.0 && rec.cumulative_seconds > config.time_limit_seconds) {
            report.timed_out = true;
            break;
        }
    }

    report.trajectory = assemble_trajectory(scenario, segments, consensus);
    report.wall_seconds = seconds_since(t0);
    if (config.time_limit_seconds > 0.0 && report.wall_seconds > config.time_limit_seconds) {
        report.timed_out = true;
    }
    report.objective = layout.dynamics ? objective_cost(report.trajectory) : path_energy(report.trajectory);
    report.path_length = path_length(report.trajectory);
    report.collision_free = trajectory_collision_free(scenario, report.trajectory, kCheckSamples);
    return report;
}

}  // namespace trajsplit::admm
