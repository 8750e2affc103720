#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trajsplit/admm.hpp"

namespace trajsplit::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNotConverged = 2,
    kCollision = 3,
};

// Depends on the report flags only.
int exit_code(const admm::SolveReport& report);

std::string summary_line(const admm::SolveReport& report);

struct SolveArgs {
    std::filesystem::path scenario;
    admm::SplitConfig config;
    // Report JSON; the per-iteration table goes next to it as <out>.iterations.csv.
    std::optional<std::filesystem::path> out;
};

struct SweepArgs {
    std::filesystem::path scenario;
    std::vector<int> splits;
    std::vector<double> eps;
    int repeats = 1;
    admm::SplitConfig config;
    std::optional<std::filesystem::path> out;
};

struct BenchArgs {
    std::filesystem::path scenario_dir;
    std::vector<std::string> planners{"split3", "split5", "mono"};
    double time_limit = 5.0;
    admm::SplitConfig config;
    // Per-problem rows; the summary goes to <stem>.summary.csv next to it.
    std::optional<std::filesystem::path> out;
};

struct SweepRow {
    int splits = 0;
    double eps = 0.0;
    int repeat = 0;
    double wall_seconds = 0.0;
    int iterations = 0;
    double path_length = 0.0;
    double residual = 0.0;
    bool collision_free = false;
};

struct BenchRow {
    std::string planner;
    std::string scenario;
    bool success = false;
    bool converged = false;
    bool collision_free = false;
    bool timed_out = false;
    double wall_seconds = 0.0;
    int iterations = 0;
    double path_length = 0.0;
};

struct BenchSummary {
    std::string planner;
    int problems = 0;
    int successes = 0;
    double average_seconds = 0.0;
    double average_path_length = 0.0;  // over successful runs
};

// "mono" is M = 0; "splitK" is K segments, M = K - 1. Throws InvalidConfig.
int planner_splits(const std::string& planner);

std::vector<SweepRow> run_sweep(const Scenario& scenario, const SweepArgs& args);
std::vector<BenchRow> run_bench(const std::vector<std::filesystem::path>& scenarios,
                                const BenchArgs& args);
std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows,
                                    const std::vector<std::string>& planners);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string summary_csv(const std::vector<BenchSummary>& summary);

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trajsplit::cli
