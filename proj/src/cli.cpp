#include "trajsplit/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "trajsplit/scenario_io.hpp"

namespace trajsplit::cli {

namespace {

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
    return path.parent_path() / (path.filename().string() + suffix);
}

std::filesystem::path summary_path(const std::filesystem::path& out) {
    return out.parent_path() / (out.stem().string() + ".summary.csv");
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void add_common(CLI::App* cmd, admm::SplitConfig& c) {
    cmd->add_option("--rho", c.rho, "ADMM penalty weight")->capture_default_str();
    cmd->add_option("--max-iters", c.max_admm_iterations, "ADMM iteration limit")->capture_default_str();
    cmd->add_flag("--serial", [&c](std::int64_t) { c.parallel = false; }, "Solve segments serially");
    cmd->add_option("--seed", c.seed, "Initial-path jitter seed (0 disables jitter)")->capture_default_str();
    cmd->add_option("--nlp-max-iters", c.solver.max_outer_iterations, "Subproblem outer iteration limit")
        ->capture_default_str();
    cmd->add_option("--feas-tol", c.solver.feasibility_tolerance, "Subproblem feasibility tolerance")
        ->capture_default_str();
    cmd->add_option("--step-tol", c.solver.step_tolerance, "Subproblem step tolerance")->capture_default_str();
}

}  // namespace

int exit_code(const admm::SolveReport& report) {
    if (!report.converged) return kNotConverged;
    if (!report.collision_free) return kCollision;
    return kOk;
}

std::string summary_line(const admm::SolveReport& report) {
    std::ostringstream s;
    s << "converged=" << yes_no(report.converged) << " iterations=" << report.iterations
      << " residual=" << std::setprecision(6) << (report.residuals.empty() ? 0.0 : report.residuals.back())
      << " path_length=" << report.path_length << " wall_seconds=" << report.wall_seconds
      << " collision_free=" << yes_no(report.collision_free);
    return s.str();
}

int planner_splits(const std::string& planner) {
    if (planner == "mono") return 0;
    if (planner.rfind("split", 0) == 0 && planner.size() > 5) {
        const std::string digits = planner.substr(5);
        if (std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            const int segments = std::stoi(digits);
            if (segments >= 1) return segments - 1;
        }
    }
    throw InvalidConfig("unknown planner \"" + planner + "\" (expected mono or splitK)");
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, const SweepArgs& args) {
    if (args.splits.empty() || args.eps.empty()) throw InvalidConfig("sweep lists must be non-empty");
    if (args.repeats < 1) throw InvalidConfig("repeats must be at least 1");
    std::vector<SweepRow> rows;
    for (int m : args.splits) {
        for (double eps : args.eps) {
            for (int r = 0; r < args.repeats; ++r) {
                admm::SplitConfig cfg = args.config;
                cfg.num_splits = m;
                cfg.epsilon = eps;
                if (cfg.seed != 0) cfg.seed += static_cast<std::uint64_t>(r);
                const auto rep = admm::run(scenario, cfg);
                rows.push_back({m, eps, r, rep.wall_seconds, rep.iterations, rep.path_length,
                                rep.residuals.empty() ? 0.0 : rep.residuals.back(), rep.collision_free});
            }
        }
    }
    return rows;
}

std::vector<BenchRow> run_bench(const std::vector<std::filesystem::path>& scenarios,
                                const BenchArgs& args) {
    std::vector<int> splits;
    for (const auto& p : args.planners) splits.push_back(planner_splits(p));
    if (!(args.time_limit > 0.0)) throw InvalidConfig("time limit must be positive");
    std::vector<BenchRow> rows;
    for (const auto& path : scenarios) {
        const Scenario scenario = io::load_scenario(path);
        for (std::size_t k = 0; k < args.planners.size(); ++k) {
            BenchRow row;
            row.planner = args.planners[k];
            row.scenario = path.filename().string();
            admm::SplitConfig cfg = args.config;
            cfg.num_splits = splits[k];
            cfg.time_limit_seconds = args.time_limit;
            try {
                const auto rep = admm::run(scenario, cfg);
                row.converged = rep.converged;
                row.collision_free = rep.collision_free;
                row.timed_out = rep.timed_out;
                row.wall_seconds = rep.wall_seconds;
                row.iterations = rep.iterations;
                row.path_length = rep.path_length;
                row.success = rep.converged && rep.collision_free && !rep.timed_out;
            } catch (const InvalidConfig&) {
                row.success = false;  // planner does not fit this waypoint count
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows,
                                    const std::vector<std::string>& planners) {
    std::vector<BenchSummary> out;
    for (const auto& p : planners) {
        BenchSummary s;
        s.planner = p;
        double time_sum = 0.0;
        double length_sum = 0.0;
        for (const auto& r : rows) {
            if (r.planner != p) continue;
            ++s.problems;
            time_sum += r.wall_seconds;
            if (r.success) {
                ++s.successes;
                length_sum += r.path_length;
            }
        }
        if (s.problems > 0) s.average_seconds = time_sum / s.problems;
        if (s.successes > 0) s.average_path_length = length_sum / s.successes;
        out.push_back(s);
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream s;
    s << "splits,eps,repeat,wall_seconds,iterations,path_length,residual,collision_free\n";
    for (const auto& r : rows) {
        s << r.splits << ',' << fmt(r.eps) << ',' << r.repeat << ',' << fmt(r.wall_seconds) << ','
          << r.iterations << ',' << fmt(r.path_length) << ',' << fmt(r.residual) << ','
          << yes_no(r.collision_free) << '\n';
    }
    return s.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream s;
    s << "planner,scenario,success,converged,collision_free,timed_out,wall_seconds,iterations,path_length\n";
    for (const auto& r : rows) {
        s << r.planner << ',' << r.scenario << ',' << yes_no(r.success) << ',' << yes_no(r.converged)
          << ',' << yes_no(r.collision_free) << ',' << yes_no(r.timed_out) << ',' << fmt(r.wall_seconds)
          << ',' << r.iterations << ',' << fmt(r.path_length) << '\n';
    }
    return s.str();
}

std::string summary_csv(const std::vector<BenchSummary>& summary) {
    std::ostringstream s;
    s << "planner,problems,success_count,average_seconds,average_path_length\n";
    for (const auto& r : summary) {
        s << r.planner << ',' << r.problems << ',' << r.successes << ',' << fmt(r.average_seconds) << ','
          << fmt(r.average_path_length) << '\n';
    }
    return s.str();
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    admm::SolveReport report;
    try {
        scenario = io::load_scenario(args.scenario);
        report = admm::run(scenario, args.config);
    } catch (const InvalidScenario& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const InvalidConfig& e) {
        err << "error: invalid config: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    if (args.out) {
        try {
            io::write_file(*args.out, io::report_json(report, args.config));
            io::write_file(sibling(*args.out, ".iterations.csv"), io::iterations_csv(report));
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kInputError;
        }
    }
    out << summary_line(report) << '\n';
    return exit_code(report);
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<SweepRow> rows;
    try {
        const Scenario scenario = io::load_scenario(args.scenario);
        rows = run_sweep(scenario, args);
        const std::string csv = sweep_csv(rows);
        if (args.out) {
            io::write_file(*args.out, csv);
        } else {
            out << csv;
        }
    } catch (const InvalidConfig& e) {
        err << "error: invalid config: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    if (args.out) out << "wrote " << rows.size() << " rows to " << args.out->string() << '\n';
    return kOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    if (std::filesystem::is_directory(args.scenario_dir, ec)) {
        for (const auto& entry : std::filesystem::directory_iterator(args.scenario_dir, ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        err << "error: no scenario files in " << args.scenario_dir.string() << '\n';
        return kInputError;
    }
    try {
        const auto rows = run_bench(files, args);
        const auto summary = summarize(rows, args.planners);
        if (args.out) {
            io::write_file(*args.out, bench_csv(rows));
            io::write_file(summary_path(*args.out), summary_csv(summary));
        } else {
            out << bench_csv(rows);
        }
        out << summary_csv(summary);
    } catch (const InvalidConfig& e) {
        err << "error: invalid config: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trajectory optimization by splitting into ADMM-coupled segments"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario");
    solve_cmd->add_option("scenario", solve.scenario, "Scenario JSON file")->required();
    solve_cmd->add_option("--splits", solve.config.num_splits, "Number of split points M")->capture_default_str();
    solve_cmd->add_option("--eps", solve.config.epsilon, "Splitting tolerance")->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "Report JSON path");
    add_common(solve_cmd, solve.config);

    SweepArgs sweep;
    sweep.splits = {2, 3, 5};
    sweep.eps = {0.05, 0.1, 0.17};
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep split counts and tolerances");
    sweep_cmd->add_option("scenario", sweep.scenario, "Scenario JSON file")->required();
    sweep_cmd->add_option("--splits-list", sweep.splits, "Comma-separated split counts")->delimiter(',');
    sweep_cmd->add_option("--eps-list", sweep.eps, "Comma-separated tolerances")->delimiter(',');
    sweep_cmd->add_option("--repeats", sweep.repeats, "Runs per combination")->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "CSV output path");
    add_common(sweep_cmd, sweep.config);

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run planners over a scenario directory");
    bench_cmd->add_option("scenario_dir", bench.scenario_dir, "Directory of scenario JSON files")->required();
    bench_cmd->add_option("--planners", bench.planners, "Comma-separated planners (mono, splitK)")
        ->delimiter(',');
    bench_cmd->add_option("--time-limit", bench.time_limit, "Per-run wall-clock limit in seconds")
        ->capture_default_str();
    bench_cmd->add_option("--eps", bench.config.epsilon, "Splitting tolerance")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Per-problem CSV path");
    add_common(bench_cmd, bench.config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }
    if (solve_cmd->parsed()) return cmd_solve(solve, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
    return cmd_bench(bench, out, err);
}

}  // namespace trajsplit::cli
