#include "trajsplit/nlp.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

#include "trajsplit/qp.hpp"

namespace trajsplit::nlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlackRegularization = 1e-6;

std::vector<InequalityRow> evaluate_rows(const NlpProblem& problem, const Vec& x) {
    if (!problem.inequalities) return {};
    auto rows = problem.inequalities(x);
    for (const auto& r : rows) {
        if (!std::isfinite(r.value) || r.gradient.size() != problem.dimension ||
            !r.gradient.allFinite()) {
            throw EvaluatorError("inequality evaluator returned a non-finite or mis-sized row");
        }
    }
    return rows;
}

double row_violation_sum(const std::vector<InequalityRow>& rows) {
    double total = 0.0;
    for (const auto& r : rows) total += std::max(0.0, -r.value);
    return total;
}

double max_row_violation(const std::vector<InequalityRow>& rows) {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, -r.value);
    return worst;
}

double checked_objective(const NlpProblem& problem, const Vec& x) {
    const double f = problem.objective.value(x);
    if (!std::isfinite(f)) throw EvaluatorError("objective evaluated to a non-finite value");
    return f;
}

// x = particular + basis · u parameterizes {x : pins hold, A x = b}.
struct Reduction {
    std::vector<Eigen::Index> free;
    Vec full_particular;  // pinned entries exact, free entries minimum-norm
    Mat basis;            // dimension x r, rows of pinned variables are zero
    bool consistent = true;
};

Reduction reduce(const NlpProblem& problem) {
    const Eigen::Index n = problem.dimension;
    Reduction red;
    red.full_particular = Vec::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (problem.lower[j] == problem.upper[j]) {
            red.full_particular[j] = problem.lower[j];
        } else {
            red.free.push_back(j);
        }
    }
    const auto nf = static_cast<Eigen::Index>(red.free.size());
    const Eigen::Index m = problem.equalities.matrix.rows();

    Mat a_free(m, nf);
    for (Eigen::Index k = 0; k < nf; ++k) a_free.col(k) = problem.equalities.matrix.col(red.free[static_cast<std::size_t>(k)]);
    Vec rhs = m > 0 ? Vec(problem.equalities.rhs - problem.equalities.matrix * red.full_particular)
                    : Vec::Zero(0);

    Mat basis_free;
    Vec particular_free = Vec::Zero(nf);
    if (m == 0 || nf == 0) {
        basis_free = Mat::Identity(nf, nf);
        if (m > 0 && rhs.lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + problem.equalities.rhs.lpNorm<Eigen::Infinity>())) {
            red.consistent = false;
        }
    } else {
        Eigen::ColPivHouseholderQR<Mat> qr(a_free.transpose());
        qr.setThreshold(1e-12);
        const Eigen::Index rank = qr.rank();
        const Mat q = qr.householderQ();
        basis_free = q.rightCols(nf - rank);
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(a_free);
        cod.setThreshold(1e-12);
        particular_free = cod.solve(rhs);
        const double residual = (a_free * particular_free - rhs).lpNorm<Eigen::Infinity>();
        if (residual > 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) red.consistent = false;
    }
    red.basis = Mat::Zero(n, basis_free.cols());
    for (Eigen::Index k = 0; k < nf; ++k) {
        const Eigen::Index j = red.free[static_cast<std::size_t>(k)];
        red.basis.row(j) = basis_free.row(k);
        red.full_particular[j] = particular_free[k];
    }
    return red;
}

Vec snap_pins(const NlpProblem& problem, Vec x) {
    for (Eigen::Index j = 0; j < problem.dimension; ++j) {
        if (problem.lower[j] == problem.upper[j]) x[j] = problem.lower[j];
    }
    return x;
}

double bound_violation(const NlpProblem& problem, const Vec& x) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < problem.dimension; ++j) {
        worst = std::max({worst, problem.lower[j] - x[j], x[j] - problem.upper[j]});
    }
    return worst;
}

// Rows (in u-space) of the finite, non-pinned variable bounds around x.
void append_bound_rows(const NlpProblem& problem, const Reduction& red, const Vec& x,
                       std::vector<Vec>& rows, std::vector<double>& rhs) {
    for (Eigen::Index j : red.free) {
        const Vec zj = red.basis.row(j).transpose();
        if (std::isfinite(problem.lower[j])) {
            rows.push_back(zj);
            rhs.push_back(problem.lower[j] - x[j]);
        }
        if (std::isfinite(problem.upper[j])) {
            rows.push_back(-zj);
            rhs.push_back(x[j] - problem.upper[j]);
        }
    }
}

Mat stack_rows(const std::vector<Vec>& rows, Eigen::Index cols) {
    Mat m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

qp::Result solve_regularized(qp::Problem& p) {
    qp::Result res = qp::solve(p);
    double reg = 1e-10 * (1.0 + p.hessian.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; res.status == qp::Status::NotConvex && attempt < 8; ++attempt) {
        p.hessian.diagonal().array() += reg;
        reg *= 100.0;
        res = qp::solve(p);
    }
    return res;
}

NlpSolution finish(const NlpProblem& problem, Vec x, bool converged, int iterations,
                   std::vector<OuterIterate> history, double feasibility_tolerance) {
    NlpSolution sol;
    sol.point = snap_pins(problem, std::move(x));
    sol.objective = problem.objective.value(sol.point);
    sol.max_equality_violation = equality_violation(problem, sol.point);
    sol.max_inequality_violation = inequality_violation(problem, sol.point);
    sol.iterations = iterations;
    sol.history = std::move(history);
    sol.converged = converged && sol.max_inequality_violation <= feasibility_tolerance &&
                    sol.max_equality_violation <= feasibility_tolerance;
    return sol;
}

}  // namespace

QuadraticObjective QuadraticObjective::zero(Eigen::Index n) {
    return {Mat::Zero(n, n), Vec::Zero(n), 0.0};
}

double QuadraticObjective::value(const Vec& x) const {
    return 0.5 * x.dot(hessian * x) + linear.dot(x) + constant;
}

Vec QuadraticObjective::gradient(const Vec& x) const { return hessian * x + linear; }

void NlpProblem::validate() const {
    const Eigen::Index n = dimension;
    if (n <= 0) throw InvalidConfig("nlp: dimension must be positive");
    if (objective.hessian.rows() != n || objective.hessian.cols() != n ||
        objective.linear.size() != n) {
        throw DimensionMismatch("nlp: objective dimension");
    }
    if (equalities.matrix.rows() != equalities.rhs.size() ||
        (equalities.matrix.rows() > 0 && equalities.matrix.cols() != n)) {
        throw DimensionMismatch("nlp: equality dimension");
    }
    if (lower.size() != n || upper.size() != n || initial.size() != n) {
        throw DimensionMismatch("nlp: bounds/initial dimension");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(lower[j] <= upper[j])) throw InvalidConfig("nlp: lower bound exceeds upper bound");
    }
    for (Eigen::Index j : trust_region_variables) {
        if (j < 0 || j >= n) throw InvalidConfig("nlp: trust-region variable out of range");
    }
    if (!initial.allFinite()) throw EvaluatorError("nlp: initial point is not finite");
}

double equality_violation(const NlpProblem& problem, const Vec& x) {
    if (problem.equalities.matrix.rows() == 0) return 0.0;
    return (problem.equalities.matrix * x - problem.equalities.rhs).lpNorm<Eigen::Infinity>();
}

double inequality_violation(const NlpProblem& problem, const Vec& x) {
    double worst = std::max(0.0, bound_violation(problem, x));
    for (const auto& r : evaluate_rows(problem, x)) worst = std::max(worst, -r.value);
    return worst;
}

NlpSolution SequentialConvexSolver::solve(const NlpProblem& problem,
                                          const SolverOptions& options) const {
    problem.validate();
    const Reduction red = reduce(problem);
    const Eigen::Index r = red.basis.cols();
    std::vector<OuterIterate> history;

    // Project the initial point onto the affine set.
    Vec x = red.full_particular;
    if (r > 0) x += red.basis * (red.basis.transpose() * (problem.initial - red.full_particular));
    if (!red.consistent) return finish(problem, x, false, 0, std::move(history), options.feasibility_tolerance);

    // Restore bound feasibility when the projection left it.
    if (r > 0 && bound_violation(problem, x) > 0.0) {
        std::vector<Vec> rows;
        std::vector<double> rhs;
        append_bound_rows(problem, red, x, rows, rhs);
        qp::Problem proj{Mat::Identity(r, r), Vec::Zero(r), Mat(0, r), Vec(0), stack_rows(rows, r),
                         Eigen::Map<const Vec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()))};
        const auto res = qp::solve(proj);
        if (res.status != qp::Status::Optimal) return finish(problem, x, false, 0, std::move(history), options.feasibility_tolerance);
        x += red.basis * res.x;
    }
    if (r == 0) {
        return finish(problem, x, true, 0, std::move(history), options.feasibility_tolerance);
    }

    const bool nonlinear = static_cast<bool>(problem.inequalities);
    std::vector<Eigen::Index> trust_vars;
    if (nonlinear) {
        if (problem.trust_region_variables.empty()) {
            trust_vars = red.free;
        } else {
            for (Eigen::Index j : problem.trust_region_variables) {
                if (problem.lower[j] != problem.upper[j]) trust_vars.push_back(j);
            }
        }
    }

    const Mat reduced_hessian = red.basis.transpose() * problem.objective.hessian * red.basis;
    double penalty = options.initial_penalty;
    double radius = nonlinear ? options.initial_trust_radius : kInf;
    auto rows = evaluate_rows(problem, x);
    double f = checked_objective(problem, x);
    double merit = f + penalty * row_violation_sum(rows);
    int iterations = 0;
    bool converged = false;

    while (true) {
        bool stalled = false;
        while (!stalled && iterations < options.max_outer_iterations) {
            ++iterations;
            const auto k = static_cast<Eigen::Index>(rows.size());
            const Eigen::Index dim = r + k;

            qp::Problem sub;
            sub.hessian = Mat::Zero(dim, dim);
            sub.hessian.topLeftCorner(r, r) = reduced_hessian;
            sub.hessian.diagonal().tail(k).setConstant(kSlackRegularization);
            sub.linear = Vec::Zero(dim);
            const Vec grad = problem.objective.gradient(x);
            sub.linear.head(r) = red.basis.transpose() * grad;
            sub.linear.tail(k).setConstant(penalty);
            sub.eq_matrix = Mat(0, dim);
            sub.eq_rhs = Vec(0);

            std::vector<Vec> ineq;
            std::vector<double> ineq_rhs;
            std::vector<Vec> row_dirs;  // reduced gradients of the modelled rows
            for (Eigen::Index i = 0; i < k; ++i) {
                const auto& row = rows[static_cast<std::size_t>(i)];
                Vec a = Vec::Zero(dim);
                a.head(r) = red.basis.transpose() * row.gradient;
                row_dirs.push_back(a.head(r));
                a[r + i] = 1.0;
                ineq.push_back(a);
                ineq_rhs.push_back(-row.value);
                Vec s = Vec::Zero(dim);
                s[r + i] = 1.0;
                ineq.push_back(s);
                ineq_rhs.push_back(0.0);
            }
            {
                std::vector<Vec> brow;
                std::vector<double> brhs;
                append_bound_rows(problem, red, x, brow, brhs);
                for (std::size_t i = 0; i < brow.size(); ++i) {
                    Vec a = Vec::Zero(dim);
                    a.head(r) = brow[i];
                    ineq.push_back(a);
                    ineq_rhs.push_back(brhs[i]);
                }
            }
            if (std::isfinite(radius)) {
                for (Eigen::Index j : trust_vars) {
                    Vec a = Vec::Zero(dim);
                    a.head(r) = red.basis.row(j).transpose();
                    ineq.push_back(a);
                    ineq_rhs.push_back(-radius);
                    ineq.push_back(-a);
                    ineq_rhs.push_back(-radius);
                }
            }
            sub.ineq_matrix = stack_rows(ineq, dim);
            sub.ineq_rhs = Eigen::Map<const Vec>(ineq_rhs.data(), static_cast<Eigen::Index>(ineq_rhs.size()));

            const qp::Result res = solve_regularized(sub);
            if (res.status != qp::Status::Optimal) {
                // Numerical trouble in the convex model; shrink and retry.
                radius = std::isfinite(radius) ? radius * options.trust_shrink : options.initial_trust_radius;
                if (radius < options.step_tolerance) stalled = true;
                continue;
            }
            const Vec du = res.x.head(r);
            const Vec dx = red.basis * du;

            double model_violation = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                model_violation += std::max(0.0, -(rows[static_cast<std::size_t>(i)].value +
                                                   row_dirs[static_cast<std::size_t>(i)].dot(du)));
            }
            const double model_f = f + grad.dot(dx) + 0.5 * du.dot(reduced_hessian * du);
            const double model_merit = model_f + penalty * model_violation;
            const double model_improve = merit - model_merit;

            double step_norm = 0.0;
            for (Eigen::Index j : trust_vars) step_norm = std::max(step_norm, std::abs(dx[j]));
            if (!nonlinear) step_norm = dx.lpNorm<Eigen::Infinity>();

            OuterIterate it;
            it.merit = merit;
            it.model_merit = model_merit;
            it.penalty = penalty;
            it.trust_radius = radius;
            it.step_norm = step_norm;

            const double tolerance = max_row_violation(rows) > options.feasibility_tolerance
                                         ? options.infeasible_improvement_tolerance
                                         : options.improvement_tolerance;
            if (model_improve <= tolerance * (1.0 + std::abs(merit)) ||
                dx.lpNorm<Eigen::Infinity>() <= options.step_tolerance * 1e-3) {
                it.trial_merit = merit;
                history.push_back(it);
                stalled = true;
                break;
            }

            const Vec x_trial = x + dx;
            const auto trial_rows = evaluate_rows(problem, x_trial);
            const double f_trial = checked_objective(problem, x_trial);
            const double trial_merit = f_trial + penalty * row_violation_sum(trial_rows);
            it.trial_merit = trial_merit;
            const double ratio = (merit - trial_merit) / model_improve;

            if (ratio > options.bad_ratio) {
                x = x_trial;
                rows = trial_rows;
                f = f_trial;
                merit = trial_merit;
                it.accepted = true;
                if (ratio > options.good_ratio && std::isfinite(radius)) radius *= options.trust_expand;
            } else {
                radius *= options.trust_shrink;
            }
            history.push_back(it);

            if (!nonlinear && it.accepted) {
                stalled = true;  // the quadratic model is exact
            } else if (radius <= options.step_tolerance || (it.accepted && step_norm <= 1e-2 * options.step_tolerance)) {
                stalled = true;
            }
        }

        const double violation = std::max(bound_violation(problem, x), max_row_violation(rows));
        if (violation <= options.feasibility_tolerance) {
            converged = stalled;
            break;
        }
        if (iterations >= options.max_outer_iterations || penalty >= options.max_penalty) break;
        penalty = std::min(penalty * options.penalty_growth, options.max_penalty);
        radius = std::max(radius, options.initial_trust_radius);
        merit = f + penalty * row_violation_sum(rows);
    }

    return finish(problem, x, converged, iterations, std::move(history),
                  options.feasibility_tolerance);
}

NlpSolution solve(const NlpProblem& problem, const SolverOptions& options) {
    return SequentialConvexSolver{}.solve(problem, options);
}

}  // namespace trajsplit::nlp
