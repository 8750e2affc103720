#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "trajsplit/model.hpp"

namespace trajsplit::nlp {

// ½ xᵀ H x + gᵀ x + c
struct QuadraticObjective {
    Mat hessian;
    Vec linear;
    double constant = 0.0;

    static QuadraticObjective zero(Eigen::Index n);
    [[nodiscard]] double value(const Vec& x) const;
    [[nodiscard]] Vec gradient(const Vec& x) const;
};

// matrix · x = rhs
struct AffineEqualities {
    Mat matrix;
    Vec rhs;
};

// One inequality g(x) >= 0 linearized at the evaluation point x:
// g(x') ≈ value + gradient · (x' - x).
struct InequalityRow {
    double value = 0.0;
    Vec gradient;
};

// Returns the rows worth modelling at x. Constraints omitted from the result
// must be satisfied with margin at x; they contribute no penalty.
using InequalityEvaluator = std::function<std::vector<InequalityRow>(const Vec& x)>;

struct NlpProblem {
    Eigen::Index dimension = 0;
    QuadraticObjective objective;
    AffineEqualities equalities;
    InequalityEvaluator inequalities;  // empty when there are no nonlinear constraints
    Vec lower;
    Vec upper;
    Vec initial;
    // Variables limited by the trust region; empty means all of them.
    std::vector<Eigen::Index> trust_region_variables;

    void validate() const;
};

struct SolverOptions {
    int max_outer_iterations = 50;
    double feasibility_tolerance = 1e-4;
    double step_tolerance = 1e-4;
    // Stop once the predicted merit decrease falls below this fraction of the merit.
    double improvement_tolerance = 1e-9;
    // Same test while a constraint is violated; ends the round so the penalty grows.
    double infeasible_improvement_tolerance = 1e-5;

    double initial_penalty = 10.0;
    double penalty_growth = 10.0;
    double max_penalty = 1e6;

    double initial_trust_radius = 0.1;
    double trust_expand = 1.5;
    double trust_shrink = 0.25;
    double good_ratio = 0.75;
    double bad_ratio = 0.25;
};

struct OuterIterate {
    double merit = 0.0;  // merit at the point the step was taken from
    double model_merit = 0.0;
    double trial_merit = 0.0;
    double penalty = 0.0;
    double trust_radius = 0.0;
    double step_norm = 0.0;  // ∞-norm over trust-region variables
    bool accepted = false;
};

struct NlpSolution {
    Vec point;
    double objective = 0.0;
    double max_equality_violation = 0.0;
    double max_inequality_violation = 0.0;  // includes variable bounds
    int iterations = 0;
    bool converged = false;
    std::vector<OuterIterate> history;
};

// Entry point shared by all subproblem solvers.
class SubproblemSolver {
public:
    virtual ~SubproblemSolver() = default;
    [[nodiscard]] virtual NlpSolution solve(const NlpProblem& problem,
                                            const SolverOptions& options) const = 0;
};

// ℓ1 exact-penalty sequential convexification with a box trust region. Linear
// equalities are eliminated through a null-space basis and enforced exactly;
// each convex subproblem is a dense QP.
class SequentialConvexSolver final : public SubproblemSolver {
public:
    [[nodiscard]] NlpSolution solve(const NlpProblem& problem,
                                    const SolverOptions& options) const override;
};

NlpSolution solve(const NlpProblem& problem, const SolverOptions& options = {});

// Recomputes the violations reported in NlpSolution at an arbitrary point.
double equality_violation(const NlpProblem& problem, const Vec& x);
double inequality_violation(const NlpProblem& problem, const Vec& x);

}  // namespace trajsplit::nlp
