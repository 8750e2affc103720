#pragma once

#include <vector>

#include "trajsplit/model.hpp"

namespace trajsplit::qp {

// minimize ½ xᵀ H x + gᵀ x
// subject to E x = e, C x >= c.
// H must be symmetric positive definite.
struct Problem {
    Mat hessian;
    Vec linear;
    Mat eq_matrix;
    Vec eq_rhs;
    Mat ineq_matrix;
    Vec ineq_rhs;

    [[nodiscard]] Eigen::Index dimension() const noexcept { return linear.size(); }
};

enum class Status { Optimal, Infeasible, NotConvex, IterationLimit };

struct Result {
    Status status = Status::IterationLimit;
    Vec x;
    double objective = 0.0;
    Vec eq_multipliers;
    Vec ineq_multipliers;  // >= 0, zero for inactive rows
    std::vector<int> active_inequalities;
    int iterations = 0;
};

// Dual active-set method of Goldfarb and Idnani. Starts from the unconstrained
// minimizer and adds violated constraints one at a time, so no feasible
// starting point is needed.
Result solve(const Problem& problem, int max_iterations = 0);

const char* to_string(Status status);

}  // namespace trajsplit::qp
