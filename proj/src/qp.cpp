#include "trajsplit/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace trajsplit::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Working set of the dual method, stored as J = L⁻ᵀQ and upper-triangular R
// with Jᵀ N = [R; 0] for the active normals N. Adding or dropping a normal
// updates both with Givens rotations.
class ActiveSet {
public:
    explicit ActiveSet(const Eigen::LLT<Mat>& llt)
        : n_(llt.matrixL().rows()),
          j_(llt.matrixU().solve(Mat::Identity(n_, n_))),
          r_(Mat::Zero(n_, n_)) {}

    [[nodiscard]] int size() const noexcept { return static_cast<int>(ids_.size()); }

    // Primal direction z and dual direction r for `normal`. Returns
    // |projected| / |L⁻¹ n|, which vanishes for dependent normals.
    double step_directions(const Vec& normal, Vec& z, Vec& r) const {
        const Vec d = j_.transpose() * normal;
        const int q = size();
        const Eigen::Index rest = n_ - q;
        z = j_.rightCols(rest) * d.tail(rest);
        r = r_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));
        const double base = d.norm();
        return base > 0.0 ? d.tail(rest).norm() / base : 0.0;
    }

    void add(int id, const Vec& normal, double multiplier) {
        Vec d = j_.transpose() * normal;
        const Eigen::Index q = size();
        for (Eigen::Index k = n_ - 1; k > q; --k) {
            const double h = std::hypot(d[k - 1], d[k]);
            if (h == 0.0) continue;
            const double c = d[k - 1] / h;
            const double s = d[k] / h;
            d[k - 1] = h;
            d[k] = 0.0;
            rotate_columns(k - 1, k, c, s);
        }
        r_.col(q).head(q + 1) = d.head(q + 1);
        ids_.push_back(id);
        multipliers_.push_back(multiplier);
    }

    void remove(int position) {
        const Eigen::Index q = size();
        for (Eigen::Index k = position; k + 1 < q; ++k) r_.col(k) = r_.col(k + 1);
        r_.col(q - 1).setZero();
        ids_.erase(ids_.begin() + position);
        multipliers_.erase(multipliers_.begin() + position);
        const Eigen::Index nq = q - 1;
        for (Eigen::Index k = position; k < nq; ++k) {
            const double a = r_(k, k);
            const double b = r_(k + 1, k);
            const double h = std::hypot(a, b);
            if (h == 0.0) continue;
            const double c = a / h;
            const double s = b / h;
            for (Eigen::Index col = k; col < nq; ++col) {
                const double t1 = r_(k, col);
                const double t2 = r_(k + 1, col);
                r_(k, col) = c * t1 + s * t2;
                r_(k + 1, col) = -s * t1 + c * t2;
            }
            rotate_columns(k, k + 1, c, s);
        }
    }

    [[nodiscard]] int id(int position) const { return ids_[static_cast<std::size_t>(position)]; }
    double& multiplier(int position) { return multipliers_[static_cast<std::size_t>(position)]; }
    [[nodiscard]] double multiplier(int position) const {
        return multipliers_[static_cast<std::size_t>(position)];
    }

private:
    void rotate_columns(Eigen::Index a, Eigen::Index b, double c, double s) {
        for (Eigen::Index row = 0; row < n_; ++row) {
            const double t1 = j_(row, a);
            const double t2 = j_(row, b);
            j_(row, a) = c * t1 + s * t2;
            j_(row, b) = -s * t1 + c * t2;
        }
    }

    Eigen::Index n_;
    Mat j_;
    Mat r_;
    std::vector<int> ids_;  // equality rows are encoded as -(row + 1)
    std::vector<double> multipliers_;
};

double objective_value(const Problem& p, const Vec& x) {
    return 0.5 * x.dot(p.hessian * x) + p.linear.dot(x);
}

}  // namespace

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::NotConvex: return "not-convex";
        case Status::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

Result solve(const Problem& problem, int max_iterations) {
    const Eigen::Index n = problem.dimension();
    const Eigen::Index m_eq = problem.eq_matrix.rows();
    const Eigen::Index m_in = problem.ineq_matrix.rows();
    if (max_iterations <= 0) max_iterations = static_cast<int>(10 * (n + m_eq + m_in) + 100);

    Result result;
    result.eq_multipliers = Vec::Zero(m_eq);
    result.ineq_multipliers = Vec::Zero(m_in);

    Eigen::LLT<Mat> llt(problem.hessian);
    if (llt.info() != Eigen::Success) {
        result.status = Status::NotConvex;
        result.x = Vec::Zero(n);
        return result;
    }

    Vec x = -llt.solve(problem.linear);
    ActiveSet active(llt);
    Vec z(n);
    Vec r;
    constexpr double kDependent = 1e-10;

    // Equalities enter first and are never dropped.
    for (Eigen::Index i = 0; i < m_eq; ++i) {
        const Vec normal = problem.eq_matrix.row(i).transpose();
        const double independence = active.step_directions(normal, z, r);
        const double violation = normal.dot(x) - problem.eq_rhs[i];
        if (independence <= kDependent) {
            if (std::abs(violation) > 1e-9 * (1.0 + std::abs(problem.eq_rhs[i]))) {
                result.status = Status::Infeasible;
                result.x = x;
                return result;
            }
            continue;  // dependent row
        }
        const double t = -violation / z.dot(normal);
        x += t * z;
        for (int j = 0; j < active.size(); ++j) active.multiplier(j) -= t * r[j];
        active.add(-static_cast<int>(i) - 1, normal, t);
    }

    std::vector<bool> is_active(static_cast<std::size_t>(m_in), false);
    int iterations = 0;
    result.status = Status::Optimal;

    while (true) {
        // Most violated inactive inequality.
        int p = -1;
        double worst = 0.0;
        for (Eigen::Index j = 0; j < m_in; ++j) {
            if (is_active[static_cast<std::size_t>(j)]) continue;
            const double s = problem.ineq_matrix.row(j).dot(x) - problem.ineq_rhs[j];
            const double tol = 1e-11 * (1.0 + std::abs(problem.ineq_rhs[j]));
            if (s < -tol && s < worst) {
                worst = s;
                p = static_cast<int>(j);
            }
        }
        if (p < 0) break;

        const Vec normal = problem.ineq_matrix.row(p).transpose();
        double candidate_multiplier = 0.0;
        bool added = false;
        while (!added) {
            if (++iterations > max_iterations) {
                result.status = Status::IterationLimit;
                break;
            }
            const double independence = active.step_directions(normal, z, r);
            // Largest dual step keeping active inequality multipliers >= 0.
            double t_dual = kInf;
            int drop = -1;
            for (int j = 0; j < active.size(); ++j) {
                if (active.id(j) < 0) continue;
                if (r[j] > 0.0) {
                    const double ratio = active.multiplier(j) / r[j];
                    if (ratio < t_dual) {
                        t_dual = ratio;
                        drop = j;
                    }
                }
            }
            const double s = normal.dot(x) - problem.ineq_rhs[p];
            const bool dependent = independence <= kDependent;
            const double t_primal = dependent ? kInf : -s / z.dot(normal);
            const double t = std::min(t_dual, t_primal);
            if (!std::isfinite(t)) {
                result.status = Status::Infeasible;
                result.x = x;
                return result;
            }
            if (!dependent) x += t * z;
            for (int j = 0; j < active.size(); ++j) active.multiplier(j) -= t * r[j];
            candidate_multiplier += t;
            if (!dependent && t == t_primal) {
                active.add(p, normal, candidate_multiplier);
                is_active[static_cast<std::size_t>(p)] = true;
                added = true;
            } else {
                is_active[static_cast<std::size_t>(active.id(drop))] = false;
                active.remove(drop);
            }
        }
        if (result.status == Status::IterationLimit) break;
    }

    result.x = x;
    result.objective = objective_value(problem, x);
    result.iterations = iterations;
    for (int j = 0; j < active.size(); ++j) {
        const int id = active.id(j);
        if (id < 0) {
            result.eq_multipliers[-id - 1] = active.multiplier(j);
        } else {
            result.ineq_multipliers[id] = active.multiplier(j);
            result.active_inequalities.push_back(id);
        }
    }
    return result;
}

}  // namespace trajsplit::qp
