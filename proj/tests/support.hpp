#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajsplit/collision.hpp"
#include "trajsplit/kinematics.hpp"
#include "trajsplit/model.hpp"
#include "trajsplit/qp.hpp"

namespace support {

using trajsplit::Capsule;
using trajsplit::Circle;
using trajsplit::ConvexPolygon;
using trajsplit::ConvexShape;
using trajsplit::Mat;
using trajsplit::Point;
using trajsplit::Vec;
using trajsplit::Vec2;

inline std::filesystem::path scenario_dir() { return TRAJSPLIT_SCENARIO_DIR; }

inline Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Andrew's monotone chain; strictly convex, counterclockwise.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-9) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 1e-9) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

inline ConvexPolygon box(double cx, double cy, double hx, double hy) {
    return {{{cx - hx, cy - hy}, {cx + hx, cy - hy}, {cx + hx, cy + hy}, {cx - hx, cy + hy}}};
}

// Support function h_S(u) = max over s in S of u·s.
inline double support_value(const ConvexShape& s, const Vec2& u) {
    if (const auto* p = std::get_if<Point>(&s)) return u.dot(p->position);
    if (const auto* c = std::get_if<Circle>(&s)) return u.dot(c->center) + c->radius;
    if (const auto* c = std::get_if<Capsule>(&s)) {
        return std::max(u.dot(c->endpoint_a), u.dot(c->endpoint_b)) + c->radius;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : std::get<ConvexPolygon>(s).vertices) best = std::max(best, u.dot(v));
    return best;
}

// Largest gap min_A u·a - max_B u·b over unit directions u. For separated
// shapes this is the distance; for overlapping ones it is minus the shortest
// separating translation.
inline double direction_grid_sd(const ConvexShape& a, const ConvexShape& b,
                                Vec2* best_dir = nullptr, int grid = 7200) {
    auto gap = [&](double th) {
        const Vec2 u(std::cos(th), std::sin(th));
        return -support_value(a, -u) - support_value(b, u);
    };
    double best = -std::numeric_limits<double>::infinity();
    double best_th = 0.0;
    const double step = 2.0 * std::numbers::pi / grid;
    for (int i = 0; i < grid; ++i) {
        const double g = gap(i * step);
        if (g > best) {
            best = g;
            best_th = i * step;
        }
    }
    double lo = best_th - step;
    double hi = best_th + step;
    for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (gap(m1) < gap(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    const double th = 0.5 * (lo + hi);
    best = std::max(best, gap(th));
    if (best_dir) *best_dir = Vec2(std::cos(th), std::sin(th));
    return best;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

// Unsigned distance from p to the shape; zero inside.
inline double point_shape_distance(const Vec2& p, const ConvexShape& s) {
    if (const auto* q = std::get_if<Point>(&s)) return (p - q->position).norm();
    if (const auto* c = std::get_if<Circle>(&s)) return std::max(0.0, (p - c->center).norm() - c->radius);
    if (const auto* c = std::get_if<Capsule>(&s)) {
        return std::max(0.0, point_segment_distance(p, c->endpoint_a, c->endpoint_b) - c->radius);
    }
    const auto& v = std::get<ConvexPolygon>(s).vertices;
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        if (cross(b - a, p - a) < 0.0) inside = false;
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return inside ? 0.0 : best;
}

// Dense samples of the boundary with spacing about h.
inline std::vector<Vec2> boundary_samples(const ConvexShape& s, double h) {
    std::vector<Vec2> out;
    auto arc = [&](const Vec2& c, double r, double t0, double t1) {
        const int n = std::max(8, static_cast<int>(std::ceil(r * (t1 - t0) / h)));
        for (int i = 0; i <= n; ++i) {
            const double t = t0 + (t1 - t0) * i / n;
            out.emplace_back(c + r * Vec2(std::cos(t), std::sin(t)));
        }
    };
    auto line = [&](const Vec2& a, const Vec2& b) {
        const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h)));
        for (int i = 0; i <= n; ++i) out.emplace_back(a + (b - a) * (static_cast<double>(i) / n));
    };
    if (const auto* p = std::get_if<Point>(&s)) {
        out.push_back(p->position);
    } else if (const auto* c = std::get_if<Circle>(&s)) {
        arc(c->center, c->radius, 0.0, 2.0 * std::numbers::pi);
    } else if (const auto* c = std::get_if<Capsule>(&s)) {
        const Vec2 d = c->endpoint_b - c->endpoint_a;
        const double base = d.squaredNorm() > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;
        const Vec2 nrm(-std::sin(base), std::cos(base));
        arc(c->endpoint_b, c->radius, base - std::numbers::pi / 2, base + std::numbers::pi / 2);
        arc(c->endpoint_a, c->radius, base + std::numbers::pi / 2, base + 3 * std::numbers::pi / 2);
        line(c->endpoint_a + c->radius * nrm, c->endpoint_b + c->radius * nrm);
        line(c->endpoint_a - c->radius * nrm, c->endpoint_b - c->radius * nrm);
    } else {
        const auto& v = std::get<ConvexPolygon>(s).vertices;
        for (std::size_t i = 0; i < v.size(); ++i) line(v[i], v[(i + 1) % v.size()]);
    }
    return out;
}

// Separation distance as the minimum over dense boundary samples of A of the
// exact distance to B. Valid for disjoint shapes.
inline double dense_sampling_distance(const ConvexShape& a, const ConvexShape& b, double h = 1e-3) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : boundary_samples(a, h)) best = std::min(best, point_shape_distance(p, b));
    return best;
}

inline ConvexShape random_shape(std::mt19937_64& rng, double spread = 2.5) {
    std::uniform_real_distribution<double> pos(-spread, spread);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 3);
    const Vec2 c(pos(rng), pos(rng));
    switch (kind(rng)) {
        case 0:
            return Point{c};
        case 1:
            return Circle{c, 0.1 + 1.4 * unit(rng)};
        case 2: {
            const double th = 2.0 * std::numbers::pi * unit(rng);
            const double len = 2.0 * unit(rng);
            const Vec2 d = 0.5 * len * Vec2(std::cos(th), std::sin(th));
            return Capsule{c - d, c + d, 0.05 + 0.75 * unit(rng)};
        }
        default: {
            for (;;) {
                std::uniform_int_distribution<int> count(3, 9);
                const int n = count(rng);
                const double rx = 0.2 + 1.3 * unit(rng);
                const double ry = 0.2 + 1.3 * unit(rng);
                std::vector<Vec2> pts;
                for (int i = 0; i < n; ++i) {
                    const double th = 2.0 * std::numbers::pi * unit(rng);
                    const double r = 0.5 + 0.5 * unit(rng);
                    pts.emplace_back(c + Vec2(r * rx * std::cos(th), r * ry * std::sin(th)));
                }
                auto hull = convex_hull(pts);
                if (hull.size() >= 3) return ConvexPolygon{hull};
            }
        }
    }
}

inline ConvexShape translated(const ConvexShape& s, const Vec2& t) {
    return std::visit(
        [&](auto shape) -> ConvexShape {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Point>) {
                shape.position += t;
            } else if constexpr (std::is_same_v<T, Circle>) {
                shape.center += t;
            } else if constexpr (std::is_same_v<T, Capsule>) {
                shape.endpoint_a += t;
                shape.endpoint_b += t;
            } else {
                for (auto& v : shape.vertices) v += t;
            }
            return shape;
        },
        s);
}

// Exhaustive active-set oracle for a small convex QP: solves the KKT system of
// every subset of inequalities and keeps the best primal and dual feasible one.
struct EnumeratedQp {
    bool feasible = false;
    Vec x;
    double objective = std::numeric_limits<double>::infinity();
};

inline EnumeratedQp enumerate_qp(const trajsplit::qp::Problem& p, double tol = 1e-9) {
    const Eigen::Index n = p.dimension();
    const Eigen::Index me = p.eq_matrix.rows();
    const Eigen::Index mi = p.ineq_matrix.rows();
    EnumeratedQp best;
    for (long mask = 0; mask < (1L << mi); ++mask) {
        std::vector<Eigen::Index> act;
        for (Eigen::Index i = 0; i < mi; ++i) {
            if (mask & (1L << i)) act.push_back(i);
        }
        const Eigen::Index m = me + static_cast<Eigen::Index>(act.size());
        if (m > n) continue;
        Mat kkt = Mat::Zero(n + m, n + m);
        Vec rhs = Vec::Zero(n + m);
        kkt.topLeftCorner(n, n) = p.hessian;
        rhs.head(n) = -p.linear;
        for (Eigen::Index r = 0; r < me; ++r) {
            kkt.block(n + r, 0, 1, n) = p.eq_matrix.row(r);
            kkt.block(0, n + r, n, 1) = -p.eq_matrix.row(r).transpose();
            rhs[n + r] = p.eq_rhs[r];
        }
        for (std::size_t k = 0; k < act.size(); ++k) {
            const Eigen::Index r = me + static_cast<Eigen::Index>(k);
            kkt.block(n + r, 0, 1, n) = p.ineq_matrix.row(act[k]);
            kkt.block(0, n + r, n, 1) = -p.ineq_matrix.row(act[k]).transpose();
            rhs[n + r] = p.ineq_rhs[act[k]];
        }
        Eigen::FullPivLU<Mat> lu(kkt);
        if (lu.rank() < n + m) continue;
        const Vec sol = lu.solve(rhs);
        const Vec x = sol.head(n);
        bool ok = true;
        for (Eigen::Index i = 0; i < mi && ok; ++i) {
            if (p.ineq_matrix.row(i).dot(x) < p.ineq_rhs[i] - tol) ok = false;
        }
        for (std::size_t k = 0; k < act.size() && ok; ++k) {
            if (sol[n + me + static_cast<Eigen::Index>(k)] < -tol) ok = false;
        }
        if (!ok) continue;
        const double f = 0.5 * x.dot(p.hessian * x) + p.linear.dot(x);
        if (f < best.objective) {
            best = {true, x, f};
        }
    }
    return best;
}

}  // namespace support
