#include "trajsplit/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "trajsplit/kinematics.hpp"

namespace trajsplit {

namespace {

constexpr int kMaxIterations = 128;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

// Every shape is a convex point set ("core": point, segment or polygon)
// dilated by a disc. Signed distance of dilated sets is the core signed
// distance minus both radii.
struct Core {
    std::vector<Vec2> vertices;
    double radius = 0.0;
};

Core to_core(const ConvexShape& shape) {
    return std::visit(
        [](const auto& s) -> Core {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Point>) {
                return {{s.position}, 0.0};
            } else if constexpr (std::is_same_v<T, Circle>) {
                return {{s.center}, s.radius};
            } else if constexpr (std::is_same_v<T, Capsule>) {
                if (s.endpoint_a == s.endpoint_b) return {{s.endpoint_a}, s.radius};
                return {{s.endpoint_a, s.endpoint_b}, s.radius};
            } else {
                return {s.vertices, 0.0};
            }
        },
        shape);
}

double scale_of(const Core& a, const Core& b) {
    double s = 1.0;
    for (const auto& v : a.vertices) s = std::max(s, v.cwiseAbs().maxCoeff());
    for (const auto& v : b.vertices) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
}

std::size_t support_index(const std::vector<Vec2>& verts, const Vec2& dir) {
    std::size_t best = 0;
    double best_dot = verts[0].dot(dir);
    for (std::size_t i = 1; i < verts.size(); ++i) {
        const double d = verts[i].dot(dir);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

// Vertex of the Minkowski difference A - B together with the generating pair.
struct SupportPoint {
    Vec2 w;
    Vec2 a;
    Vec2 b;
};

SupportPoint support(const Core& a, const Core& b, const Vec2& dir) {
    const Vec2& pa = a.vertices[support_index(a.vertices, dir)];
    const Vec2& pb = b.vertices[support_index(b.vertices, -dir)];
    return {pa - pb, pa, pb};
}

struct CoreDistance {
    double value = 0.0;  // signed distance between cores
    Vec2 point_a = Vec2::Zero();
    Vec2 point_b = Vec2::Zero();
    Vec2 normal = Vec2::UnitX();
};

CoreDistance from_separation(const Vec2& pa, const Vec2& pb) {
    const Vec2 v = pa - pb;
    const double dist = v.norm();
    CoreDistance out;
    out.value = dist;
    out.point_a = pa;
    out.point_b = pb;
    out.normal = dist > 0.0 ? Vec2(v / dist) : Vec2::UnitX();
    return out;
}

// Closest points between segments [p0,p1] and [q0,q1]; degenerate segments
// are points.
std::pair<Vec2, Vec2> closest_segment_points(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                                             const Vec2& q1) {
    const Vec2 d1 = p1 - p0;
    const Vec2 d2 = q1 - q0;
    const Vec2 r = p0 - q0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0) return {p0, q0};
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return {p0 + s * d1, q0 + t * d2};
}

// Reduces the simplex to the sub-simplex supporting its closest point to the
// origin. Returns true once the origin lies inside a triangle.
bool reduce_simplex(std::vector<SupportPoint>& simplex, Vec2& closest, Eigen::Vector3d& bary) {
    if (simplex.size() == 1) {
        closest = simplex[0].w;
        bary = {1.0, 0.0, 0.0};
        return false;
    }
    auto segment = [](const SupportPoint& s0, const SupportPoint& s1, double& t) {
        const Vec2 e = s1.w - s0.w;
        const double ee = e.squaredNorm();
        t = ee > 0.0 ? std::clamp(-s0.w.dot(e) / ee, 0.0, 1.0) : 0.0;
        return Vec2(s0.w + t * e);
    };
    if (simplex.size() == 2) {
        double t = 0.0;
        closest = segment(simplex[0], simplex[1], t);
        if (t <= 0.0) {
            simplex.resize(1);
            bary = {1.0, 0.0, 0.0};
        } else if (t >= 1.0) {
            simplex = {simplex[1]};
            bary = {1.0, 0.0, 0.0};
        } else {
            bary = {1.0 - t, t, 0.0};
        }
        return false;
    }
    const Vec2& A = simplex[0].w;
    const Vec2& B = simplex[1].w;
    const Vec2& C = simplex[2].w;
    const double area = cross(B - A, C - A);
    if (area != 0.0) {
        const double u = cross(B, C) / area;
        const double v = cross(C, A) / area;
        const double w = cross(A, B) / area;
        if (u >= 0.0 && v >= 0.0 && w >= 0.0) {
            closest = Vec2::Zero();
            bary = {u, v, w};
            return true;
        }
    }
    // Origin outside: the closest point is on one of the edges.
    double best = std::numeric_limits<double>::infinity();
    std::vector<SupportPoint> best_simplex;
    for (int k = 0; k < 3; ++k) {
        std::vector<SupportPoint> edge{simplex[static_cast<std::size_t>(k)],
                                       simplex[static_cast<std::size_t>((k + 1) % 3)]};
        Vec2 c;
        Eigen::Vector3d bc;
        reduce_simplex(edge, c, bc);
        const double d2 = c.squaredNorm();
        if (d2 < best) {
            best = d2;
            closest = c;
            bary = bc;
            best_simplex = edge;
        }
    }
    simplex = best_simplex;
    return false;
}

std::vector<SupportPoint> convex_hull(std::vector<SupportPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const SupportPoint& p, const SupportPoint& q) {
        return p.w.x() < q.w.x() || (p.w.x() == q.w.x() && p.w.y() < q.w.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const SupportPoint& p, const SupportPoint& q) { return p.w == q.w; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<SupportPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 1].w - hull[k - 2].w, p.w - hull[k - 2].w) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        const auto& p = pts[i - 1];
        while (k >= t && cross(hull[k - 1].w - hull[k - 2].w, p.w - hull[k - 2].w) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_area(const std::vector<SupportPoint>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        a += cross(poly[i].w, poly[(i + 1) % poly.size()].w);
    }
    return 0.5 * a;
}

// Penetration of cores whose Minkowski difference contains the origin.
CoreDistance expanding_polytope(const Core& a, const Core& b, std::vector<SupportPoint> seed,
                                double scale) {
    const double tol = 1e-12 * scale;
    const std::array<Vec2, 4> axes{Vec2::UnitX(), Vec2::UnitY(), Vec2(-Vec2::UnitX()),
                                   Vec2(-Vec2::UnitY())};
    for (const auto& d : axes) seed.push_back(support(a, b, d));
    auto poly = convex_hull(seed);
    if (poly.size() == 2) {
        const Vec2 n = perp(poly[1].w - poly[0].w).normalized();
        poly.push_back(support(a, b, n));
        poly.push_back(support(a, b, -n));
        poly = convex_hull(poly);
    }
    if (poly.size() < 3 || std::abs(polygon_area(poly)) <= tol * scale) {
        // Flat Minkowski difference: any sideways nudge separates the cores.
        CoreDistance out;
        Vec2 n = Vec2::UnitX();
        if (poly.size() >= 2) n = perp(poly.back().w - poly.front().w).normalized();
        out.value = 0.0;
        out.normal = n;
        // Witnesses: the pair generating the Minkowski point nearest the origin.
        std::size_t best = 0;
        for (std::size_t i = 1; i < poly.size(); ++i) {
            if (poly[i].w.squaredNorm() < poly[best].w.squaredNorm()) best = i;
        }
        out.point_a = poly.empty() ? a.vertices[0] : poly[best].a;
        out.point_b = out.point_a;
        return out;
    }

    std::size_t edge = 0;
    Vec2 normal = Vec2::UnitX();
    double dist = 0.0;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 e = poly[(i + 1) % poly.size()].w - poly[i].w;
            const double len = e.norm();
            if (len <= 0.0) continue;
            const Vec2 n(e.y() / len, -e.x() / len);  // outward for ccw order
            const double d = n.dot(poly[i].w);
            if (d < dist) {
                dist = d;
                edge = i;
                normal = n;
            }
        }
        const SupportPoint s = support(a, b, normal);
        const double reach = normal.dot(s.w);
        if (reach - dist <= tol) break;
        bool duplicate = false;
        for (const auto& p : poly) duplicate = duplicate || p.w == s.w;
        if (duplicate) break;
        poly.insert(poly.begin() + static_cast<std::ptrdiff_t>(edge + 1), s);
    }
    const SupportPoint& p0 = poly[edge];
    const SupportPoint& p1 = poly[(edge + 1) % poly.size()];
    const Vec2 e = p1.w - p0.w;
    const double t = std::clamp((dist * normal - p0.w).dot(e) / e.squaredNorm(), 0.0, 1.0);
    CoreDistance out;
    out.value = -dist;
    out.normal = -normal;
    out.point_a = p0.a + t * (p1.a - p0.a);
    out.point_b = p0.b + t * (p1.b - p0.b);
    return out;
}

CoreDistance gjk_distance(const Core& a, const Core& b) {
    const double scale = scale_of(a, b);
    const double eps = 1e-14 * scale * scale;
    std::vector<SupportPoint> simplex{support(a, b, a.vertices[0] - b.vertices[0])};
    Vec2 v = simplex[0].w;
    Eigen::Vector3d bary(1.0, 0.0, 0.0);
    bool overlap = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const double vv = v.squaredNorm();
        if (vv <= eps) {
            overlap = true;
            break;
        }
        const SupportPoint s = support(a, b, -v);
        if (vv - v.dot(s.w) <= 1e-13 * vv) break;
        bool duplicate = false;
        for (const auto& p : simplex) duplicate = duplicate || p.w == s.w;
        if (duplicate) break;
        simplex.push_back(s);
        if (reduce_simplex(simplex, v, bary)) {
            overlap = true;
            break;
        }
    }
    if (overlap) return expanding_polytope(a, b, simplex, scale);
    Vec2 pa = Vec2::Zero();
    Vec2 pb = Vec2::Zero();
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        pa += bary[static_cast<Eigen::Index>(i)] * simplex[i].a;
        pb += bary[static_cast<Eigen::Index>(i)] * simplex[i].b;
    }
    CoreDistance out;
    out.value = v.norm();
    out.normal = v / out.value;
    out.point_a = pa;
    out.point_b = pb;
    return out;
}

// Indices of the vertices extremal along dir (at most two for convex cores).
std::vector<std::size_t> support_feature(const std::vector<Vec2>& verts, const Vec2& dir,
                                         double tol) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts) best = std::max(best, v.dot(dir));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (verts[i].dot(dir) >= best - tol) idx.push_back(i);
    }
    return idx;
}

// Parallel contact edges: move both witnesses to the middle of the overlap.
void center_parallel_witnesses(const Core& a, const Core& b, CoreDistance& cd, double scale) {
    if (a.vertices.size() < 2 || b.vertices.size() < 2) return;
    const double tol = 1e-9 * scale;
    auto fa = support_feature(a.vertices, -cd.normal, tol);
    auto fb = support_feature(b.vertices, cd.normal, tol);
    if (fa.size() != 2 || fb.size() != 2) return;
    const Vec2 t = perp(cd.normal);
    const Vec2& a0 = a.vertices[fa[0]];
    const Vec2& a1 = a.vertices[fa[1]];
    const Vec2& b0 = b.vertices[fb[0]];
    const Vec2& b1 = b.vertices[fb[1]];
    const double lo = std::max(std::min(t.dot(a0), t.dot(a1)), std::min(t.dot(b0), t.dot(b1)));
    const double hi = std::min(std::max(t.dot(a0), t.dot(a1)), std::max(t.dot(b0), t.dot(b1)));
    if (lo > hi) return;
    const double mid = 0.5 * (lo + hi);
    auto at = [&](const Vec2& p0, const Vec2& p1) {
        const double span = t.dot(p1 - p0);
        const double lam = span != 0.0 ? (mid - t.dot(p0)) / span : 0.0;
        return Vec2(p0 + std::clamp(lam, 0.0, 1.0) * (p1 - p0));
    };
    // B's witness follows from point_a - point_b = value * normal.
    cd.point_a = at(a0, a1);
    cd.point_b = cd.point_a - cd.value * cd.normal;
}

CoreDistance core_distance(const Core& a, const Core& b) {
    const double scale = scale_of(a, b);
    if (a.vertices.size() <= 2 && b.vertices.size() <= 2) {
        const Vec2& p0 = a.vertices.front();
        const Vec2& p1 = a.vertices.back();
        const Vec2& q0 = b.vertices.front();
        const Vec2& q1 = b.vertices.back();
        const auto [pa, pb] = closest_segment_points(p0, p1, q0, q1);
        if ((pa - pb).norm() > 1e-12 * scale) {
            CoreDistance cd = from_separation(pa, pb);
            center_parallel_witnesses(a, b, cd, scale);
            return cd;
        }
        if (a.vertices.size() == 1 && b.vertices.size() == 1) {
            CoreDistance cd;
            cd.value = 0.0;
            cd.point_a = p0;
            cd.point_b = q0;
            cd.normal = Vec2::UnitX();
            return cd;
        }
    }
    CoreDistance cd = gjk_distance(a, b);
    center_parallel_witnesses(a, b, cd, scale);
    return cd;
}

}  // namespace

void validate_shape(const ConvexShape& shape) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Point>) {
                if (!s.position.allFinite()) throw InvalidShape("point must be finite");
            } else if constexpr (std::is_same_v<T, Circle>) {
                if (!(s.radius > 0.0) || !s.center.allFinite() || !std::isfinite(s.radius)) {
                    throw InvalidShape("circle radius must be positive");
                }
            } else if constexpr (std::is_same_v<T, Capsule>) {
                if (!(s.radius > 0.0) || !std::isfinite(s.radius) || !s.endpoint_a.allFinite() ||
                    !s.endpoint_b.allFinite()) {
                    throw InvalidShape("capsule radius must be positive");
                }
            } else {
                const auto n = s.vertices.size();
                if (n < 3) throw InvalidShape("polygon needs at least 3 vertices");
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec2& p = s.vertices[i];
                    const Vec2& q = s.vertices[(i + 1) % n];
                    const Vec2& r = s.vertices[(i + 2) % n];
                    if (!p.allFinite()) throw InvalidShape("polygon vertex must be finite");
                    if (!(cross(q - p, r - q) > 0.0)) {
                        throw InvalidShape("polygon must be strictly convex and counterclockwise");
                    }
                }
            }
        },
        shape);
}

SignedDistanceResult signed_distance(const ConvexShape& a, const ConvexShape& b) {
    validate_shape(a);
    validate_shape(b);
    const Core ca = to_core(a);
    const Core cb = to_core(b);
    const CoreDistance cd = core_distance(ca, cb);
    SignedDistanceResult out;
    out.value = cd.value - ca.radius - cb.radius;
    out.normal = cd.normal;
    out.point_a = cd.point_a - ca.radius * cd.normal;
    out.point_b = cd.point_b + cb.radius * cd.normal;
    return out;
}

ConvexShape to_shape(const Obstacle& obstacle) {
    return std::visit([](const auto& s) -> ConvexShape { return s; }, obstacle.shape);
}

std::vector<ConvexShape> robot_bodies(const RobotModel& model, const Vec& q) {
    const auto poses = forward_kinematics(model, q);
    std::vector<ConvexShape> bodies;
    bodies.reserve(poses.size());
    if (model.kind == RobotKind::Point2D) {
        bodies.emplace_back(Point{poses.front().endpoint_a});
        return bodies;
    }
    for (const auto& p : poses) {
        bodies.emplace_back(Capsule{p.endpoint_a, p.endpoint_b, model.link_radius});
    }
    return bodies;
}

double min_configuration_clearance(const Scenario& scenario, const Vec& q) {
    double best = std::numeric_limits<double>::infinity();
    const auto bodies = robot_bodies(scenario.robot, q);
    for (const auto& body : bodies) {
        for (const auto& obstacle : scenario.obstacles) {
            best = std::min(best, signed_distance(body, to_shape(obstacle)).value);
        }
    }
    return best;
}

double min_scenario_clearance(const Scenario& scenario, const RobotState& state) {
    if (state.dim() != scenario.robot.dof()) {
        throw DimensionMismatch("state dimension does not match the robot");
    }
    return min_configuration_clearance(scenario, state.position);
}

CollisionLinearization linearize_at_configuration(const Scenario& scenario, const Vec& q,
                                                  BodyObstaclePair pair) {
    const auto bodies = robot_bodies(scenario.robot, q);
    if (pair.link_index < 0 || pair.link_index >= static_cast<int>(bodies.size())) {
        throw std::out_of_range("link index out of range");
    }
    if (pair.obstacle_index < 0 ||
        pair.obstacle_index >= static_cast<int>(scenario.obstacles.size())) {
        throw std::out_of_range("obstacle index out of range");
    }
    CollisionLinearization lin;
    lin.contact = signed_distance(bodies[static_cast<std::size_t>(pair.link_index)],
                                  to_shape(scenario.obstacles[static_cast<std::size_t>(pair.obstacle_index)]));
    lin.sd0 = lin.contact.value;
    const auto jac = point_jacobian(scenario.robot, q, pair.link_index, lin.contact.point_a);
    lin.gradient = jac.transpose() * lin.contact.normal;
    return lin;
}

CollisionLinearization linearize_collision_constraint(const Scenario& scenario,
                                                      const RobotState& state,
                                                      BodyObstaclePair pair) {
    if (state.dim() != scenario.robot.dof()) {
        throw DimensionMismatch("state dimension does not match the robot");
    }
    return linearize_at_configuration(scenario, state.position, pair);
}

SweptLinearization linearize_swept(const Scenario& scenario, const Vec& q0, const Vec& q1,
                                   BodyObstaclePair pair) {
    const auto from = robot_bodies(scenario.robot, q0);
    const auto to = robot_bodies(scenario.robot, q1);
    if (pair.link_index < 0 || pair.link_index >= static_cast<int>(from.size())) {
        throw std::out_of_range("link index out of range");
    }
    if (pair.obstacle_index < 0 ||
        pair.obstacle_index >= static_cast<int>(scenario.obstacles.size())) {
        throw std::out_of_range("obstacle index out of range");
    }
    const auto link = static_cast<std::size_t>(pair.link_index);
    const Core c0 = to_core(from[link]);
    const Core c1 = to_core(to[link]);
    Core hull = c0;
    hull.vertices.insert(hull.vertices.end(), c1.vertices.begin(), c1.vertices.end());
    const Core obstacle = to_core(to_shape(scenario.obstacles[static_cast<std::size_t>(pair.obstacle_index)]));
    const CoreDistance cd = core_distance(hull, obstacle);

    SweptLinearization lin;
    lin.sd0 = cd.value - hull.radius - obstacle.radius;
    lin.contact.value = lin.sd0;
    lin.contact.normal = cd.normal;
    lin.contact.point_a = cd.point_a - hull.radius * cd.normal;
    lin.contact.point_b = cd.point_b + obstacle.radius * cd.normal;

    auto nearest_on = [](const Core& c, const Vec2& p) {
        return closest_segment_points(c.vertices.front(), c.vertices.back(), p, p).first;
    };
    const Vec2 p0 = nearest_on(c0, cd.point_a);
    const Vec2 p1 = nearest_on(c1, cd.point_a);
    const double d0 = (cd.point_a - p0).norm();
    const double d1 = (cd.point_a - p1).norm();
    const double alpha = d0 + d1 > 0.0 ? d0 / (d0 + d1) : 0.0;
    const Vec2 s0 = p0 - hull.radius * cd.normal;
    const Vec2 s1 = p1 - hull.radius * cd.normal;
    lin.gradient_from = (1.0 - alpha) * (point_jacobian(scenario.robot, q0, pair.link_index, s0).transpose() * cd.normal);
    lin.gradient_to = alpha * (point_jacobian(scenario.robot, q1, pair.link_index, s1).transpose() * cd.normal);
    return lin;
}

bool trajectory_collision_free(const Scenario& scenario, const Trajectory& traj,
                               int samples_per_edge) {
    if (samples_per_edge < 0) samples_per_edge = 0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Vec& q = traj.states[i].position;
        if (!(min_configuration_clearance(scenario, q) > scenario.safety_margin)) return false;
        if (i + 1 == traj.states.size()) break;
        const Vec& q_next = traj.states[i + 1].position;
        for (int k = 1; k <= samples_per_edge; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(samples_per_edge + 1);
            const Vec qs = (1.0 - t) * q + t * q_next;
            if (!(min_configuration_clearance(scenario, qs) > scenario.safety_margin)) return false;
        }
    }
    return true;
}

}  // namespace trajsplit
