#pragma once

#include <variant>
#include <vector>

#include "trajsplit/model.hpp"

namespace trajsplit {

struct Point {
    Vec2 position = Vec2::Zero();
};

struct Capsule {
    Vec2 endpoint_a = Vec2::Zero();
    Vec2 endpoint_b = Vec2::Zero();
    double radius = 0.0;
};

// Circle and Capsule radii must be positive. Point is the zero-radius body of a
// point robot.
using ConvexShape = std::variant<Point, Circle, ConvexPolygon, Capsule>;

// point_a - point_b == value * normal in every case. `normal` is the direction
// in which translating A increases the signed distance: for separated shapes it
// points from point_b to point_a; for penetrating shapes point_a is the deepest
// point of A inside B and point_b the matching point on B's boundary.
struct SignedDistanceResult {
    double value = 0.0;
    Vec2 point_a = Vec2::Zero();
    Vec2 point_b = Vec2::Zero();
    Vec2 normal = Vec2::UnitX();
};

void validate_shape(const ConvexShape& shape);

SignedDistanceResult signed_distance(const ConvexShape& a, const ConvexShape& b);

ConvexShape to_shape(const Obstacle& obstacle);

// Collision bodies of the robot at configuration q: one capsule per arm link,
// or a single point for Point2D.
std::vector<ConvexShape> robot_bodies(const RobotModel& model, const Vec& q);

double min_scenario_clearance(const Scenario& scenario, const RobotState& state);

// Clearance at a bare configuration; same as min_scenario_clearance.
double min_configuration_clearance(const Scenario& scenario, const Vec& q);

struct CollisionLinearization {
    double sd0 = 0.0;
    Vec gradient;  // d(sd)/dq, configuration dimension
    SignedDistanceResult contact;
};

struct BodyObstaclePair {
    int link_index = 0;
    int obstacle_index = 0;
};

// sd(q) ≈ sd0 + gradient · (q - q0), with gradient = nᵀ J_{p_A}(q0). The contact
// point is held fixed on the link.
CollisionLinearization linearize_collision_constraint(const Scenario& scenario,
                                                      const RobotState& state,
                                                      BodyObstaclePair pair);

CollisionLinearization linearize_at_configuration(const Scenario& scenario, const Vec& q,
                                                  BodyObstaclePair pair);

struct SweptLinearization {
    double sd0 = 0.0;
    Vec gradient_from;  // d(sd)/dq0
    Vec gradient_to;    // d(sd)/dq1
    SignedDistanceResult contact;
};

// Signed distance between an obstacle and the convex hull of one robot body
// at q0 and at q1, a stand-in for the volume the body sweeps along the edge.
// The contact point is split between the two configurations in proportion to
// its distance from each body.
SweptLinearization linearize_swept(const Scenario& scenario, const Vec& q0, const Vec& q1,
                                   BodyObstaclePair pair);

// True iff clearance exceeds the safety margin at every waypoint and at
// `samples_per_edge` evenly spaced interior configurations of every edge.
bool trajectory_collision_free(const Scenario& scenario, const Trajectory& traj,
                               int samples_per_edge);

}  // namespace trajsplit
