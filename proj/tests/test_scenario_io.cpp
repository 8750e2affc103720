#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "trajsplit/scenario_io.hpp"

using namespace trajsplit;

namespace {

const char* kArm = R"({
  "name": "demo",
  "robot": {"type": "planar_arm", "link_lengths": [1.0, 0.8], "link_radius": 0.05,
            "base": {"position": [0.1, 0.2], "orientation": 0.3},
            "joint_limits": [[-3, 3], [-2.5, 2.5]]},
  "obstacles": [{"type": "circle", "center": [1, 1], "radius": 0.2},
                {"type": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]]}],
  "start": {"position": [0.0, 0.1], "velocity": [0.0, 0.0]},
  "goal": {"position": [1.0, -0.2]},
  "num_waypoints": 12,
  "dt": 0.3,
  "safety_margin": 0.05,
  "dynamics_enabled": false
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("parse a planar arm scenario") {
    const auto s = io::parse_scenario(kArm);
    CHECK(s.robot.kind == RobotKind::PlanarArm);
    CHECK(s.robot.link_lengths == std::vector<double>{1.0, 0.8});
    CHECK(s.robot.base.position == Vec2(0.1, 0.2));
    REQUIRE(s.robot.joint_limits);
    CHECK((*s.robot.joint_limits)[1].hi == 2.5);
    CHECK(s.obstacles.size() == 2);
    CHECK(s.goal.velocity.isZero());
    CHECK(s.num_waypoints == 12);
    CHECK_FALSE(s.dynamics_enabled);
}

TEST_CASE("serialization round trip is idempotent") {
    const auto s = io::parse_scenario(kArm);
    const std::string once = io::serialize_scenario(s);
    const auto back = io::parse_scenario(once);
    CHECK(io::serialize_scenario(back) == once);
    CHECK(back.start == s.start);
    CHECK(back.goal == s.goal);
    CHECK(back.dt == s.dt);
    CHECK(back.safety_margin == s.safety_margin);
    CHECK(back.robot.base.orientation == s.robot.base.orientation);
}

TEST_CASE("bundled scenarios parse and round trip") {
    int count = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(support::scenario_dir())) {
        if (entry.path().extension() != ".json") continue;
        const auto s = io::load_scenario(entry.path());
        CHECK(io::serialize_scenario(io::parse_scenario(io::serialize_scenario(s))) == io::serialize_scenario(s));
        ++count;
    }
    CHECK(count == 30);
}

TEST_CASE("schema errors carry the location") {
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"link_radius\"", "\"colour\": 1, \"link_radius\"")),
                         doctest::Contains("/robot/colour"), InvalidScenario);
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"radius\": 0.2", "\"radius\": \"big\"")),
                         doctest::Contains("/obstacles/0/radius"), InvalidScenario);
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"num_waypoints\": 12", "\"num_waypoints\": 1.5")),
                         doctest::Contains("/num_waypoints"), InvalidScenario);
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"position\": [1.0, -0.2]", "\"position\": [1.0]")),
                         doctest::Contains("/goal/position"), InvalidScenario);
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"planar_arm\"", "\"hexapod\"")),
                         doctest::Contains("/robot/type"), InvalidScenario);
    CHECK_THROWS_AS(io::parse_scenario(replace(kArm, "\"dt\": 0.3", "\"dt\": -0.3")), InvalidScenario);
    CHECK_THROWS_WITH_AS(io::parse_scenario(replace(kArm, "\"num_waypoints\": 12,", "")),
                         doctest::Contains("num_waypoints"), InvalidScenario);
}

TEST_CASE("syntax errors carry line and column") {
    CHECK_THROWS_WITH_AS(io::parse_scenario("{\n  \"robot\": {\n    \"type\": ,\n}"),
                         doctest::Contains("line 3"), InvalidScenario);
    CHECK_THROWS_AS(io::load_scenario("/nonexistent/scenario.json"), InvalidScenario);
}

TEST_CASE("report files mirror the solve report") {
    admm::SolveReport r;
    r.trajectory.dt = 0.5;
    r.trajectory.states = {RobotState::at_rest(support::vec({0, 0})), RobotState::at_rest(support::vec({1, 0}))};
    r.residuals = {0.3, 0.05};
    r.iterations_log = {{0.3, 0.1, 0.08, 0.01, 0}, {0.05, 0.2, 0.09, 0.01, 0}};
    r.iterations = 2;
    r.converged = true;
    r.collision_free = true;
    r.path_length = 1.0;
    const std::string json = io::report_json(r, admm::SplitConfig{});
    CHECK(json.find("\"waypoints\"") != std::string::npos);
    CHECK(json.find("\"residuals\"") != std::string::npos);
    const std::string csv = io::iterations_csv(r);
    std::istringstream in(csv);
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);
    CHECK(csv.rfind("iteration,residual,cumulative_seconds", 0) == 0);
    CHECK(csv.find("\n2,") != std::string::npos);
}
