#include "trajsplit/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace trajsplit::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InvalidScenario((where.empty() ? std::string("/") : where) + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
    if (!obj.is_object()) fail(where, "expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
        known.insert(k);
        if (!obj.contains(k)) fail(where, std::string("missing key \"") + k + "\"");
    }
    for (const char* k : optional) known.insert(k);
    for (const auto& item : obj.items()) {
        if (!known.count(item.key())) fail(where + "/" + item.key(), "unknown key");
    }
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

Vec vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], where + "/" + std::to_string(i));
    return out;
}

Vec2 point(const json& v, const std::string& where) {
    const Vec p = vector(v, where);
    if (p.size() != 2) fail(where, "expected a 2-element array");
    return {p[0], p[1]};
}

RobotModel parse_robot(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type")) fail(where, "robot needs a \"type\"");
    if (!j["type"].is_string()) fail(where + "/type", "expected a string");
    const std::string type = j["type"].get<std::string>();
    RobotModel model;
    if (type == "point2d") {
        check_keys(j, where, {"type"}, {"joint_limits"});
        model = RobotModel::point2d();
    } else if (type == "planar_arm") {
        check_keys(j, where, {"type", "link_lengths", "link_radius"}, {"base", "joint_limits"});
        const Vec lengths = vector(j["link_lengths"], where + "/link_lengths");
        model = RobotModel::planar_arm(std::vector<double>(lengths.begin(), lengths.end()),
                                       number(j["link_radius"], where + "/link_radius"));
        if (j.contains("base")) {
            const std::string bw = where + "/base";
            check_keys(j["base"], bw, {}, {"position", "orientation"});
            if (j["base"].contains("position")) model.base.position = point(j["base"]["position"], bw + "/position");
            if (j["base"].contains("orientation")) model.base.orientation = number(j["base"]["orientation"], bw + "/orientation");
        }
    } else {
        fail(where + "/type", "unknown robot type \"" + type + "\"");
    }
    if (j.contains("joint_limits")) {
        const std::string lw = where + "/joint_limits";
        const json& lim = j["joint_limits"];
        if (!lim.is_array()) fail(lw, "expected an array of [lo, hi] pairs");
        std::vector<JointLimit> limits;
        for (std::size_t i = 0; i < lim.size(); ++i) {
            const Vec pair = vector(lim[i], lw + "/" + std::to_string(i));
            if (pair.size() != 2) fail(lw + "/" + std::to_string(i), "expected [lo, hi]");
            limits.push_back({pair[0], pair[1]});
        }
        model.joint_limits = std::move(limits);
    }
    try {
        model.validate();
    } catch (const InvalidScenario& e) {
        fail(where, e.what());
    }
    return model;
}

Obstacle parse_obstacle(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        fail(where, "obstacle needs a string \"type\"");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "circle") {
        check_keys(j, where, {"type", "center", "radius"}, {});
        return {Circle{point(j["center"], where + "/center"), number(j["radius"], where + "/radius")}};
    }
    if (type == "polygon") {
        check_keys(j, where, {"type", "vertices"}, {});
        const json& verts = j["vertices"];
        if (!verts.is_array()) fail(where + "/vertices", "expected an array of points");
        ConvexPolygon poly;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            poly.vertices.push_back(point(verts[i], where + "/vertices/" + std::to_string(i)));
        }
        return {poly};
    }
    fail(where + "/type", "unknown obstacle type \"" + type + "\"");
}

RobotState parse_state(const json& j, const std::string& where, Eigen::Index dof) {
    check_keys(j, where, {"position"}, {"velocity", "acceleration"});
    const Vec p = vector(j["position"], where + "/position");
    if (p.size() != dof) fail(where + "/position", "dimension does not match the robot");
    RobotState s = RobotState::at_rest(p);
    if (j.contains("velocity")) {
        s.velocity = vector(j["velocity"], where + "/velocity");
        if (s.velocity.size() != dof) fail(where + "/velocity", "dimension does not match the robot");
    }
    if (j.contains("acceleration")) {
        s.acceleration = vector(j["acceleration"], where + "/acceleration");
        if (s.acceleration.size() != dof) fail(where + "/acceleration", "dimension does not match the robot");
    }
    return s;
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json to_json(const Vec& v) { return json(std::vector<double>(v.begin(), v.end())); }
json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

json state_json(const RobotState& s) {
    return {{"position", to_json(s.position)},
            {"velocity", to_json(s.velocity)},
            {"acceleration", to_json(s.acceleration)}};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw InvalidScenario("parse error at " + line_column(text, at) + ": " + e.what());
    }
    check_keys(doc, "", {"robot", "start", "goal", "num_waypoints", "dt"},
               {"obstacles", "safety_margin", "dynamics_enabled", "name", "description"});
    if (doc.contains("name") && !doc["name"].is_string()) fail("/name", "expected a string");
    if (doc.contains("description") && !doc["description"].is_string()) fail("/description", "expected a string");

    Scenario s;
    s.robot = parse_robot(doc["robot"], "/robot");
    if (doc.contains("obstacles")) {
        const json& obs = doc["obstacles"];
        if (!obs.is_array()) fail("/obstacles", "expected an array");
        for (std::size_t i = 0; i < obs.size(); ++i) {
            s.obstacles.push_back(parse_obstacle(obs[i], "/obstacles/" + std::to_string(i)));
        }
    }
    s.start = parse_state(doc["start"], "/start", s.robot.dof());
    s.goal = parse_state(doc["goal"], "/goal", s.robot.dof());
    s.num_waypoints = integer(doc["num_waypoints"], "/num_waypoints");
    s.dt = number(doc["dt"], "/dt");
    if (doc.contains("safety_margin")) s.safety_margin = number(doc["safety_margin"], "/safety_margin");
    if (doc.contains("dynamics_enabled")) {
        if (!doc["dynamics_enabled"].is_boolean()) fail("/dynamics_enabled", "expected a boolean");
        s.dynamics_enabled = doc["dynamics_enabled"].get<bool>();
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidScenario("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const InvalidScenario& e) {
        throw InvalidScenario(path.string() + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) {
    json robot;
    if (s.robot.kind == RobotKind::Point2D) {
        robot["type"] = "point2d";
    } else {
        robot["type"] = "planar_arm";
        robot["link_lengths"] = s.robot.link_lengths;
        robot["link_radius"] = s.robot.link_radius;
        robot["base"] = {{"position", to_json(s.robot.base.position)},
                         {"orientation", s.robot.base.orientation}};
    }
    if (s.robot.joint_limits) {
        json limits = json::array();
        for (const auto& l : *s.robot.joint_limits) limits.push_back({l.lo, l.hi});
        robot["joint_limits"] = limits;
    }
    json obstacles = json::array();
    for (const auto& o : s.obstacles) {
        if (const auto* c = std::get_if<Circle>(&o.shape)) {
            obstacles.push_back({{"type", "circle"}, {"center", to_json(c->center)}, {"radius", c->radius}});
        } else {
            json verts = json::array();
            for (const auto& v : std::get<ConvexPolygon>(o.shape).vertices) verts.push_back(to_json(v));
            obstacles.push_back({{"type", "polygon"}, {"vertices", verts}});
        }
    }
    json doc = {{"robot", robot},
                {"obstacles", obstacles},
                {"start", state_json(s.start)},
                {"goal", state_json(s.goal)},
                {"num_waypoints", s.num_waypoints},
                {"dt", s.dt},
                {"safety_margin", s.safety_margin},
                {"dynamics_enabled", s.dynamics_enabled}};
    return doc.dump(2) + "\n";
}

std::string report_json(const admm::SolveReport& report, const admm::SplitConfig& config) {
    json waypoints = json::array();
    for (const auto& st : report.trajectory.states) waypoints.push_back(state_json(st));
    json doc = {
        {"converged", report.converged},
        {"collision_free", report.collision_free},
        {"timed_out", report.timed_out},
        {"iterations", report.iterations},
        {"residual", report.residuals.empty() ? 0.0 : report.residuals.back()},
        {"residuals", report.residuals},
        {"objective", report.objective},
        {"path_length", report.path_length},
        {"nonconverged_segment_solves", report.nonconverged_segment_solves},
        {"config",
         {{"splits", config.num_splits},
          {"rho", config.rho},
          {"eps", config.epsilon},
          {"max_iters", config.max_admm_iterations},
          {"seed", config.seed}}},
        {"dt", report.trajectory.dt},
        {"waypoints", waypoints}};
    return doc.dump(2) + "\n";
}

std::string iterations_csv(const admm::SolveReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,residual,cumulative_seconds,primal_seconds,consensus_seconds\n";
    for (std::size_t i = 0; i < report.iterations_log.size(); ++i) {
        const auto& r = report.iterations_log[i];
        out << i + 1 << ',' << r.residual << ',' << r.cumulative_seconds << ',' << r.primal_seconds
            << ',' << r.consensus_seconds << '\n';
    }
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace trajsplit::io
