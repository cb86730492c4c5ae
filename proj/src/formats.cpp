#include "wdr/formats.hpp"

#include <stdexcept>

#include "wdr/io_util.hpp"

namespace wdr {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    j["data"] = data;
    return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::runtime_error("matrix json: data length mismatch");
    Eigen::MatrixXd m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[idx++];
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json system_to_json(const SystemFile& sf) {
    json j;
    j["A"] = matrix_to_json(sf.sys.A);
    j["B"] = matrix_to_json(sf.sys.B);
    j["G"] = matrix_to_json(sf.sys.G);
    j["K"] = matrix_to_json(sf.law.K);
    j["support"] = {{"diam_x0", sf.support.diam_x0}, {"diam_w", sf.support.diam_w}};
    if (sf.dt > 0.0) j["dt"] = sf.dt;
    return j;
}

SystemFile system_from_json(const json& j) {
    SystemFile sf;
    sf.sys.A = matrix_from_json(j.at("A"));
    sf.sys.B = matrix_from_json(j.at("B"));
    sf.sys.G = matrix_from_json(j.at("G"));
    sf.law.K = matrix_from_json(j.at("K"));
    sf.support.diam_x0 = j.at("support").at("diam_x0").get<double>();
    sf.support.diam_w = j.at("support").at("diam_w").get<double>();
    sf.dt = j.value("dt", 0.0);
    sf.sys.validate();
    if (sf.law.K.rows() != sf.sys.m() || sf.law.K.cols() != sf.sys.n())
        throw std::runtime_error("system file: gain shape mismatch");
    return sf;
}

SystemFile load_system_file(const std::string& path) {
    return system_from_json(json::parse(io::read_file(path)));
}

void save_system_file(const std::string& path, const SystemFile& sf) {
    io::write_file(path, system_to_json(sf).dump(2) + "\n");
}

namespace {

json primitive_to_json(const Primitive& prim) {
    json j;
    if (const auto* b = std::get_if<BoxPrim>(&prim.var)) {
        j["type"] = "box";
        j["lo"] = vector_to_json(b->lo);
        j["hi"] = vector_to_json(b->hi);
    } else if (const auto* b = std::get_if<BallPrim>(&prim.var)) {
        j["type"] = "ball";
        j["center"] = vector_to_json(b->center);
        j["radius"] = b->radius;
    } else if (const auto* poly = std::get_if<PolygonPrim>(&prim.var)) {
        j["type"] = "polygon";
        json verts = json::array();
        for (const auto& v : poly->verts) verts.push_back({v.x(), v.y()});
        j["verts"] = verts;
    } else if (const auto* h = std::get_if<HalfSpacePrim>(&prim.var)) {
        j["type"] = "halfspace";
        j["normal"] = vector_to_json(h->normal);
        j["offset"] = h->offset;
    } else {
        throw std::runtime_error("environment json: complement primitives are query-built only");
    }
    if (!prim.coords.empty()) j["coords"] = prim.coords;
    return j;
}

Primitive primitive_from_json(const json& j) {
    Primitive prim;
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") {
        prim.var = BoxPrim{vector_from_json(j.at("lo")), vector_from_json(j.at("hi"))};
    } else if (type == "ball") {
        prim.var = BallPrim{vector_from_json(j.at("center")), j.at("radius").get<double>()};
    } else if (type == "polygon") {
        PolygonPrim poly;
        for (const auto& v : j.at("verts")) poly.verts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        prim.var = poly;
    } else if (type == "halfspace") {
        prim.var = HalfSpacePrim{vector_from_json(j.at("normal")), j.at("offset").get<double>()};
    } else {
        throw std::runtime_error("environment json: unknown primitive type " + type);
    }
    if (j.contains("coords")) prim.coords = j.at("coords").get<std::vector<int>>();
    return prim;
}

json set_to_json(const SetExpr& s) {
    json arr = json::array();
    for (const auto& prim : s.prims) arr.push_back(primitive_to_json(prim));
    return arr;
}

SetExpr set_from_json(const json& j) {
    SetExpr s;
    for (const auto& pj : j) s.prims.push_back(primitive_from_json(pj));
    return s;
}

}  // namespace

json environment_to_json(const Environment& env) {
    json j;
    j["workspace"] = {{"lo", vector_to_json(env.ws_lo)}, {"hi", vector_to_json(env.ws_hi)}};
    j["obstacles"] = set_to_json(env.obstacles);
    j["goal"] = set_to_json(env.goal);
    j["state_bounds"] = {{"lo", vector_to_json(env.state_lo)}, {"hi", vector_to_json(env.state_hi)}};
    if (env.control) j["control"] = set_to_json(env.control->u_set);
    return j;
}

Environment environment_from_json(const json& j) {
    Environment env;
    env.ws_lo = vector_from_json(j.at("workspace").at("lo"));
    env.ws_hi = vector_from_json(j.at("workspace").at("hi"));
    env.obstacles = set_from_json(j.at("obstacles"));
    env.goal = set_from_json(j.at("goal"));
    env.state_lo = vector_from_json(j.at("state_bounds").at("lo"));
    env.state_hi = vector_from_json(j.at("state_bounds").at("hi"));
    if (j.contains("control")) env.control = ControlConstraint{set_from_json(j.at("control"))};
    if (!env.obstacles.empty()) env.obstacles.validate();
    env.goal.validate();
    return env;
}

Environment load_environment_file(const std::string& path) {
    return environment_from_json(json::parse(io::read_file(path)));
}

void save_environment_file(const std::string& path, const Environment& env) {
    io::write_file(path, environment_to_json(env).dump(2) + "\n");
}

namespace {

json noise_to_json(const NoiseModel& model) {
    json j;
    if (const auto* g = std::get_if<TruncatedGaussian>(&model)) {
        j["kind"] = "truncated_gaussian";
        j["mean"] = vector_to_json(g->mean);
        j["cov"] = matrix_to_json(g->cov);
        j["trunc_sd"] = g->trunc_sd;
    } else if (const auto* p = std::get_if<PushforwardUniform>(&model)) {
        j["kind"] = "pushforward_uniform";
        j["scale"] = matrix_to_json(p->scale);
        j["amplitude"] = p->amplitude;
        j["radial_exponent"] = p->radial_exponent;
    } else {
        j["kind"] = "point_mass";
        j["value"] = vector_to_json(std::get<PointMass>(model).value);
    }
    return j;
}

NoiseModel noise_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "truncated_gaussian") {
        TruncatedGaussian g;
        g.mean = vector_from_json(j.at("mean"));
        g.cov = matrix_from_json(j.at("cov"));
        g.trunc_sd = j.value("trunc_sd", 4.0);
        return g;
    }
    if (kind == "pushforward_uniform") {
        PushforwardUniform p;
        p.scale = matrix_from_json(j.at("scale"));
        p.amplitude = j.value("amplitude", 4.0);
        p.radial_exponent = j.value("radial_exponent", 0.25);
        return p;
    }
    if (kind == "point_mass") return PointMass{vector_from_json(j.at("value"))};
    throw std::runtime_error("ground truth json: unknown noise kind " + kind);
}

}  // namespace

json ground_truth_to_json(const GroundTruth& gt) {
    return json{{"p0", noise_to_json(gt.p0)}, {"pw", noise_to_json(gt.pw)}};
}

GroundTruth ground_truth_from_json(const json& j) {
    GroundTruth gt{noise_from_json(j.at("p0")), noise_from_json(j.at("pw"))};
    validate_noise(gt.p0);
    validate_noise(gt.pw);
    return gt;
}

GroundTruth load_ground_truth_file(const std::string& path) {
    return ground_truth_from_json(json::parse(io::read_file(path)));
}

void save_ground_truth_file(const std::string& path, const GroundTruth& gt) {
    io::write_file(path, ground_truth_to_json(gt).dump(2) + "\n");
}

json plan_to_json(const MotionPlan& plan) {
    json steps = json::array();
    for (const auto& step : plan.steps)
        steps.push_back({{"u", vector_to_json(step.u)}, {"x", vector_to_json(step.x)}});
    return json{{"steps", steps}};
}

MotionPlan plan_from_json(const json& j) {
    MotionPlan plan;
    for (const auto& sj : j.at("steps"))
        plan.steps.push_back(MotionPlanStep{vector_from_json(sj.at("u")), vector_from_json(sj.at("x"))});
    return plan;
}

}  // namespace wdr
