// Command-line surface: data generation, tube learning, confidence tubes,
// planning, Monte Carlo validation, benchmarks and the chained pipeline.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wdr/ambiguity_tube.hpp"
#include "wdr/data_archive.hpp"
#include "wdr/formats.hpp"
#include "wdr/io_util.hpp"
#include "wdr/planner.hpp"
#include "wdr/validate_plan.hpp"
#include "wdr/validity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wdr;

namespace {

constexpr int kExitTimeout = 10;
constexpr int kExitInvalidStart = 11;
constexpr int kExitConfig = 12;

std::string config_hash(const json& j) { return io::hash_hex(io::fnv1a(j.dump())); }

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(item.substr(0, dash));
            const int hi = std::stoi(item.substr(dash + 1));
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

Eigen::VectorXd parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) vals.push_back(std::stod(item));
    }
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Eigen::MatrixXd projection_by_name(const std::string& name, const SystemFile& sf) {
    if (name == "full") return Eigen::MatrixXd::Identity(sf.sys.n(), sf.sys.n());
    if (name == "ws") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, sf.sys.n());
        m(0, 0) = 1.0;
        m(1, 1) = 1.0;
        return m;
    }
    if (name == "control") return -sf.law.K;
    throw std::runtime_error("unknown projection name: " + name + " (use full|ws|control)");
}

EnvFamily family_by_name(const std::string& name) {
    if (name == "scattered") return EnvFamily::Scattered;
    if (name == "cluttered") return EnvFamily::Cluttered;
    if (name == "narr") return EnvFamily::Narrow;
    if (name == "random") return EnvFamily::Random;
    throw std::runtime_error("unknown environment family: " + name);
}

// p_safe from either spelling; exactly one must be given
double resolve_p_safe(std::optional<double> p_safe, std::optional<double> risk) {
    if (p_safe && risk) throw std::runtime_error("give either --p-safe or --risk, not both");
    if (risk) return 1.0 - *risk;
    if (p_safe) return *p_safe;
    throw std::runtime_error("one of --p-safe or --risk is required");
}

struct LoadedChannels {
    std::vector<AmbiguityTube> tubes;
    std::vector<ConfidenceTube> confs;
};

CheckerContext build_context(LoadedChannels& loaded, const Environment& env, const SystemFile& sf,
                             double p_safe) {
    std::vector<AmbiguityTube*> tubes;
    std::vector<const ConfidenceTube*> confs;
    for (auto& tube : loaded.tubes) tubes.push_back(&tube);
    for (auto& conf : loaded.confs) confs.push_back(&conf);
    return make_context(tubes, confs, env, sf.law.K, p_safe);
}

json stats_to_json(const PlanResult& result, const std::string& hash, std::uint64_t seed) {
    json j;
    j["config_hash"] = hash;
    j["seed"] = seed;
    j["status"] = result.status == PlanStatus::Solved
                      ? "solved"
                      : (result.status == PlanStatus::Timeout ? "timeout" : "invalid_start");
    j["iterations"] = result.stats.iterations;
    j["nodes"] = result.stats.nodes;
    j["plan_horizon"] = result.status == PlanStatus::Solved ? result.plan.horizon() : -1;
    j["checks"] = {{"lazy", result.stats.checks.lazy_calls},
                   {"exact", result.stats.checks.exact_calls},
                   {"volume", result.stats.checks.volume_calls}};
    return j;
}

void write_tree_csv(const std::string& path, const std::vector<TreeNode>& tree) {
    std::ostringstream out;
    out.precision(17);
    out << "id,parent,t,duration,active";
    if (!tree.empty())
        for (Eigen::Index i = 0; i < tree.front().x.size(); ++i) out << ",x" << i;
    out << '\n';
    for (const auto& node : tree) {
        out << node.id << ',' << node.parent << ',' << node.t << ',' << node.duration << ','
            << (node.active ? 1 : 0);
        for (Eigen::Index i = 0; i < node.x.size(); ++i) out << ',' << node.x(i);
        out << '\n';
    }
    io::write_file(path, out.str());
}

void write_sawtooth_csv(const std::string& path, AmbiguityTube& tube) {
    std::ostringstream out;
    out.precision(17);
    out << "t,eps,anchor_tau\n";
    for (int t = 0; t <= tube.t_max(); ++t) {
        const auto r = tube.radius_at(t);
        out << t << ',' << r.eps << ',' << tube.anchor(r.anchor).tau << '\n';
    }
    io::write_file(path, out.str());
}

Environment environment_from_config(const json& cfg, int state_dim) {
    if (cfg.contains("family"))
        return make_environment(family_by_name(cfg.at("family").get<std::string>()),
                                cfg.value("width", 1.0), cfg.value("seed", 0ULL), state_dim);
    return environment_from_json(cfg);
}

// ---------------------------------------------------------------- commands

int cmd_gen_data(const std::string& system_path, const std::string& gt_path, long long count,
                 const std::string& taus_csv, std::uint64_t seed, const std::string& out_dir) {
    const SystemFile sf = load_system_file(system_path);
    const GroundTruth gt = load_ground_truth_file(gt_path);
    const std::vector<int> taus = parse_int_list(taus_csv);
    generate_error_archive(out_dir, sf.sys, sf.law, gt, count, taus, seed);
    std::cerr << "archive written to " << out_dir << " (" << count << " trajectories, "
              << taus.size() << " anchors)\n";
    return 0;
}

int cmd_learn_tube(const std::string& system_path, const std::string& data_dir, double beta,
                   double beta_moments, int cluster_k, int t_max, const std::string& projections_csv,
                   std::uint64_t seed, const std::string& out_dir) {
    const SystemFile sf = load_system_file(system_path);
    const ArchiveManifest manifest = read_manifest(data_dir);

    const Eigen::MatrixXd e0 = load_block(data_dir, "e0");
    const Eigen::MatrixXd w = load_block(data_dir, "w");
    const MomentBounds moments = estimate_moments(e0, w, sf.support, 1, beta_moments);

    TubeSpec spec;
    spec.taus = manifest.taus;
    spec.beta = beta;
    spec.moment_p0 = moments.p0;
    spec.moment_pw = moments.pw;
    spec.t_max = t_max;
    spec.cluster_k = cluster_k;
    spec.seed = seed;

    std::vector<std::string> names;
    {
        std::stringstream ss(projections_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) names.push_back(item);
    }
    if (names.empty()) throw std::runtime_error("learn-tube: no projections given");

    std::vector<Eigen::MatrixXd> projections;
    for (const auto& name : names) projections.push_back(projection_by_name(name, sf));

    const std::vector<AnchorSamples> anchors = load_anchor_samples(data_dir);
    fs::create_directories(out_dir);

    if (names.size() == 1) {
        AmbiguityTube tube =
            build_tube(anchors, sf.sys, sf.law, spec, sf.support, projections.front());
        tube.save_file((fs::path(out_dir) / ("tube_" + names[0] + ".bin")).string());
        write_sawtooth_csv((fs::path(out_dir) / ("sawtooth_" + names[0] + ".csv")).string(), tube);
    } else {
        LowDimFamily family = build_family(anchors, sf.sys, sf.law, spec, sf.support, projections);
        for (std::size_t l = 0; l < names.size(); ++l) {
            family.tubes[l].save_file((fs::path(out_dir) / ("tube_" + names[l] + ".bin")).string());
            write_sawtooth_csv((fs::path(out_dir) / ("sawtooth_" + names[l] + ".csv")).string(),
                               family.tubes[l]);
        }
    }
    std::cerr << "tube(s) written to " << out_dir << "\n";
    return 0;
}

int cmd_learn_confidence(const std::vector<std::string>& tube_paths, double p_safe,
                         const std::string& out_dir) {
    fs::create_directories(out_dir);
    const double target = lazy_mass_target(p_safe, static_cast<int>(tube_paths.size()));
    for (const auto& path : tube_paths) {
        AmbiguityTube tube = AmbiguityTube::load_file(path);
        const ConfidenceTube conf = build_confidence_tube(tube, target);
        const std::string stem = fs::path(path).stem().string();
        conf.save_file((fs::path(out_dir) / ("conf_" + stem + ".json")).string());
    }
    std::cerr << "confidence tube(s) written to " << out_dir << "\n";
    return 0;
}

int cmd_plan(const std::string& system_path, const std::string& env_path,
             const std::vector<std::string>& tube_paths, const std::vector<std::string>& conf_paths,
             const std::string& checker, double p_safe, std::uint64_t seed, long long budget,
             double timeout_s, const std::string& x_init_csv, const std::string& control_lo_csv,
             const std::string& control_hi_csv, const std::string& out_dir, const json& meta) {
    const SystemFile sf = load_system_file(system_path);
    const Environment env = load_environment_file(env_path);

    LoadedChannels loaded;
    for (const auto& path : tube_paths) loaded.tubes.push_back(AmbiguityTube::load_file(path));
    for (const auto& path : conf_paths) loaded.confs.push_back(ConfidenceTube::load_file(path));
    CheckerContext ctx = build_context(loaded, env, sf, p_safe);

    PlannerConfig cfg;
    cfg.seed = seed;
    cfg.max_iterations = budget;
    cfg.timeout_s = timeout_s;
    cfg.checker = checker_from_string(checker);
    cfg.x_init = parse_vector(x_init_csv);
    cfg.control_lo = parse_vector(control_lo_csv);
    cfg.control_hi = parse_vector(control_hi_csv);

    const PlanResult result = plan(sf.sys, sf.law, ctx, env, cfg);

    fs::create_directories(out_dir);
    const std::string hash = config_hash(meta);
    if (result.status == PlanStatus::Solved) {
        json plan_j = plan_to_json(result.plan);
        plan_j["config_hash"] = hash;
        plan_j["seed"] = seed;
        io::write_file((fs::path(out_dir) / "plan.json").string(), plan_j.dump(2) + "\n");
    }
    write_tree_csv((fs::path(out_dir) / "tree.csv").string(), result.tree);
    io::write_file((fs::path(out_dir) / "stats.json").string(),
                   stats_to_json(result, hash, seed).dump(2) + "\n");
    std::cerr << "plan status: " << stats_to_json(result, hash, seed)["status"] << ", wall "
              << result.stats.wall_s << " s\n";

    if (result.status == PlanStatus::Timeout) return kExitTimeout;
    if (result.status == PlanStatus::InvalidStart) return kExitInvalidStart;
    return 0;
}

int cmd_validate(const std::string& system_path, const std::string& env_path,
                 const std::string& gt_path, const std::string& plan_path, int rollouts,
                 std::uint64_t seed, const std::string& tube_path, const std::string& out_dir,
                 const json& meta) {
    const SystemFile sf = load_system_file(system_path);
    const Environment env = load_environment_file(env_path);
    const GroundTruth gt = load_ground_truth_file(gt_path);
    const MotionPlan mplan = plan_from_json(json::parse(io::read_file(plan_path)));

    std::optional<AmbiguityTube> tube;
    if (!tube_path.empty()) tube = AmbiguityTube::load_file(tube_path);

    const ValidationReport report = validate_plan(mplan, sf.sys, sf.law, gt, rollouts, env, seed,
                                                  tube ? &*tube : nullptr);

    fs::create_directories(out_dir);
    io::write_file((fs::path(out_dir) / "report.csv").string(), report_csv(report));
    json j;
    j["config_hash"] = config_hash(meta);
    j["seed"] = seed;
    j["rollouts"] = report.rollouts;
    j["max_collision_freq"] = report.max_collision_freq();
    j["goal_freq"] = report.goal_freq;
    j["goal_wilson_lo"] = report.goal_wilson_lo;
    io::write_file((fs::path(out_dir) / "report.json").string(), j.dump(2) + "\n");
    std::cerr << "validation: max step collision " << report.max_collision_freq() << ", goal "
              << report.goal_freq << "\n";
    return 0;
}

// one benchmark trial, isolated state, merged by index
struct TrialOutcome {
    bool solved = false;
    double wall_s = 0.0;
    long long nodes = 0;
    MotionPlan plan;
    PlanStats stats;
};

TrialOutcome run_trial(const SystemFile& sf, const Environment& env,
                       const std::vector<AmbiguityTube>& tubes,
                       const std::vector<ConfidenceTube>& confs, double p_safe,
                       const std::string& checker, std::uint64_t seed, long long budget,
                       double timeout_s) {
    LoadedChannels loaded{tubes, confs};  // copies: tubes mutate caches while planning
    CheckerContext ctx = build_context(loaded, env, sf, p_safe);
    PlannerConfig cfg;
    cfg.seed = seed;
    cfg.max_iterations = budget;
    cfg.timeout_s = timeout_s;
    cfg.checker = checker_from_string(checker);
    cfg.x_init = Eigen::VectorXd::Zero(sf.sys.n());
    cfg.x_init(0) = 1.0;
    cfg.x_init(1) = 1.0;
    cfg.control_lo = Eigen::VectorXd::Constant(sf.sys.m(), -1.0);
    cfg.control_hi = Eigen::VectorXd::Constant(sf.sys.m(), 1.0);

    const PlanResult result = plan(sf.sys, sf.law, ctx, env, cfg);
    TrialOutcome outcome;
    outcome.solved = result.status == PlanStatus::Solved;
    outcome.wall_s = result.stats.wall_s;
    outcome.nodes = result.stats.nodes;
    outcome.plan = result.plan;
    outcome.stats = result.stats;
    return outcome;
}

int cmd_benchmark(const std::string& config_path, const std::string& out_dir) {
    const json cfg = json::parse(io::read_file(config_path));
    const std::string hash = config_hash(cfg);

    const SystemFile sf = cfg.contains("system_file")
                              ? load_system_file(cfg.at("system_file").get<std::string>())
                              : system_from_json(cfg.at("system"));

    std::vector<AmbiguityTube> tubes;
    for (const auto& path : cfg.at("tubes").get<std::vector<std::string>>())
        tubes.push_back(AmbiguityTube::load_file(path));
    std::vector<ConfidenceTube> confs;
    for (const auto& path : cfg.at("confs").get<std::vector<std::string>>())
        confs.push_back(ConfidenceTube::load_file(path));

    const double p_safe = cfg.contains("risk") ? 1.0 - cfg.at("risk").get<double>()
                                               : cfg.at("p_safe").get<double>();
    const int trials = cfg.value("trials", 10);
    const long long budget = cfg.value("budget", 200000LL);
    const double timeout_s = cfg.value("timeout_s", 300.0);
    const std::uint64_t seed0 = cfg.value("seed", 0ULL);
    const auto checkers = cfg.at("checkers").get<std::vector<std::string>>();

    const bool keep_trials = cfg.value("keep_trials", false);
    fs::create_directories(out_dir);
    std::ostringstream rows, summary;
    rows.precision(17);
    summary.precision(17);
    rows << "env,checker,trial,seed,config_hash,solved,wall_s,nodes\n";
    summary << "env,checker,seed,config_hash,success_rate,mean_time_solved_s,mean_nodes\n";
    json summary_json = json::array();

    for (const auto& env_cfg : cfg.at("environments")) {
        const std::string env_name = env_cfg.value("name", env_cfg.value("family", "env"));
        const Environment env = environment_from_config(env_cfg, sf.sys.n());
        for (const auto& checker : checkers) {
            std::vector<std::future<TrialOutcome>> futures;
            for (int trial = 0; trial < trials; ++trial) {
                const std::uint64_t seed = seed0 + 1000ULL * trial;
                futures.push_back(std::async(std::launch::async, run_trial, std::cref(sf),
                                             std::cref(env), std::cref(tubes), std::cref(confs),
                                             p_safe, checker, seed, budget, timeout_s));
            }
            int solved = 0;
            double time_sum = 0.0;
            double node_sum = 0.0;
            for (int trial = 0; trial < trials; ++trial) {
                const TrialOutcome outcome = futures[static_cast<std::size_t>(trial)].get();
                rows << env_name << ',' << checker << ',' << trial << ','
                     << seed0 + 1000ULL * trial << ',' << hash << ',' << (outcome.solved ? 1 : 0)
                     << ',' << outcome.wall_s << ',' << outcome.nodes << '\n';
                if (outcome.solved) {
                    ++solved;
                    time_sum += outcome.wall_s;
                }
                node_sum += static_cast<double>(outcome.nodes);
                if (keep_trials && outcome.solved) {
                    const fs::path trial_dir = fs::path(out_dir) / "trials" /
                                               (env_name + "_" + checker + "_" + std::to_string(trial));
                    fs::create_directories(trial_dir);
                    json plan_j = plan_to_json(outcome.plan);
                    plan_j["config_hash"] = hash;
                    plan_j["seed"] = seed0 + 1000ULL * trial;
                    io::write_file((trial_dir / "plan.json").string(), plan_j.dump(2) + "\n");
                }
            }
            const double rate = static_cast<double>(solved) / trials;
            const double mean_time = solved > 0 ? time_sum / solved : -1.0;
            summary << env_name << ',' << checker << ',' << seed0 << ',' << hash << ',' << rate
                    << ',' << mean_time << ',' << node_sum / trials << '\n';
            summary_json.push_back({{"env", env_name},
                                    {"checker", checker},
                                    {"config_hash", hash},
                                    {"success_rate", rate},
                                    {"mean_time_solved_s", mean_time},
                                    {"mean_nodes", node_sum / trials}});
            std::cerr << env_name << " / " << checker << ": " << solved << "/" << trials
                      << " solved\n";
        }
    }
    io::write_file((fs::path(out_dir) / "trials.csv").string(), rows.str());
    io::write_file((fs::path(out_dir) / "summary.csv").string(), summary.str());
    io::write_file((fs::path(out_dir) / "summary.json").string(), summary_json.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- pipeline

// content-addressed stage cache: a stage reruns iff the hash of its inputs
// (config subtree + upstream hashes) changed or its outputs are missing
struct StageCache {
    fs::path dir;

    bool fresh(const std::string& stage, const std::string& input_hash,
               const std::vector<fs::path>& outputs) const {
        const fs::path marker = dir / ("stage_" + stage + ".hash");
        if (!fs::exists(marker)) return false;
        if (io::read_file(marker.string()) != input_hash) return false;
        for (const auto& out : outputs)
            if (!fs::exists(out)) return false;
        return true;
    }

    void record(const std::string& stage, const std::string& input_hash) const {
        io::write_file((dir / ("stage_" + stage + ".hash")).string(), input_hash);
    }
};

int cmd_pipeline(const std::string& config_path, const std::string& out_dir) {
    json cfg = json::parse(io::read_file(config_path));

    // environment overrides, budget and seed only
    if (const char* env_seed = std::getenv("WDR_SEED"))
        cfg["plan"]["seed"] = std::stoull(env_seed);
    if (const char* env_budget = std::getenv("WDR_BUDGET"))
        cfg["plan"]["budget"] = std::stoll(env_budget);

    fs::create_directories(out_dir);
    const StageCache cache{fs::path(out_dir)};
    const std::string full_hash = config_hash(cfg);

    const SystemFile sf = cfg.contains("system_file")
                              ? load_system_file(cfg.at("system_file").get<std::string>())
                              : system_from_json(cfg.at("system"));
    const GroundTruth gt = ground_truth_from_json(cfg.at("ground_truth"));
    const Environment env = environment_from_config(cfg.at("environment"), sf.sys.n());

    const fs::path env_file = fs::path(out_dir) / "environment.json";
    save_environment_file(env_file.string(), env);
    const fs::path sys_file = fs::path(out_dir) / "system.json";
    save_system_file(sys_file.string(), sf);
    const fs::path gt_file = fs::path(out_dir) / "ground_truth.json";
    save_ground_truth_file(gt_file.string(), gt);

    // stage 1: data
    const json data_cfg = cfg.at("data");
    const std::string data_hash = config_hash(
        json{{"system", system_to_json(sf)}, {"gt", cfg.at("ground_truth")}, {"data", data_cfg}});
    const fs::path data_dir = fs::path(out_dir) / "data";
    if (!cache.fresh("data", data_hash, {data_dir / "manifest.json"})) {
        generate_error_archive(data_dir.string(), sf.sys, sf.law, gt,
                               data_cfg.at("count").get<long long>(),
                               data_cfg.at("taus").get<std::vector<int>>(),
                               data_cfg.value("seed", 0ULL));
        cache.record("data", data_hash);
        std::cerr << "stage data: generated\n";
    } else {
        std::cerr << "stage data: cache hit\n";
    }

    // stage 2: tubes
    const json tube_cfg = cfg.at("tube");
    const auto projections = tube_cfg.value("projections", std::vector<std::string>{"ws"});
    const std::string tube_hash = config_hash(json{{"upstream", data_hash}, {"tube", tube_cfg}});
    const fs::path tube_dir = fs::path(out_dir) / "tubes";
    std::vector<fs::path> tube_files;
    for (const auto& name : projections) tube_files.push_back(tube_dir / ("tube_" + name + ".bin"));
    if (!cache.fresh("tube", tube_hash, tube_files)) {
        cmd_learn_tube(sys_file.string(), data_dir.string(), tube_cfg.value("beta", 0.05),
                       tube_cfg.value("beta_moments", tube_cfg.value("beta", 0.05)),
                       tube_cfg.value("cluster_k", 100), tube_cfg.value("t_max", 200),
                       [&] {
                           std::string csv;
                           for (const auto& name : projections) csv += name + ",";
                           return csv;
                       }(),
                       tube_cfg.value("seed", 0ULL), tube_dir.string());
        cache.record("tube", tube_hash);
        std::cerr << "stage tube: built\n";
    } else {
        std::cerr << "stage tube: cache hit\n";
    }

    const json plan_cfg = cfg.at("plan");
    const double p_safe = plan_cfg.contains("risk") ? 1.0 - plan_cfg.at("risk").get<double>()
                                                    : plan_cfg.at("p_safe").get<double>();

    // stage 3: confidence tubes
    const std::string conf_hash =
        config_hash(json{{"upstream", tube_hash}, {"p_safe", p_safe}});
    std::vector<fs::path> conf_files;
    for (const auto& name : projections)
        conf_files.push_back(tube_dir / ("conf_tube_" + name + ".json"));
    if (!cache.fresh("confidence", conf_hash, conf_files)) {
        std::vector<std::string> tube_paths;
        for (const auto& file : tube_files) tube_paths.push_back(file.string());
        cmd_learn_confidence(tube_paths, p_safe, tube_dir.string());
        cache.record("confidence", conf_hash);
        std::cerr << "stage confidence: built\n";
    } else {
        std::cerr << "stage confidence: cache hit\n";
    }

    // stage 4: plan
    const std::string plan_hash = config_hash(json{
        {"upstream", conf_hash}, {"env", environment_to_json(env)}, {"plan", plan_cfg}});
    const fs::path plan_dir = fs::path(out_dir) / "plan";
    int plan_rc = 0;
    if (!cache.fresh("plan", plan_hash, {plan_dir / "stats.json"})) {
        std::vector<std::string> tube_paths, conf_paths;
        for (const auto& file : tube_files) tube_paths.push_back(file.string());
        for (const auto& file : conf_files) conf_paths.push_back(file.string());
        auto vec_csv = [](const json& arr) {
            std::ostringstream csv;
            csv.precision(17);
            for (const auto& v : arr) csv << v.get<double>() << ',';
            return csv.str();
        };
        plan_rc = cmd_plan(sys_file.string(), env_file.string(), tube_paths, conf_paths,
                           plan_cfg.value("checker", "hybrid"), p_safe,
                           plan_cfg.value("seed", 0ULL), plan_cfg.value("budget", 200000LL),
                           plan_cfg.value("timeout_s", 0.0), vec_csv(plan_cfg.at("x_init")),
                           vec_csv(plan_cfg.at("control_lo")), vec_csv(plan_cfg.at("control_hi")),
                           plan_dir.string(), cfg);
        if (plan_rc != 0) {
            std::cerr << "pipeline halted at stage plan\n";
            return plan_rc;
        }
        cache.record("plan", plan_hash);
        std::cerr << "stage plan: solved\n";
    } else {
        std::cerr << "stage plan: cache hit\n";
    }

    // stage 5: validate
    const json val_cfg = cfg.value("validate", json{{"rollouts", 10000}, {"seed", 1}});
    const std::string val_hash = config_hash(json{{"upstream", plan_hash}, {"validate", val_cfg}});
    const fs::path val_dir = fs::path(out_dir) / "validate";
    if (!cache.fresh("validate", val_hash, {val_dir / "report.json"})) {
        cmd_validate(sys_file.string(), env_file.string(), gt_file.string(),
                     (plan_dir / "plan.json").string(), val_cfg.value("rollouts", 10000),
                     val_cfg.value("seed", 1ULL), tube_files.front().string(), val_dir.string(),
                     cfg);
        cache.record("validate", val_hash);
        std::cerr << "stage validate: done\n";
    } else {
        std::cerr << "stage validate: cache hit\n";
    }

    io::write_file((fs::path(out_dir) / "pipeline_manifest.json").string(),
                   json{{"config_hash", full_hash}}.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven distributionally robust motion planning"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "simulate error trajectories into a sample archive");
    std::string g_system, g_gt, g_taus, g_out;
    long long g_count = 100000;
    std::uint64_t g_seed = 0;
    gen->add_option("--system", g_system)->required();
    gen->add_option("--ground-truth", g_gt)->required();
    gen->add_option("--count", g_count);
    gen->add_option("--taus", g_taus)->required();
    gen->add_option("--seed", g_seed);
    gen->add_option("--out-dir", g_out)->required();

    // learn-tube
    auto* lt = app.add_subcommand("learn-tube", "build ambiguity tubes from a sample archive");
    std::string t_system, t_data, t_projections = "ws", t_out;
    double t_beta = 0.05, t_beta_moments = -1.0;
    int t_cluster = 100, t_tmax = 200;
    std::uint64_t t_seed = 0;
    lt->add_option("--system", t_system)->required();
    lt->add_option("--data", t_data)->required();
    lt->add_option("--beta", t_beta);
    lt->add_option("--beta-moments", t_beta_moments);
    lt->add_option("--cluster-k", t_cluster);
    lt->add_option("--t-max", t_tmax);
    lt->add_option("--projections", t_projections);
    lt->add_option("--seed", t_seed);
    lt->add_option("--out-dir", t_out)->required();

    // learn-confidence
    auto* lc = app.add_subcommand("learn-confidence", "build confidence tubes by bisection");
    std::vector<std::string> c_tubes;
    std::optional<double> c_p_safe, c_risk;
    std::string c_out;
    lc->add_option("--tube", c_tubes)->required();
    lc->add_option("--p-safe", c_p_safe);
    lc->add_option("--risk", c_risk);
    lc->add_option("--out-dir", c_out)->required();

    // plan
    auto* pl = app.add_subcommand("plan", "grow a validity-checked tree and extract a plan");
    std::string p_system, p_env, p_checker = "hybrid", p_xinit, p_clo, p_chi, p_out;
    std::vector<std::string> p_tubes, p_confs;
    std::optional<double> p_p_safe, p_risk;
    std::uint64_t p_seed = 0;
    long long p_budget = 200000;
    double p_timeout = 0.0;
    pl->add_option("--system", p_system)->required();
    pl->add_option("--env", p_env)->required();
    pl->add_option("--tube", p_tubes)->required();
    pl->add_option("--conf", p_confs)->required();
    pl->add_option("--checker", p_checker);
    pl->add_option("--p-safe", p_p_safe);
    pl->add_option("--risk", p_risk);
    pl->add_option("--seed", p_seed);
    pl->add_option("--budget", p_budget);
    pl->add_option("--timeout", p_timeout);
    pl->add_option("--x-init", p_xinit)->required();
    pl->add_option("--control-lo", p_clo)->required();
    pl->add_option("--control-hi", p_chi)->required();
    pl->add_option("--out-dir", p_out)->required();

    // validate
    auto* va = app.add_subcommand("validate", "Monte Carlo rollout validation of a plan");
    std::string v_system, v_env, v_gt, v_plan, v_tube, v_out;
    int v_rollouts = 10000;
    std::uint64_t v_seed = 0;
    va->add_option("--system", v_system)->required();
    va->add_option("--env", v_env)->required();
    va->add_option("--ground-truth", v_gt)->required();
    va->add_option("--plan", v_plan)->required();
    va->add_option("--rollouts", v_rollouts);
    va->add_option("--seed", v_seed);
    va->add_option("--tube", v_tube);
    va->add_option("--out-dir", v_out)->required();

    // benchmark
    auto* bm = app.add_subcommand("benchmark", "trial matrix over environments and checkers");
    std::string b_config, b_out;
    bm->add_option("--config", b_config)->required();
    bm->add_option("--out-dir", b_out)->required();

    // pipeline
    auto* pp = app.add_subcommand("pipeline", "chained stages with a content-hash cache");
    std::string pp_config, pp_out;
    pp->add_option("--config", pp_config)->required();
    pp->add_option("--out-dir", pp_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_data(g_system, g_gt, g_count, g_taus, g_seed, g_out);
        if (lt->parsed())
            return cmd_learn_tube(t_system, t_data, t_beta,
                                  t_beta_moments > 0 ? t_beta_moments : t_beta, t_cluster, t_tmax,
                                  t_projections, t_seed, t_out);
        if (lc->parsed())
            return cmd_learn_confidence(c_tubes, resolve_p_safe(c_p_safe, c_risk), c_out);
        if (pl->parsed()) {
            json meta;
            meta["system"] = p_system;
            meta["env"] = p_env;
            meta["checker"] = p_checker;
            meta["seed"] = p_seed;
            meta["budget"] = p_budget;
            return cmd_plan(p_system, p_env, p_tubes, p_confs, p_checker,
                            resolve_p_safe(p_p_safe, p_risk), p_seed, p_budget, p_timeout, p_xinit,
                            p_clo, p_chi, p_out, meta);
        }
        if (va->parsed()) {
            json meta;
            meta["plan"] = v_plan;
            meta["rollouts"] = v_rollouts;
            meta["seed"] = v_seed;
            return cmd_validate(v_system, v_env, v_gt, v_plan, v_rollouts, v_seed, v_tube, v_out,
                                meta);
        }
        if (bm->parsed()) return cmd_benchmark(b_config, b_out);
        if (pp->parsed()) return cmd_pipeline(pp_config, pp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
