#pragma once

#include <string>

#include "json.hpp"
#include "wdr/geometry.hpp"
#include "wdr/linear_system.hpp"
#include "wdr/noise.hpp"

namespace wdr {

// System description file: A, B, G, K row-major, support diameters, optional
// dt annotation.
struct SystemFile {
    LinearSystem sys;
    FeedbackLaw law;
    SupportSpec support;
    double dt = 0.0;
};

nlohmann::json system_to_json(const SystemFile& sf);
SystemFile system_from_json(const nlohmann::json& j);
SystemFile load_system_file(const std::string& path);
void save_system_file(const std::string& path, const SystemFile& sf);

nlohmann::json environment_to_json(const Environment& env);
Environment environment_from_json(const nlohmann::json& j);
Environment load_environment_file(const std::string& path);
void save_environment_file(const std::string& path, const Environment& env);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth load_ground_truth_file(const std::string& path);
void save_ground_truth_file(const std::string& path, const GroundTruth& gt);

nlohmann::json plan_to_json(const MotionPlan& plan);
MotionPlan plan_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace wdr
