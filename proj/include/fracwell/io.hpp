#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fracwell/conditions.hpp"
#include "fracwell/dynamics.hpp"
#include "fracwell/space.hpp"
#include "fracwell/variational.hpp"

namespace fracwell {

std::string format_double(double v);  // %.17g

// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Columns: t,l2_norm,seminorm,E,I,D,r,int_l2
std::string trajectory_csv(const TrajectoryRecord& rec);
// Columns: delta,d_hat
std::string depth_curve_csv(const DepthCurve& curve);
std::string grid_csv(const GridFunction& u);

nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const VariationalReport& r);
nlohmann::json to_json(const DepthCurve& c);
nlohmann::json to_json(const EmbeddingConstants& c);
nlohmann::json to_json(const BoundConstants& b);
nlohmann::json to_json(const BlowupAnalysis& b);
nlohmann::json to_json(const DecayAnalysis& d);
nlohmann::json to_json(const CriticalEnergyReport& r);
nlohmann::json to_json(const HighEnergyReport& r);
nlohmann::json trajectory_summary(const TrajectoryRecord& rec);

}  // namespace fracwell
