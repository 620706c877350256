#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwshape/dataset.hpp"
#include "pwshape/inference.hpp"
#include "pwshape/oracles.hpp"

namespace pwshape {

/// Settings shared by the command-line subcommands.
struct RunConfig {
  std::string model = "gaussian";  // gaussian | kotz
  double T = 1.0;
  double R = 0.5;
  double sigma2 = 50.0;
  int truncation = 120;
  RadialConvention convention = RadialConvention::printed;
  VStarMode vstar = VStarMode::cholesky;
  std::uint64_t seed = 0;
  std::string out;
};

ModelSpec model_from_config(const RunConfig& cfg);
std::string to_string(RadialConvention c);
std::string to_string(VStarMode m);
RadialConvention parse_convention(const std::string& s);
VStarMode parse_vstar(const std::string& s);

struct FitOutput {
  FitResult fit;
  nlohmann::json json;
  std::string trace_csv;
};

FitOutput cmd_fit(const RunConfig& cfg, const Dataset& data, const std::string& group);

/// Fits every config on every group; rows sorted by BIC* within each group.
nlohmann::json cmd_compare(const std::vector<RunConfig>& configs, const Dataset& data);

nlohmann::json cmd_lrt(const RunConfig& cfg, const Dataset& data, const std::string& group1,
                       const std::string& group2);

struct DensityRequest {
  /// Row-major mean; empty means mu = 0.
  std::vector<double> mu;
  /// Optional truncation sweep.
  std::vector<int> sweep;
};

nlohmann::json cmd_density(const RunConfig& cfg, const Dataset& data, const DensityRequest& req);
/// Density at explicit chart angles (unit-norm chart, r = 1).
nlohmann::json cmd_density_angles(const RunConfig& cfg, int N, int K, const std::vector<double>& angles,
                                  const DensityRequest& req);

nlohmann::json to_json(const OracleReport& r);

/// Serializes with 2-space indentation.
std::string dump(const nlohmann::json& j);

}  // namespace pwshape
