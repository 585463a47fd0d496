#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metastate/free_energy.hpp"
#include "metastate/model.hpp"

namespace metastate::cli {

enum class ModelFamily { kQuadraticIsing, kGeneralIsing, kQuadraticPotts };

struct ModelBlock {
  ModelFamily family = ModelFamily::kQuadraticIsing;
  double beta = 1.0;
  int q = 3;                      // quadratic-potts
  double field_strength = 0.0;    // quadratic-potts homogeneous field
  std::vector<double> fields;     // ising families
  std::vector<double> pi;         // empty: uniform
  std::vector<double> g_coeffs;   // general-ising: G(m) = sum_k c_k m^k
};

struct WeightsBlock {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 2;
  double lp_tolerance = 1e-9;
  double pair_tolerance = 1e-8;
};

struct SimulateBlock {
  std::vector<Index> n{40};
  Index n_samples = 100;
  double epsilon = 0.0;  // <= 0: one third of the minimum center distance
  double dominance_threshold = 0.5;
  std::uint64_t seed = 3;
  std::uint64_t enumeration_budget = 10000000;
};

enum class ScanMode { kTransition, kBoundary };

struct ScanBlock {
  std::string axis = "beta";
  double min = 0.0;
  double max = 0.0;
  double tolerance = 1e-6;
  ScanMode mode = ScanMode::kTransition;
  std::string grid_axis;           // empty: single scan
  std::vector<double> grid{0.0};   // values of the other axis
};

struct PlotBlock {
  double u_min = 0.0;
  double u_max = 0.9;
  int points = 400;
};

struct RunConfig {
  ModelBlock model;
  SolverOptions solver;
  WeightsBlock weights;
  SimulateBlock simulate;
  ScanBlock scan;
  PlotBlock plot;
};

/// Parses the key = value section format; throws ValidationError on malformed
/// input, unknown keys, or out-of-range values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Serializes a config such that parsing it again gives an equivalent run.
std::string dump_config(const RunConfig& config);

/// Instantiates the model triple described by the config.
ModelSpec build_model(const ModelBlock& block);

}  // namespace metastate::cli
