#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metastate/free_energy.hpp"
#include "metastate/stability.hpp"
#include "metastate/weights.hpp"

namespace metastate {

struct MetastateOptions {
  std::uint64_t mc_samples = 1000000;
  std::uint64_t seed = 2;
  double lp_tolerance = 1e-9;
  double pair_tolerance = 1e-8;
  int workers = 0;
};

/// One pure state of the metastate: minimizer, stability vector, visibility
/// certificate, weight, and (when visible) the kernels defining its product
/// measure.
struct MetastateEntry {
  Minimizer minimizer;
  StabilityVector stability;
  VisibilityCertificate certificate;
  double weight = 0.0;
  double standard_error = 0.0;
  std::uint64_t count = 0;
  std::vector<ProbabilityVector> kernels;  // gamma[b](.|pi nu_j), visible states only
};

struct MetastateReport {
  std::vector<MetastateEntry> entries;
  NonDegeneracy2Diagnostics nondeg2;
  /// Largest sup-distance between the two stability-vector routes over M*.
  double stability_route_max_diff = 0.0;
  std::uint64_t mc_samples = 0;
  std::uint64_t ties_discarded = 0;
  MetastateOptions options;
};

/// Runs the full metastate pipeline on the global minimizers of a solve:
/// stability vectors (both routes, cross-checked), non-degeneracy 2,
/// visibility, and Monte Carlo weights. Propagates non-degeneracy violations.
MetastateReport build_metastate_report(const ModelSpec& model,
                                       std::span<const Minimizer> minimizers,
                                       const MetastateOptions& options = {});

/// Machine-readable document, schema version "1".
std::string report_to_json_string(const ModelSpec& model, const MetastateReport& report,
                                  int indent = 2);

/// Human-readable summary.
std::string report_to_text(const ModelSpec& model, const MetastateReport& report);

}  // namespace metastate
