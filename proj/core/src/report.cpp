#include "metastate/report.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "metastate/errors.hpp"

namespace metastate {

MetastateReport build_metastate_report(const ModelSpec& model,
                                       std::span<const Minimizer> minimizers,
                                       const MetastateOptions& options) {
  std::vector<Minimizer> global;
  for (const auto& m : minimizers)
    if (m.global) global.push_back(m);
  if (global.empty())
    throw ValidationError("metastate report needs at least one global minimizer");

  std::vector<StabilityVector> stability;
  stability.reserve(global.size());
  double route_diff = 0.0;
  for (const auto& m : global) {
    StabilityVector direct = stability_vector_direct(model, m);
    StabilityVector partition = stability_vector_partition(model, m.total_measure);
    route_diff = std::max(route_diff, sup_distance(direct, partition));
    stability.push_back(std::move(direct));
  }

  MetastateReport report;
  report.options = options;
  report.stability_route_max_diff = route_diff;
  report.nondeg2 = check_nondegeneracy2(stability, options.pair_tolerance);

  VisibilityReport vis = visibility(stability, options.lp_tolerance);
  WeightVector weights = weights_mc(stability, model.pi(), options.mc_samples, options.seed,
                                    options.workers);
  report.mc_samples = weights.samples;
  report.ties_discarded = weights.ties_discarded;

  for (Index j = 0; j < global.size(); ++j) {
    if (!vis.entries[j].visible && weights.counts[j] != 0)
      throw std::runtime_error(
          "an invisible state collected Monte Carlo mass; this signals a bug");
    MetastateEntry entry;
    entry.minimizer = global[j];
    entry.stability = stability[j];
    entry.certificate = vis.entries[j];
    entry.weight = weights.weights[j];
    entry.standard_error = weights.standard_errors[j];
    entry.count = weights.counts[j];
    if (vis.entries[j].visible)
      entry.kernels = mean_field_map(model, global[j].total_measure).rows();
    report.entries.push_back(std::move(entry));
  }
  return report;
}

namespace {

using nlohmann::json;

json vector_to_json(std::span<const double> v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

json entry_to_json(const ModelSpec& model, const MetastateEntry& e) {
  json j;
  j["phi"] = e.minimizer.phi_value;
  j["fixed_point_residual"] = e.minimizer.fixed_point_residual;
  j["hessian_min_eigenvalue"] = e.minimizer.hessian_min_eigenvalue;
  j["total_measure"] = vector_to_json(e.minimizer.total_measure.entries());
  json profile = json::array();
  for (Index b = 0; b < e.minimizer.profile.num_types(); ++b)
    profile.push_back(vector_to_json(e.minimizer.profile.row(b).entries()));
  j["profile"] = profile;
  j["stability_vector"] = vector_to_json(e.stability.entries());
  j["visible"] = e.certificate.visible;
  json cert;
  if (e.certificate.margin.has_value()) cert["margin"] = *e.certificate.margin;
  cert["witness"] = vector_to_json(e.certificate.witness.entries());
  if (!e.certificate.combination.empty()) {
    cert["combination"] = json(e.certificate.combination);
    cert["combination_error"] = e.certificate.combination_error;
  }
  j["certificate"] = cert;
  j["weight"] = e.weight;
  j["weight_standard_error"] = e.standard_error;
  j["count"] = e.count;
  if (!e.kernels.empty()) {
    json kernels;
    for (Index b = 0; b < e.kernels.size(); ++b)
      kernels[model.disorder_alphabet().symbol(b)] = vector_to_json(e.kernels[b].entries());
    j["kernels"] = kernels;
  }
  return j;
}

}  // namespace

std::string report_to_json_string(const ModelSpec& model, const MetastateReport& report,
                                  int indent) {
  json j;
  j["schema_version"] = "1";
  j["spin_alphabet"] = model.spin_alphabet().symbols();
  j["disorder_alphabet"] = model.disorder_alphabet().symbols();
  j["pi"] = vector_to_json(model.pi().entries());
  json states = json::array();
  for (const auto& e : report.entries) states.push_back(entry_to_json(model, e));
  j["states"] = states;
  json diag;
  diag["nondegeneracy2_min_pairwise_distance"] = report.nondeg2.min_pairwise_distance;
  diag["stability_route_max_diff"] = report.stability_route_max_diff;
  diag["mc_samples"] = report.mc_samples;
  diag["ties_discarded"] = report.ties_discarded;
  diag["mc_seed"] = report.options.seed;
  diag["lp_tolerance"] = report.options.lp_tolerance;
  diag["pair_tolerance"] = report.options.pair_tolerance;
  j["diagnostics"] = diag;
  return j.dump(indent) + "\n";
}

std::string report_to_text(const ModelSpec& model, const MetastateReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << "metastate over " << report.entries.size() << " pure state(s), "
     << report.mc_samples << " Gaussian samples\n";
  os << "min pairwise stability distance: " << report.nondeg2.min_pairwise_distance
     << "   route cross-check: " << report.stability_route_max_diff << "\n";
  for (Index j = 0; j < report.entries.size(); ++j) {
    const auto& e = report.entries[j];
    os << "state " << j << ": phi=" << e.minimizer.phi_value
       << "  weight=" << e.weight << " +- " << e.standard_error
       << (e.certificate.visible ? "  [visible]" : "  [invisible]") << "\n";
    os << "  total measure:";
    for (Index a = 0; a < e.minimizer.total_measure.dim(); ++a)
      os << " " << model.spin_alphabet().symbol(a) << "=" << e.minimizer.total_measure[a];
    os << "\n  stability:";
    for (Index b = 0; b < e.stability.dim(); ++b)
      os << " " << model.disorder_alphabet().symbol(b) << "=" << e.stability[b];
    os << "\n";
  }
  return os.str();
}

}  // namespace metastate
