#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "metastate/errors.hpp"
#include "metastate/report.hpp"
#include "metastate/simulator.hpp"

namespace metastate::cli {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& dir, const std::string& name, const std::string& header) {
    std::filesystem::create_directories(dir);
    path_ = dir + "/" + name;
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw ValidationError("cannot write " + path_);
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (Index i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

SolveResult solve_model(const CommandContext& ctx, const ModelSpec& model) {
  SolverOptions opts = ctx.config.solver;
  opts.workers = ctx.workers;
  return find_minimizers(model, opts);
}

void write_minimizers_csv(const CommandContext& ctx, const ModelSpec& model,
                          const SolveResult& result) {
  CsvWriter csv(ctx.out_dir, "minimizers.csv", "state,quantity,type,spin,value");
  for (Index j = 0; j < result.minimizers.size(); ++j) {
    const Minimizer& m = result.minimizers[j];
    std::string js = std::to_string(j);
    csv.row({js, "phi", "", "", num(m.phi_value)});
    csv.row({js, "fixed_point_residual", "", "", num(m.fixed_point_residual)});
    csv.row({js, "hessian_min_eigenvalue", "", "", num(m.hessian_min_eigenvalue)});
    csv.row({js, "global", "", "", m.global ? "1" : "0"});
    for (Index a = 0; a < model.num_spins(); ++a)
      csv.row({js, "total_measure", "", model.spin_alphabet().symbol(a),
               num(m.total_measure[a])});
    for (Index b = 0; b < model.num_types(); ++b)
      for (Index a = 0; a < model.num_spins(); ++a)
        csv.row({js, "profile", model.disorder_alphabet().symbol(b),
                 model.spin_alphabet().symbol(a), num(m.profile.row(b)[a])});
  }
  std::cout << "wrote " << csv.path() << "\n";
}

void print_minimizer_table(const ModelSpec& model, const SolveResult& result) {
  std::cout << result.minimizers.size() << " local minimizer(s), " << result.failed_starts
            << " failed start(s), " << result.saddles_discarded
            << " saddle(s) discarded\n";
  for (Index j = 0; j < result.minimizers.size(); ++j) {
    const Minimizer& m = result.minimizers[j];
    std::printf("  [%zu]%s phi=%.12g residual=%.3g min_eig=%.6g total=(", j,
                m.global ? "*" : " ", m.phi_value, m.fixed_point_residual,
                m.hessian_min_eigenvalue);
    for (Index a = 0; a < model.num_spins(); ++a)
      std::printf("%s%.6f", a ? "," : "", m.total_measure[a]);
    std::printf(")\n");
  }
}

double scan_axis_value(const ModelBlock& base, const std::string& axis, double value,
                       ModelBlock& out) {
  out = base;
  if (axis == "beta") {
    out.beta = value;
  } else if (axis == "field_strength") {
    out.field_strength = value;
  } else if (axis == "field_scale") {
    if (out.fields.empty()) throw ValidationError("field_scale needs model.fields");
    for (double& h : out.fields) h *= value;
  } else {
    throw ValidationError("unknown scan axis: " + axis);
  }
  return value;
}

// Equal-depth gap along the scan axis. Potts uses the reduced free energy of
// the order parameter; Ising compares the two outermost phases.
double transition_gap(const CommandContext& ctx, const ModelBlock& block) {
  if (block.family == ModelFamily::kQuadraticPotts)
    return potts_reduced_minimum(block.q, block.beta, block.field_strength).value;
  ModelSpec model = build_model(block);
  SolveResult r = solve_model(ctx, model);
  if (r.minimizers.size() < 2)
    throw NoBracket("fewer than two phases inside the scan interval");
  auto mean = [](const Minimizer& m) { return m.total_measure[0] - m.total_measure[1]; };
  const Minimizer* lo = &r.minimizers.front();
  const Minimizer* hi = lo;
  for (const auto& m : r.minimizers) {
    if (mean(m) < mean(*lo)) lo = &m;
    if (mean(m) > mean(*hi)) hi = &m;
  }
  return hi->phi_value - lo->phi_value;
}

bool two_phase_predicate(const CommandContext& ctx, const ModelBlock& block) {
  ModelSpec model = build_model(block);
  return solve_model(ctx, model).minimizers.size() >= 2;
}

}  // namespace

void cmd_solve(const CommandContext& ctx) {
  ModelSpec model = build_model(ctx.config.model);
  SolveResult result = solve_model(ctx, model);
  print_minimizer_table(model, result);
  write_minimizers_csv(ctx, model, result);
}

void cmd_metastate(const CommandContext& ctx) {
  ModelSpec model = build_model(ctx.config.model);
  SolveResult result = solve_model(ctx, model);
  print_minimizer_table(model, result);

  MetastateOptions opts;
  opts.mc_samples = ctx.config.weights.samples;
  opts.seed = ctx.config.weights.seed;
  opts.lp_tolerance = ctx.config.weights.lp_tolerance;
  opts.pair_tolerance = ctx.config.weights.pair_tolerance;
  opts.workers = ctx.workers;
  MetastateReport report = build_metastate_report(model, result.minimizers, opts);

  std::filesystem::create_directories(ctx.out_dir);
  std::string json_path = ctx.out_dir + "/report.json";
  std::ofstream json_out(json_path, std::ios::binary | std::ios::trunc);
  json_out << report_to_json_string(model, report);
  json_out.close();

  CsvWriter csv(ctx.out_dir, "weights.csv", "state,quantity,type,value");
  for (Index j = 0; j < report.entries.size(); ++j) {
    const MetastateEntry& e = report.entries[j];
    std::string js = std::to_string(j);
    csv.row({js, "weight", "", num(e.weight)});
    csv.row({js, "standard_error", "", num(e.standard_error)});
    csv.row({js, "visible", "", e.certificate.visible ? "1" : "0"});
    csv.row({js, "count", "", std::to_string(e.count)});
    csv.row({js, "phi", "", num(e.minimizer.phi_value)});
    for (Index b = 0; b < model.num_types(); ++b)
      csv.row({js, "stability", model.disorder_alphabet().symbol(b), num(e.stability[b])});
  }
  std::cout << report_to_text(model, report);
  std::cout << "wrote " << json_path << " and " << csv.path() << "\n";
}

void cmd_scan(const CommandContext& ctx) {
  const ScanBlock& scan = ctx.config.scan;
  if (!(scan.min < scan.max)) throw ValidationError("scan needs min < max");
  CsvWriter csv(ctx.out_dir, "scan.csv",
                "grid_axis,grid_value,axis,located,gap_at_min,gap_at_max");
  for (double gv : scan.grid) {
    ModelBlock base = ctx.config.model;
    if (!scan.grid_axis.empty()) scan_axis_value(ctx.config.model, scan.grid_axis, gv, base);

    double lo = scan.min, hi = scan.max;
    double located;
    double glo, ghi;
    if (scan.mode == ScanMode::kTransition) {
      ModelBlock probe;
      scan_axis_value(base, scan.axis, lo, probe);
      glo = transition_gap(ctx, probe);
      scan_axis_value(base, scan.axis, hi, probe);
      ghi = transition_gap(ctx, probe);
      if ((glo > 0) == (ghi > 0))
        throw NoBracket("equal-depth gap does not change sign on the scan interval");
      for (int it = 0; it < 200 && hi - lo > scan.tolerance; ++it) {
        double mid = 0.5 * (lo + hi);
        scan_axis_value(base, scan.axis, mid, probe);
        double gm = transition_gap(ctx, probe);
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
          ghi = gm;
        }
      }
      located = 0.5 * (lo + hi);
    } else {
      ModelBlock probe;
      scan_axis_value(base, scan.axis, lo, probe);
      bool plo = two_phase_predicate(ctx, probe);
      scan_axis_value(base, scan.axis, hi, probe);
      bool phi_pred = two_phase_predicate(ctx, probe);
      if (plo == phi_pred)
        throw NoBracket("phase count does not change on the scan interval");
      glo = plo ? 1.0 : 0.0;
      ghi = phi_pred ? 1.0 : 0.0;
      for (int it = 0; it < 200 && hi - lo > scan.tolerance; ++it) {
        double mid = 0.5 * (lo + hi);
        scan_axis_value(base, scan.axis, mid, probe);
        if (two_phase_predicate(ctx, probe) == plo)
          lo = mid;
        else
          hi = mid;
      }
      located = 0.5 * (lo + hi);
    }
    csv.row({scan.grid_axis, num(gv), scan.axis, num(located), num(glo), num(ghi)});
    std::printf("%s=%.17g: %s* = %.12f\n", scan.grid_axis.empty() ? "run" : scan.grid_axis.c_str(),
                gv, scan.axis.c_str(), located);
  }
  std::cout << "wrote " << csv.path() << "\n";
}

void cmd_simulate(const CommandContext& ctx) {
  ModelSpec model = build_model(ctx.config.model);
  SolveResult result = solve_model(ctx, model);
  std::vector<Minimizer> global = result.global_minimizers();
  if (global.empty()) throw ValidationError("no global minimizer to simulate around");
  print_minimizer_table(model, result);

  const SimulateBlock& sim = ctx.config.simulate;
  CsvWriter csv(ctx.out_dir, "simulate.csv",
                "n,state,frequency,standard_error,epsilon,draws");
  CsvWriter draws_csv(ctx.out_dir, "simulate_draws.csv", "n,draw,quantity,value");
  for (Index n : sim.n) {
    EmpiricalWeightEstimate est =
        empirical_weights(model, global, n, sim.n_samples, sim.epsilon,
                          sim.dominance_threshold, sim.seed, sim.enumeration_budget,
                          ctx.workers);
    for (Index j = 0; j < est.frequencies.size(); ++j)
      csv.row({std::to_string(n), std::to_string(j), num(est.frequencies[j]),
               num(est.standard_errors[j]), num(est.epsilon),
               std::to_string(est.n_samples)});
    double uf = est.unresolved_fraction;
    double use = std::sqrt(uf * (1 - uf) / static_cast<double>(est.n_samples));
    csv.row({std::to_string(n), "unresolved", num(uf), num(use), num(est.epsilon),
             std::to_string(est.n_samples)});
    std::printf("n=%zu:", n);
    for (double f : est.frequencies) std::printf(" %.4f", f);
    std::printf(" (unresolved %.4f)\n", uf);

    for (Index d = 0; d < est.draws.size(); ++d) {
      const DrawRecord& rec = est.draws[d];
      std::string ns = std::to_string(n), ds = std::to_string(d);
      draws_csv.row({ns, ds, "seed", std::to_string(rec.seed)});
      draws_csv.row({ns, ds, "attributed", std::to_string(rec.attributed)});
      draws_csv.row({ns, ds, "remainder", num(rec.remainder)});
      for (Index j = 0; j < rec.ball_masses.size(); ++j)
        draws_csv.row({ns, ds, "mass_" + std::to_string(j), num(rec.ball_masses[j])});
      for (Index b = 0; b < rec.pi_hat.size(); ++b)
        draws_csv.row({ns, ds, "pi_hat_" + model.disorder_alphabet().symbol(b),
                       num(rec.pi_hat[b])});
    }
  }
  std::cout << "wrote " << csv.path() << " and " << draws_csv.path() << "\n";
}

void cmd_plotdata(const CommandContext& ctx) {
  const ModelBlock& m = ctx.config.model;
  if (m.family != ModelFamily::kQuadraticPotts)
    throw ValidationError("plotdata draws the Potts order-parameter curve; "
                          "set model.family = quadratic-potts");
  const PlotBlock& plot = ctx.config.plot;
  if (!(plot.points >= 2 && plot.u_min >= 0.0 && plot.u_max > plot.u_min &&
        plot.u_max < 1.0))
    throw ValidationError("plot grid is out of range");
  CsvWriter csv(ctx.out_dir, "phi_curve.csv", "kind,u,phi");
  for (int i = 0; i < plot.points; ++i) {
    double u = plot.u_min +
               (plot.u_max - plot.u_min) * static_cast<double>(i) / (plot.points - 1);
    csv.row({"curve", num(u), num(phi_reduced_potts(m.q, m.beta, m.field_strength, u))});
  }
  csv.row({"minimizer", num(0.0), num(0.0)});
  PottsReducedMinimum mm = potts_reduced_minimum(m.q, m.beta, m.field_strength, plot.u_max);
  if (mm.u > 0.01) csv.row({"minimizer", num(mm.u), num(mm.value)});
  std::cout << "wrote " << csv.path() << "\n";
}

}  // namespace metastate::cli
