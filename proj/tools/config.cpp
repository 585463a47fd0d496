#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "metastate/errors.hpp"

namespace metastate::cli {

namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

Sections parse_sections(const std::string& text) {
  Sections out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ValidationError("config line " + std::to_string(lineno) + ": key outside a section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (!out[section].emplace(key, value).second)
      throw ValidationError("config: duplicate key '" + key + "' in [" + section + "]");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("config: '" + key + "' is not a number: " + v);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size() || d < 0) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(d);
  } catch (const std::exception&) {
    throw ValidationError("config: '" + key + "' is not a nonnegative integer: " + v);
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  if (out.empty()) throw ValidationError("config: '" + key + "' needs at least one value");
  return out;
}

class SectionReader {
 public:
  SectionReader(const Sections& sections, const std::string& name) : name_(name) {
    auto it = sections.find(name);
    if (it != sections.end()) entries_ = &it->second;
  }

  ~SectionReader() = default;

  bool has(const std::string& key) {
    if (!entries_) return false;
    seen_.insert(key);
    return entries_->count(key) > 0;
  }
  std::string raw(const std::string& key) {
    seen_.insert(key);
    return entries_->at(key);
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? to_double(name_ + "." + key, raw(key)) : fallback;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    return has(key) ? to_u64(name_ + "." + key, raw(key)) : fallback;
  }
  std::vector<double> list(const std::string& key) {
    return to_list(name_ + "." + key, raw(key));
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
  }

  void check_unknown() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_)
      if (!seen_.count(key))
        throw ValidationError("config: unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* entries_ = nullptr;
  std::set<std::string> seen_;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += " ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Sections sections = parse_sections(text);
  static const std::set<std::string> known{"model", "solver", "weights", "simulate",
                                           "scan", "plot"};
  for (const auto& [name, entries] : sections)
    if (!known.count(name)) throw ValidationError("config: unknown section [" + name + "]");

  RunConfig cfg;

  SectionReader model(sections, "model");
  std::string family = model.text("family", "");
  if (family == "quadratic-ising")
    cfg.model.family = ModelFamily::kQuadraticIsing;
  else if (family == "general-ising")
    cfg.model.family = ModelFamily::kGeneralIsing;
  else if (family == "quadratic-potts")
    cfg.model.family = ModelFamily::kQuadraticPotts;
  else
    throw ValidationError("config: model.family must be quadratic-ising, general-ising or "
                          "quadratic-potts");
  cfg.model.beta = model.number("beta", cfg.model.beta);
  cfg.model.q = static_cast<int>(model.integer("q", cfg.model.q));
  cfg.model.field_strength = model.number("field_strength", cfg.model.field_strength);
  if (model.has("fields")) cfg.model.fields = model.list("fields");
  if (model.has("pi")) cfg.model.pi = model.list("pi");
  if (model.has("g_coeffs")) cfg.model.g_coeffs = model.list("g_coeffs");
  model.check_unknown();

  SectionReader solver(sections, "solver");
  cfg.solver.random_starts = static_cast<int>(solver.integer("random_starts", 64));
  cfg.solver.damping = solver.number("damping", cfg.solver.damping);
  cfg.solver.max_fixed_point_iters =
      static_cast<int>(solver.integer("max_fixed_point_iters", 10000));
  cfg.solver.max_newton_iters = static_cast<int>(solver.integer("max_newton_iters", 50));
  cfg.solver.residual_tolerance = solver.number("residual_tolerance", 1e-10);
  cfg.solver.dedup_tolerance = solver.number("dedup_tolerance", 1e-6);
  cfg.solver.global_gap_tolerance = solver.number("global_gap_tolerance", 1e-8);
  cfg.solver.eigenvalue_threshold = solver.number("eigenvalue_threshold", 1e-8);
  cfg.solver.seed = solver.integer("seed", 1);
  solver.check_unknown();

  SectionReader weights(sections, "weights");
  cfg.weights.samples = weights.integer("samples", cfg.weights.samples);
  cfg.weights.seed = weights.integer("seed", cfg.weights.seed);
  cfg.weights.lp_tolerance = weights.number("lp_tolerance", cfg.weights.lp_tolerance);
  cfg.weights.pair_tolerance = weights.number("pair_tolerance", cfg.weights.pair_tolerance);
  weights.check_unknown();

  SectionReader simulate(sections, "simulate");
  if (simulate.has("n")) {
    cfg.simulate.n.clear();
    for (double v : simulate.list("n")) {
      if (v < 1 || v != std::floor(v))
        throw ValidationError("config: simulate.n entries must be positive integers");
      cfg.simulate.n.push_back(static_cast<Index>(v));
    }
  }
  cfg.simulate.n_samples = simulate.integer("n_samples", cfg.simulate.n_samples);
  cfg.simulate.epsilon = simulate.number("epsilon", cfg.simulate.epsilon);
  cfg.simulate.dominance_threshold =
      simulate.number("dominance_threshold", cfg.simulate.dominance_threshold);
  cfg.simulate.seed = simulate.integer("seed", cfg.simulate.seed);
  cfg.simulate.enumeration_budget =
      simulate.integer("enumeration_budget", cfg.simulate.enumeration_budget);
  simulate.check_unknown();

  SectionReader scan(sections, "scan");
  cfg.scan.axis = scan.text("axis", cfg.scan.axis);
  cfg.scan.min = scan.number("min", cfg.scan.min);
  cfg.scan.max = scan.number("max", cfg.scan.max);
  cfg.scan.tolerance = scan.number("tolerance", cfg.scan.tolerance);
  std::string mode = scan.text("mode", "transition");
  if (mode == "transition")
    cfg.scan.mode = ScanMode::kTransition;
  else if (mode == "boundary")
    cfg.scan.mode = ScanMode::kBoundary;
  else
    throw ValidationError("config: scan.mode must be transition or boundary");
  cfg.scan.grid_axis = scan.text("grid_axis", cfg.scan.grid_axis);
  if (scan.has("grid")) cfg.scan.grid = scan.list("grid");
  scan.check_unknown();

  SectionReader plot(sections, "plot");
  cfg.plot.u_min = plot.number("u_min", cfg.plot.u_min);
  cfg.plot.u_max = plot.number("u_max", cfg.plot.u_max);
  cfg.plot.points = static_cast<int>(plot.integer("points", cfg.plot.points));
  plot.check_unknown();

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[model]\n";
  const char* family = cfg.model.family == ModelFamily::kQuadraticIsing ? "quadratic-ising"
                       : cfg.model.family == ModelFamily::kGeneralIsing ? "general-ising"
                                                                        : "quadratic-potts";
  os << "family = " << family << "\n";
  os << "beta = " << format_number(cfg.model.beta) << "\n";
  os << "q = " << cfg.model.q << "\n";
  os << "field_strength = " << format_number(cfg.model.field_strength) << "\n";
  if (!cfg.model.fields.empty()) os << "fields = " << format_list(cfg.model.fields) << "\n";
  if (!cfg.model.pi.empty()) os << "pi = " << format_list(cfg.model.pi) << "\n";
  if (!cfg.model.g_coeffs.empty())
    os << "g_coeffs = " << format_list(cfg.model.g_coeffs) << "\n";

  os << "\n[solver]\n";
  os << "random_starts = " << cfg.solver.random_starts << "\n";
  os << "damping = " << format_number(cfg.solver.damping) << "\n";
  os << "max_fixed_point_iters = " << cfg.solver.max_fixed_point_iters << "\n";
  os << "max_newton_iters = " << cfg.solver.max_newton_iters << "\n";
  os << "residual_tolerance = " << format_number(cfg.solver.residual_tolerance) << "\n";
  os << "dedup_tolerance = " << format_number(cfg.solver.dedup_tolerance) << "\n";
  os << "global_gap_tolerance = " << format_number(cfg.solver.global_gap_tolerance) << "\n";
  os << "eigenvalue_threshold = " << format_number(cfg.solver.eigenvalue_threshold) << "\n";
  os << "seed = " << cfg.solver.seed << "\n";

  os << "\n[weights]\n";
  os << "samples = " << cfg.weights.samples << "\n";
  os << "seed = " << cfg.weights.seed << "\n";
  os << "lp_tolerance = " << format_number(cfg.weights.lp_tolerance) << "\n";
  os << "pair_tolerance = " << format_number(cfg.weights.pair_tolerance) << "\n";

  os << "\n[simulate]\n";
  os << "n =";
  for (Index n : cfg.simulate.n) os << " " << n;
  os << "\n";
  os << "n_samples = " << cfg.simulate.n_samples << "\n";
  os << "epsilon = " << format_number(cfg.simulate.epsilon) << "\n";
  os << "dominance_threshold = " << format_number(cfg.simulate.dominance_threshold) << "\n";
  os << "seed = " << cfg.simulate.seed << "\n";
  os << "enumeration_budget = " << cfg.simulate.enumeration_budget << "\n";

  os << "\n[scan]\n";
  os << "axis = " << cfg.scan.axis << "\n";
  os << "min = " << format_number(cfg.scan.min) << "\n";
  os << "max = " << format_number(cfg.scan.max) << "\n";
  os << "tolerance = " << format_number(cfg.scan.tolerance) << "\n";
  os << "mode = " << (cfg.scan.mode == ScanMode::kTransition ? "transition" : "boundary")
     << "\n";
  if (!cfg.scan.grid_axis.empty()) os << "grid_axis = " << cfg.scan.grid_axis << "\n";
  os << "grid = " << format_list(cfg.scan.grid) << "\n";

  os << "\n[plot]\n";
  os << "u_min = " << format_number(cfg.plot.u_min) << "\n";
  os << "u_max = " << format_number(cfg.plot.u_max) << "\n";
  os << "points = " << cfg.plot.points << "\n";
  return os.str();
}

ModelSpec build_model(const ModelBlock& block) {
  switch (block.family) {
    case ModelFamily::kQuadraticIsing: {
      if (block.fields.empty())
        throw ValidationError("quadratic-ising needs model.fields");
      return build_ising_model(block.beta, block.fields, block.pi);
    }
    case ModelFamily::kGeneralIsing: {
      if (block.fields.empty())
        throw ValidationError("general-ising needs model.fields");
      if (block.g_coeffs.empty())
        throw ValidationError("general-ising needs model.g_coeffs");
      std::vector<double> c = block.g_coeffs;
      auto g = [c](double m) {
        double v = 0.0;
        for (Index k = c.size(); k-- > 0;) v = v * m + c[k];
        return v;
      };
      auto gp = [c](double m) {
        double v = 0.0;
        for (Index k = c.size(); k-- > 1;) v = v * m + c[k] * static_cast<double>(k);
        return v;
      };
      auto gpp = [c](double m) {
        double v = 0.0;
        for (Index k = c.size(); k-- > 2;)
          v = v * m + c[k] * static_cast<double>(k) * static_cast<double>(k - 1);
        return v;
      };
      return build_general_ising_model(g, gp, block.fields, block.pi, gpp);
    }
    case ModelFamily::kQuadraticPotts: {
      if (!block.pi.empty())
        throw ValidationError("quadratic-potts uses the uniform disorder law");
      return build_potts_model(block.q, block.beta, block.field_strength);
    }
  }
  throw ValidationError("unreachable model family");
}

}  // namespace metastate::cli
