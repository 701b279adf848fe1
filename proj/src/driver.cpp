#include "eigenbound/driver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eigenbound/errors.hpp"
#include "eigenbound/mesh_io.hpp"
#include "json.hpp"

namespace eigenbound {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short form for file names; the JSON payloads keep full precision, and a
// cache whose stored coefficient mismatches is refused rather than reused.
std::string file_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has a non-numeric value '" + text + "'");
  }
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = lower(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config: key '" + key + "' has a non-boolean value '" + text + "'");
}

std::vector<double> parse_list(std::string text, const std::string& key) {
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(parse_double(tok, key));
  if (values.empty()) throw ConfigError("config: key '" + key + "' has no values");
  return values;
}

void apply_key(RunConfig& cfg, bool& kind_seen, const std::string& key, const std::string& value) {
  if (key == "kind") {
    cfg.kind = parse_problem_kind(value);
    kind_seen = true;
  } else if (key == "a") {
    cfg.contrasts = parse_list(value, key);
  } else if (key == "theta") {
    cfg.theta = parse_double(value, key);
  } else if (key == "err_tol") {
    cfg.err_tol = parse_double(value, key);
  } else if (key == "rho") {
    cfg.rho = parse_double(value, key);
  } else if (key == "sigma") {
    cfg.sigma = parse_double(value, key);
  } else if (key == "trust_factor") {
    cfg.trust_factor = parse_double(value, key);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "emit_vtk") {
    cfg.emit_vtk = parse_bool(value, key);
  } else if (key == "friedrichs_upper") {
    cfg.friedrichs_upper = parse_double(value, key);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void validate_config(const RunConfig& cfg, bool kind_seen) {
  if (!kind_seen) throw ConfigError("config: missing required key 'kind'");
  if (cfg.contrasts.empty()) throw ConfigError("config: empty coefficient list");
  for (double a : cfg.contrasts)
    if (!(a > 0.0) || !std::isfinite(a))
      throw ConfigError("config: coefficient values must be positive and finite");
  if (!(cfg.theta > 0.0) || !(cfg.theta <= 1.0))
    throw ConfigError("config: theta must lie in (0, 1]");
  if (!(cfg.err_tol > 0.0)) throw ConfigError("config: err_tol must be positive");
  if (!(cfg.rho > 0.0)) throw ConfigError("config: rho must be positive");
  if (!(cfg.sigma > 0.0)) throw ConfigError("config: sigma must be positive");
  if (!(cfg.trust_factor > 0.0)) throw ConfigError("config: trust_factor must be positive");
  if (cfg.friedrichs_upper.has_value() && !(*cfg.friedrichs_upper > 0.0))
    throw ConfigError("config: friedrichs_upper must be positive");
}

RunConfig parse_json_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: JSON root must be an object");
  RunConfig cfg;
  bool kind_seen = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "a" && value.is_array()) {
      cfg.contrasts.clear();
      for (const auto& entry : value) {
        if (!entry.is_number()) throw ConfigError("config: 'a' entries must be numbers");
        cfg.contrasts.push_back(entry.get<double>());
      }
      if (cfg.contrasts.empty()) throw ConfigError("config: key 'a' has no values");
    } else if (value.is_string()) {
      apply_key(cfg, kind_seen, key, value.get<std::string>());
    } else if (value.is_boolean()) {
      apply_key(cfg, kind_seen, key, value.get<bool>() ? "true" : "false");
    } else if (value.is_number()) {
      apply_key(cfg, kind_seen, key, fmt17(value.get<double>()));
    } else {
      throw ConfigError("config: key '" + key + "' has an unsupported JSON type");
    }
  }
  validate_config(cfg, kind_seen);
  return cfg;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  const std::string body = trim(text);
  if (body.empty()) throw ConfigError("config: empty input");
  if (body.front() == '{') return parse_json_config(body);

  RunConfig cfg;
  bool kind_seen = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
    apply_key(cfg, kind_seen, key, value);
  }
  validate_config(cfg, kind_seen);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

ProblemSpec checkerboard_problem(ProblemKind kind, double contrast) {
  if (!(contrast > 0.0) || !std::isfinite(contrast))
    throw ConfigError("checkerboard problem: contrast must be positive and finite");
  SquareBoundaryRule rule;
  if (kind == ProblemKind::Poincare) {
    rule = {BoundaryLabel::Neumann, BoundaryLabel::Neumann, BoundaryLabel::Neumann,
            BoundaryLabel::Neumann};
  } else {
    rule = {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Dirichlet,
            BoundaryLabel::Dirichlet};
  }
  ProblemSpec spec;
  spec.kind = kind;
  spec.mesh = build_initial_mesh(rule);
  spec.coefficients.diffusion = {Eigen::Matrix2d::Identity(),
                                 contrast * Eigen::Matrix2d::Identity()};
  spec.coefficients.reaction = {0.0, 0.0};
  spec.coefficients.robin_alpha = 0.0;
  return spec;
}

namespace {

void apply_algorithm_parameters(ProblemSpec& spec, const RunConfig& cfg) {
  spec.theta = cfg.theta;
  spec.err_tol = cfg.err_tol;
  spec.rho = cfg.rho;
  spec.sigma = cfg.sigma;
  spec.trust_factor = cfg.trust_factor;
}

// Absent file -> nullopt; present file either yields the value or throws
// (mismatched coefficient, unconverged run, or garbage are all refusals).
std::optional<double> load_cached_bound(const std::string& path, double contrast) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cache '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("contrast") || !j.contains("c_up") || !j.contains("status"))
    throw ConfigError("cache '" + path + "' is missing fields; delete it and rerun");
  if (j["status"].get<std::string>() != "converged")
    throw ConfigError("cache '" + path + "' records an unconverged run; delete it and rerun");
  const double stored = j["contrast"].get<double>();
  if (stored != contrast)
    throw ConfigError("cache '" + path + "' was computed for coefficient " + fmt17(stored) +
                      ", not " + fmt17(contrast) + "; refusing to use it");
  const double c_up = j["c_up"].get<double>();
  if (!(c_up > 0.0)) throw ConfigError("cache '" + path + "' holds a nonpositive bound");
  return c_up;
}

double resolve_friedrichs_upper(const RunConfig& cfg, double contrast) {
  if (cfg.friedrichs_upper.has_value()) return *cfg.friedrichs_upper;
  const std::string cache = cfg.out_dir + "/friedrichs-" + file_label(contrast) + ".json";
  if (const std::optional<double> cached = load_cached_bound(cache, contrast)) return *cached;

  ProblemSpec spec = checkerboard_problem(ProblemKind::Friedrichs, contrast);
  apply_algorithm_parameters(spec, cfg);
  const AdaptResult res = run_adaptive(spec);
  if (res.history.status != RunStatus::Converged)
    throw ConvergenceError("prerequisite run for coefficient " + fmt17(contrast) +
                           " ended with status " + run_status_name(res.history.status));
  json j;
  j["contrast"] = contrast;
  j["status"] = "converged";
  j["c_low"] = res.final_bounds.c_low;
  j["c_up"] = res.final_bounds.c_up;
  j["rel_err"] = res.final_bounds.rel_err;
  j["n_dof"] = res.final_bounds.n_dof;
  std::ofstream out(cache);
  if (!out) throw Error("cannot write cache '" + cache + "'");
  out << j.dump(2) << '\n';
  return res.final_bounds.c_up;
}

RunOutcome run_one(const RunConfig& cfg, double contrast) {
  ProblemSpec spec = checkerboard_problem(cfg.kind, contrast);
  apply_algorithm_parameters(spec, cfg);
  if (cfg.kind == ProblemKind::Trace)
    spec.friedrichs_upper = resolve_friedrichs_upper(cfg, contrast);

  const std::string label = file_label(contrast);
  const std::string csv_path = cfg.out_dir + "/history-" + label + ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot open '" + csv_path + "'");
  csv << "iter,ndof,c_low,c_up,rel_err,d1,d2,trusted,marked,seconds\n" << std::flush;

  const IterationObserver observer = [&](const IterationContext& ctx) {
    const IterationRecord& r = ctx.record;
    csv << r.iter << ',' << r.n_dof << ',' << fmt17(r.c_low) << ',' << fmt17(r.c_up) << ','
        << fmt17(r.rel_err) << ',' << fmt17(r.d1) << ',' << fmt17(r.d2) << ','
        << (r.trusted ? 1 : 0) << ',' << r.marked << ',' << fmt17(r.seconds) << '\n'
        << std::flush;
    if (cfg.emit_vtk) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "-%02d.vtk", ctx.iter);
      const FluxFields fields = flux_fields(ctx.flux);
      std::vector<double> div0(fields.divergence.size());
      for (std::size_t i = 0; i < div0.size(); ++i) div0[i] = fields.divergence[i][0];
      export_vtk(ctx.mesh, cfg.out_dir + "/mesh-" + label + suffix,
                 {{"indicator", ctx.indicators}, {"flux_divergence", div0}});
    }
  };

  const AdaptResult res = run_adaptive(spec, observer);
  RunOutcome oc;
  oc.contrast = contrast;
  oc.status = res.history.status;
  oc.iterations = static_cast<int>(res.history.records.size());
  oc.bounds = res.final_bounds;
  return oc;
}

json outcome_to_json(const RunOutcome& oc) {
  json j;
  j["a"] = oc.contrast;
  j["status"] = run_status_name(oc.status);
  j["iterations"] = oc.iterations;
  j["x2"] = oc.bounds.x2;
  j["lambda_low"] = oc.bounds.lambda_low;
  j["lambda_up"] = oc.bounds.lambda_up;
  j["c_low"] = oc.bounds.c_low;
  j["c_up"] = oc.bounds.c_up;
  j["c_avg"] = oc.bounds.c_avg;
  j["rel_err"] = oc.bounds.rel_err;
  j["d1"] = oc.bounds.d1;
  j["d2"] = oc.bounds.d2;
  j["trusted"] = oc.bounds.trusted;
  j["n_dof"] = oc.bounds.n_dof;
  return j;
}

}  // namespace

int run_sweep(const RunConfig& config, std::vector<RunOutcome>* outcomes) {
  validate_config(config, true);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + config.out_dir + "'");

  json summary;
  summary["kind"] = problem_kind_name(config.kind);
  summary["runs"] = json::array();
  bool all_good = true;
  for (double contrast : config.contrasts) {
    const RunOutcome oc = run_one(config, contrast);
    all_good = all_good && oc.status == RunStatus::Converged && oc.bounds.trusted;
    summary["runs"].push_back(outcome_to_json(oc));
    if (outcomes) outcomes->push_back(oc);
  }

  const std::string summary_path = config.out_dir + "/summary.json";
  std::ofstream out(summary_path);
  if (!out) throw Error("cannot open '" + summary_path + "'");
  out << summary.dump(2) << '\n';
  return all_good ? 0 : 1;
}

}  // namespace eigenbound
