#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hamel/cli.hpp"
#include "hamel/flows.hpp"

namespace hamel::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidInput("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(path + "." + key, "unknown key (allowed: " + list + ")");
    }
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

int positive_int(const json& j, const std::string& path) {
  const long long v = integer(j, path);
  if (v < 1 || v > 1000000000) fail(path, "expected a positive integer");
  return static_cast<int>(v);
}

std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

ComplexArray coefficient_array(const json& j, const std::string& path, int cutoff) {
  if (!j.is_array()) fail(path, "expected an array of [re, im] pairs or numbers");
  if (static_cast<long long>(j.size()) > cutoff + 1)
    fail(path, "has " + std::to_string(j.size()) + " modes but solver.cutoff allows " + std::to_string(cutoff + 1));
  ComplexArray out = ComplexArray::Zero(cutoff + 1);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    if (j[i].is_array()) {
      if (j[i].size() != 2) fail(at, "expected [re, im]");
      out(static_cast<Eigen::Index>(i)) = Complex(number(j[i][0], at + "[0]"), number(j[i][1], at + "[1]"));
    } else {
      out(static_cast<Eigen::Index>(i)) = number(j[i], at);
    }
  }
  return out;
}

void parse_boundary(const json& j, const std::string& path, const std::filesystem::path& base, RunConfig& cfg) {
  check_keys(j, path, {"modes", "theta_samples", "file"});
  if (j.size() != 1) fail(path, "expected exactly one of modes, theta_samples, file");
  if (j.contains("file")) {
    const std::filesystem::path file = base / string(j["file"], path + ".file");
    std::ifstream in(file);
    if (!in) fail(path + ".file", "cannot open " + file.string());
    json inner;
    try {
      inner = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(path + ".file", std::string("malformed JSON: ") + e.what());
    }
    parse_boundary(inner, file.string(), file.parent_path(), cfg);
    return;
  }
  if (j.contains("modes")) {
    const json& m = j["modes"];
    const std::string mp = path + ".modes";
    check_keys(m, mp, {"vr", "vtheta"});
    BoundarySpectrum s = BoundarySpectrum::zero(cfg.solver.cutoff);
    if (m.contains("vr")) s.vr = coefficient_array(m["vr"], mp + ".vr", cfg.solver.cutoff);
    if (m.contains("vtheta")) s.vtheta = coefficient_array(m["vtheta"], mp + ".vtheta", cfg.solver.cutoff);
    if (std::abs(s.vr(0)) > kResidualFluxTol) fail(mp + ".vr[0]", "must be 0 (the flux is set by flow.flux)");
    if (std::abs(s.vtheta(0)) > kResidualFluxTol)
      fail(mp + ".vtheta[0]", "must be 0 (the circulation is set by flow.mu0)");
    cfg.modes = s;
  }
  if (j.contains("theta_samples")) {
    const json& t = j["theta_samples"];
    const std::string tp = path + ".theta_samples";
    check_keys(t, tp, {"ur", "utheta"});
    if (!t.contains("ur") || !t.contains("utheta")) fail(tp, "requires both ur and utheta");
    BoundaryTrace trace{number_array(t["ur"], tp + ".ur"), number_array(t["utheta"], tp + ".utheta")};
    if (trace.ur.size() != trace.utheta.size()) fail(tp, "ur and utheta lengths differ");
    cfg.samples = std::move(trace);
  }
}

}  // namespace

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "$", {"flow", "boundary", "solver", "grid", "branch", "verify", "output"});
  RunConfig cfg;
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"cutoff", "tol_fp", "max_iter", "relaxation", "tol_mu", "max_shoot", "divergence_factor"});
    if (s.contains("cutoff")) {
      const long long n = integer(s["cutoff"], "solver.cutoff");
      if (n < 0 || n > 4096) fail("solver.cutoff", "expected an integer in [0, 4096]");
      cfg.solver.cutoff = static_cast<int>(n);
    }
    if (s.contains("tol_fp")) cfg.solver.tol_fp = number(s["tol_fp"], "solver.tol_fp");
    if (s.contains("max_iter")) cfg.solver.max_iter = positive_int(s["max_iter"], "solver.max_iter");
    if (s.contains("relaxation")) cfg.solver.relaxation = number(s["relaxation"], "solver.relaxation");
    if (s.contains("tol_mu")) cfg.solver.tol_mu = number(s["tol_mu"], "solver.tol_mu");
    if (s.contains("max_shoot")) cfg.solver.max_shoot = positive_int(s["max_shoot"], "solver.max_shoot");
    if (s.contains("divergence_factor"))
      cfg.solver.divergence_factor = number(s["divergence_factor"], "solver.divergence_factor");
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"r_max", "nodes_per_decade", "tail_exponent_floor"});
    if (g.contains("r_max")) cfg.solver.grid.r_max = number(g["r_max"], "grid.r_max");
    if (g.contains("nodes_per_decade"))
      cfg.solver.grid.nodes_per_decade = positive_int(g["nodes_per_decade"], "grid.nodes_per_decade");
    if (g.contains("tail_exponent_floor"))
      cfg.solver.grid.tail_exponent_floor = number(g["tail_exponent_floor"], "grid.tail_exponent_floor");
  }
  try {
    cfg.solver.validate();
    cfg.solver.make_grid();
  } catch (const InvalidInput& e) {
    fail("solver/grid", e.what());
  }
  if (j.contains("flow")) {
    const json& f = j["flow"];
    check_keys(f, "flow", {"flux", "mu0", "mu"});
    if (f.contains("flux")) cfg.flux = number(f["flux"], "flow.flux");
    if (f.contains("mu0")) cfg.mu0 = number(f["mu0"], "flow.mu0");
    if (f.contains("mu")) cfg.mu = number(f["mu"], "flow.mu");
  }
  if (j.contains("boundary")) parse_boundary(j["boundary"], "boundary", base_dir, cfg);
  if (j.contains("branch")) {
    check_keys(j["branch"], "branch", {"mu_list"});
    if (j["branch"].contains("mu_list")) cfg.mu_list = number_array(j["branch"]["mu_list"], "branch.mu_list");
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_keys(v, "verify", {"seed", "quick", "probe_q1", "probe_samples", "hardy_profiles", "poincare_streams",
                             "qform_streams"});
    if (v.contains("seed")) {
      if (!v["seed"].is_number_unsigned()) fail("verify.seed", "expected a nonnegative integer");
      cfg.verify.seed = v["seed"].get<std::uint64_t>();
    }
    if (v.contains("quick")) cfg.verify.quick = boolean(v["quick"], "verify.quick");
    if (v.contains("probe_q1")) cfg.verify.probe_q1 = boolean(v["probe_q1"], "verify.probe_q1");
    if (v.contains("probe_samples")) cfg.verify.probe_samples = positive_int(v["probe_samples"], "verify.probe_samples");
    if (v.contains("hardy_profiles"))
      cfg.verify.hardy_profiles = positive_int(v["hardy_profiles"], "verify.hardy_profiles");
    if (v.contains("poincare_streams"))
      cfg.verify.poincare_streams = positive_int(v["poincare_streams"], "verify.poincare_streams");
    if (v.contains("qform_streams")) cfg.verify.qform_streams = positive_int(v["qform_streams"], "verify.qform_streams");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"dir", "theta_points", "trace_samples"});
    if (o.contains("dir")) cfg.out_dir = string(o["dir"], "output.dir");
    if (o.contains("theta_points")) cfg.theta_points = positive_int(o["theta_points"], "output.theta_points");
    if (o.contains("trace_samples")) cfg.trace_samples = positive_int(o["trace_samples"], "output.trace_samples");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config: " + path.string() + ": malformed JSON: " + e.what());
  }
  return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun r;
  const int cutoff = cfg.solver.cutoff;
  if (cfg.samples) {
    const ReferenceFlow f = flux_circulation(cfg.samples->ur, cfg.samples->utheta);
    auto agree = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); };
    if (cfg.flux && !agree(*cfg.flux, f.flux))
      throw InvalidInput("config: flow.flux disagrees with the flux of the theta samples");
    if (cfg.mu0 && !agree(*cfg.mu0, f.circulation))
      throw InvalidInput("config: flow.mu0 disagrees with the circulation of the theta samples");
    if (static_cast<int>(cfg.samples->ur.size()) < 2 * cutoff + 2)
      throw InvalidInput("config: need at least 2 cutoff + 2 theta samples");
    r.flux = f.flux;
    r.mu0 = f.circulation;
    r.trace = *cfg.samples;
  } else {
    if (!cfg.flux) throw InvalidInput("config: flow.flux (or --phi0) is required");
    if (!cfg.mu0) throw InvalidInput("config: flow.mu0 (or --mu0) is required");
    r.flux = *cfg.flux;
    r.mu0 = *cfg.mu0;
    const BoundarySpectrum spectrum = cfg.modes ? *cfg.modes : BoundarySpectrum::zero(cutoff);
    const int samples = cfg.trace_samples > 0 ? cfg.trace_samples : std::max(64, 4 * cutoff + 4);
    if (samples < 2 * cutoff + 2) throw InvalidInput("config: output.trace_samples below 2 cutoff + 2");
    r.trace = synthesize_trace(spectrum, r.flux, r.mu0, samples);
  }
  if (r.flux < 0.0) throw InvalidInput("config: flux must be nonnegative");
  r.mu = cfg.mu.value_or(r.mu0);
  return r;
}

}  // namespace hamel::cli
