#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hamel/cli.hpp"
#include "hamel/field.hpp"
#include "hamel/flows.hpp"
#include "hamel/verify.hpp"

namespace hamel::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSolutionHeader = "n,r,gamma_re,gamma_im,dgamma_re,dgamma_im,w_re,w_im,dw_re,dw_im";
constexpr const char* kSolutionFields[] = {"gamma", "dgamma", "w", "dw"};

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quick = false;
  bool probe_q1 = false;
  std::optional<double> phi0, mu0, mu;
};

RunConfig prepare(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.phi0) cfg.flux = *o.phi0;
  if (o.mu0) cfg.mu0 = *o.mu0;
  if (o.mu) cfg.mu = *o.mu;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.verify.seed = *o.seed;
  if (o.quick) cfg.verify.quick = true;
  if (o.probe_q1) cfg.verify.probe_q1 = true;
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot write " + path.string());
  os << content;
  if (!os) throw InvalidInput("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("missing input " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json real_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json solver_json(const SolverConfig& c) {
  return {{"cutoff", c.cutoff},
          {"tol_fp", c.tol_fp},
          {"max_iter", c.max_iter},
          {"relaxation", c.relaxation},
          {"tol_mu", c.tol_mu},
          {"max_shoot", c.max_shoot},
          {"divergence_factor", c.divergence_factor},
          {"grid",
           {{"r_max", c.grid.r_max},
            {"nodes_per_decade", c.grid.nodes_per_decade},
            {"tail_exponent_floor", c.grid.tail_exponent_floor}}}};
}

json decay_json(const DecayProfile& d) {
  json modes = json::array();
  for (const ModeDecay& m : d.modes) {
    json e = {{"n", m.n}, {"skipped", m.skipped}};
    if (!m.skipped) {
      e["slope"] = m.slope;
      e["predicted"] = m.predicted;
      e["margin"] = m.margin;
      e["fit_residual"] = m.fit_residual;
    }
    modes.push_back(e);
  }
  return {{"beta0", d.beta0}, {"beta1", d.beta1}, {"beta_sup1", d.beta_sup1}, {"modes", modes}};
}

json report_json(const SolveResult& res, const ResolvedRun& run, const RunConfig& cfg, const std::string& command) {
  const SolveReport& rep = res.report;
  json j;
  j["command"] = command;
  j["flow"] = {{"flux", run.flux}, {"mu0", run.mu0}, {"mu", res.solution.flow.circulation}};
  j["solver"] = solver_json(cfg.solver);
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["increment_history"] = real_array(rep.increment_history);
  j["contraction_ratio"] = rep.contraction_ratio;
  j["fixed_point_residual"] = rep.fixed_point_residual;
  j["alpha"] = rep.alpha;
  j["mu_final"] = rep.mu_final;
  j["mu_history"] = real_array(rep.mu_history);
  j["shoot_iterations"] = rep.shoot_iterations;
  json norms = json::object();
  for (std::size_t m = 0; m < rep.norms.size(); ++m) norms["U" + std::to_string(m)] = rep.norms[m];
  j["norms"] = norms;
  j["ns_residual"] = rep.ns_residual;
  j["warnings"] = rep.warnings;
  j["message"] = rep.message;
  if (rep.converged) {
    j["decay"] = decay_json(rep.decay);
    j["divergence_residual"] = divergence_residual(res.solution, cfg.theta_points);
    try {
      j["asymptotic_circulation"] = asymptotic_circulation(res.solution);
    } catch (const NumericalError&) {
      j["asymptotic_circulation"] = nullptr;
    }
  }
  return j;
}

std::string solution_csv(const SpectralSolution& s) {
  std::ostringstream os;
  os << kSolutionHeader << "\n";
  const ModeTable* tables[] = {&s.gamma, &s.dgamma, &s.w, &s.dw};
  for (int n = 0; n <= s.cutoff; ++n) {
    for (Eigen::Index j = 0; j < s.grid.size(); ++j) {
      os << n << "," << format_number(s.grid.radius(j));
      for (const ModeTable* t : tables)
        os << "," << format_number((*t)(n, j).real()) << "," << format_number((*t)(n, j).imag());
      os << "\n";
    }
  }
  return os.str();
}

std::string field_csv(const SpectralSolution& s, int theta_points) {
  std::ostringstream os;
  write_field_csv(os, reconstruct(s, theta_points));
  return os.str();
}

void write_solve_outputs(const fs::path& dir, const SolveResult& res, const json& report, int theta_points) {
  write_file(dir / "solution.csv", solution_csv(res.solution));
  write_file(dir / "field.csv", field_csv(res.solution, theta_points));
  write_file(dir / "report.json", dump_json(report));
}

int cmd_solve(const RunConfig& cfg, bool shoot_only) {
  const ResolvedRun run = resolve(cfg);
  const std::string command = shoot_only ? "shoot" : "solve";
  SolveResult res;
  std::vector<std::string> notes;
  try {
    if (run.flux <= 2.0) {
      if (cfg.mu && std::abs(*cfg.mu - run.mu0) > 0.0)
        notes.push_back("flow.mu ignored: for flux <= 2 the circulation is fixed by shooting");
      res = shoot_mu(run.flux, run.mu0, run.trace, cfg.solver);
    } else {
      if (shoot_only) throw InvalidInput("shoot requires flux <= 2; use solve or branch for flux > 2");
      const BoundarySpectrum b = project_boundary(run.trace, cfg.solver.cutoff, run.flux, run.mu);
      res = picard_solve({run.flux, run.mu}, b, cfg.solver);
    }
  } catch (const NumericalError& e) {
    json j = {{"command", command},
              {"flow", {{"flux", run.flux}, {"mu0", run.mu0}, {"mu", run.mu}}},
              {"solver", solver_json(cfg.solver)},
              {"converged", false},
              {"message", e.what()}};
    write_file(cfg.out_dir / "report.json", dump_json(j));
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  res.report.warnings.insert(res.report.warnings.end(), notes.begin(), notes.end());
  const json report = report_json(res, run, cfg, command);
  write_solve_outputs(cfg.out_dir, res, report, cfg.theta_points);
  const SolveReport& rep = res.report;
  std::cout << command << ": flux " << format_number(run.flux) << ", mu " << format_number(rep.mu_final) << ", "
            << (rep.converged ? "converged" : "not converged") << " after " << rep.iterations
            << " iterations, ns_residual " << rep.ns_residual << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  if (!rep.converged) {
    std::cerr << "error: " << rep.message << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_branch(const RunConfig& cfg) {
  const ResolvedRun run = resolve(cfg);
  std::vector<double> mus = cfg.mu_list;
  if (mus.empty() && cfg.mu) mus.push_back(*cfg.mu);
  if (mus.empty()) throw InvalidInput("config: branch.mu_list (or --mu) is required");
  const auto members = branch_sweep(run.flux, run.mu0, mus, run.trace, cfg.solver);
  const int samples = static_cast<int>(run.trace.ur.size());
  std::ostringstream table;
  table << "mu,converged,iterations,contraction_ratio,trace_sup_error,mu_eff,ns_residual\n";
  json list = json::array();
  std::vector<std::string> failed;
  for (const BranchMember& m : members) {
    json e = {{"mu", m.mu}, {"converged", m.ok}};
    double trace_err = NAN, mu_eff = NAN;
    if (m.ok) {
      const BoundaryTrace t = velocity_trace(m.result.solution, 0, samples);
      trace_err = 0.0;
      for (int k = 0; k < samples; ++k)
        trace_err = std::max({trace_err, std::abs(t.ur[k] - run.trace.ur[k]), std::abs(t.utheta[k] - run.trace.utheta[k])});
      try {
        mu_eff = asymptotic_circulation(m.result.solution);
      } catch (const NumericalError&) {
      }
      e["report"] = report_json(m.result, run, cfg, "branch");
    } else {
      failed.push_back(format_number(m.mu) + ": " + m.error);
      e["error"] = m.error;
    }
    e["trace_sup_error"] = trace_err;
    e["mu_eff"] = mu_eff;
    list.push_back(e);
    const SolveReport& rep = m.result.report;
    table << format_number(m.mu) << "," << (m.ok ? 1 : 0) << "," << rep.iterations << ","
          << format_number(rep.contraction_ratio) << "," << format_number(trace_err) << "," << format_number(mu_eff)
          << "," << format_number(rep.ns_residual) << "\n";
  }
  json report = {{"command", "branch"},
                 {"flow", {{"flux", run.flux}, {"mu0", run.mu0}}},
                 {"solver", solver_json(cfg.solver)},
                 {"members", list},
                 {"all_converged", failed.empty()}};
  write_file(cfg.out_dir / "branch.csv", table.str());
  write_file(cfg.out_dir / "report.json", dump_json(report));
  std::cout << table.str();
  if (!failed.empty()) {
    for (const auto& f : failed) std::cerr << "failed member mu = " << f << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const VerifyOptions& v = cfg.verify;
  const int hardy = v.quick ? std::min(v.hardy_profiles, 200) : v.hardy_profiles;
  const int pw = v.quick ? std::min(v.poincare_streams, 50) : v.poincare_streams;
  const int qform = v.quick ? std::min(v.qform_streams, 100) : v.qform_streams;
  const int probe = v.quick ? std::min(v.probe_samples, 1000) : v.probe_samples;
  std::vector<CheckResult> checks;
  checks.push_back(check_manufactured_oracles());
  checks.push_back(check_ode_residuals(v.seed + 3));
  checks.push_back(check_hardy_suite(v.seed, hardy));
  checks.push_back(check_poincare_suite(v.seed + 1, pw));
  checks.push_back(check_qform_suite(v.seed + 2, qform));
  if (v.probe_q1) checks.push_back(check_q1_probe(cfg.flux.value_or(3.2), probe, v.seed + 4));
  bool ok = true;
  json list = json::array();
  for (const CheckResult& c : checks) {
    const bool counts = !c.informational;
    if (counts && !c.passed) ok = false;
    json metrics = json::object();
    for (const auto& [k, val] : c.metrics) metrics[k] = val;
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"informational", c.informational},
                    {"summary", c.summary},
                    {"metrics", metrics}});
    std::cout << (c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL")) << " " << c.name << ": " << c.summary
              << " (" << c.seconds << " s)\n";
  }
  json report = {{"command", "verify"}, {"seed", v.seed}, {"quick", v.quick}, {"checks", list}, {"passed", ok}};
  write_file(cfg.out_dir / "report.json", dump_json(report));
  return ok ? kExitOk : kExitFailed;
}

// Rows of solution.csv grouped by mode.
struct SolutionData {
  std::vector<double> radius;
  std::vector<std::vector<std::array<double, 8>>> modes;
};

SolutionData read_solution_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kSolutionHeader) throw InvalidInput(path.string() + ": unexpected header");
  SolutionData d;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw InvalidInput(path.string() + ": row " + std::to_string(row) + " needs 10 columns");
    try {
      const int n = std::stoi(cells[0]);
      const double r = std::stod(cells[1]);
      if (n < 0 || n > static_cast<int>(d.modes.size())) throw InvalidInput("mode order");
      if (n == static_cast<int>(d.modes.size())) d.modes.emplace_back();
      if (n == 0) d.radius.push_back(r);
      std::array<double, 8> v{};
      for (int k = 0; k < 8; ++k) v[k] = std::stod(cells[k + 2]);
      d.modes[n].push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput(path.string() + ": malformed row " + std::to_string(row));
    }
  }
  for (const auto& m : d.modes)
    if (m.size() != d.radius.size()) throw InvalidInput(path.string() + ": modes have different lengths");
  if (d.modes.empty()) throw InvalidInput(path.string() + ": no rows");
  return d;
}

json solution_to_json(const SolutionData& d) {
  json modes = json::array();
  for (std::size_t n = 0; n < d.modes.size(); ++n) {
    json m = {{"n", n}};
    for (int f = 0; f < 4; ++f) {
      json re = json::array(), im = json::array();
      for (const auto& v : d.modes[n]) {
        re.push_back(v[2 * f]);
        im.push_back(v[2 * f + 1]);
      }
      m[kSolutionFields[f]] = {{"re", re}, {"im", im}};
    }
    modes.push_back(m);
  }
  return {{"radius", real_array(d.radius)}, {"modes", modes}};
}

SolutionData solution_from_json(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
    SolutionData d;
    d.radius = j.at("radius").get<std::vector<double>>();
    for (const auto& m : j.at("modes")) {
      std::vector<std::array<double, 8>> rows(d.radius.size());
      for (int f = 0; f < 4; ++f) {
        const auto re = m.at(kSolutionFields[f]).at("re").get<std::vector<double>>();
        const auto im = m.at(kSolutionFields[f]).at("im").get<std::vector<double>>();
        if (re.size() != d.radius.size() || im.size() != d.radius.size()) throw InvalidInput("length mismatch");
        for (std::size_t i = 0; i < rows.size(); ++i) {
          rows[i][2 * f] = re[i];
          rows[i][2 * f + 1] = im[i];
        }
      }
      d.modes.push_back(std::move(rows));
    }
    return d;
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidInput(path.string() + ": malformed solution JSON: " + e.what());
  }
}

std::string solution_data_csv(const SolutionData& d) {
  std::ostringstream os;
  os << kSolutionHeader << "\n";
  for (std::size_t n = 0; n < d.modes.size(); ++n)
    for (std::size_t j = 0; j < d.radius.size(); ++j) {
      os << n << "," << format_number(d.radius[j]);
      for (double v : d.modes[n][j]) os << "," << format_number(v);
      os << "\n";
    }
  return os.str();
}

int cmd_export(const fs::path& in_dir, const std::string& format, const fs::path& out_dir) {
  if (format != "json" && format != "csv" && format != "decay")
    throw InvalidInput("export: unknown format '" + format + "' (expected csv, json or decay)");
  if (format == "json") {
    write_file(out_dir / "solution.json", dump_json(solution_to_json(read_solution_csv(in_dir / "solution.csv"))));
    return kExitOk;
  }
  if (format == "csv") {
    write_file(out_dir / "solution.csv", solution_data_csv(solution_from_json(in_dir / "solution.json")));
    return kExitOk;
  }
  const SolutionData d = read_solution_csv(in_dir / "solution.csv");
  ReferenceFlow flow;
  double alpha = 0.0;
  try {
    const json rep = json::parse(read_file(in_dir / "report.json"));
    flow = {rep.at("flow").at("flux").get<double>(), rep.at("flow").at("mu").get<double>()};
    alpha = rep.at("alpha").get<double>();
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidInput((in_dir / "report.json").string() + ": missing flow or alpha: " + e.what());
  }
  std::ostringstream os;
  os << "mode,r,abs_gamma,abs_w,predicted_slope\n";
  for (std::size_t n = 0; n < d.modes.size(); ++n) {
    const std::string slope = format_number(predicted_decay(flow, static_cast<int>(n), alpha));
    for (std::size_t j = 0; j < d.radius.size(); ++j) {
      const auto& v = d.modes[n][j];
      os << n << "," << format_number(d.radius[j]) << "," << format_number(std::hypot(v[0], v[1])) << ","
         << format_number(std::hypot(v[4], v[5])) << "," << slope << "\n";
    }
  }
  write_file(out_dir / "decay.csv", os.str());
  return kExitOk;
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Run configuration (JSON, see docs/config_schema.json)");
  sub->add_option("--out", o.out, "Output directory (default: output.dir or ./out)");
  sub->add_option("--seed", o.seed, "Seed for randomized suites");
  sub->add_flag("--quick", o.quick, "Reduced verification suite");
  sub->add_option("--phi0", o.phi0, "Flux of the reference flow");
  sub->add_option("--mu0", o.mu0, "Circulation of the boundary data");
  sub->add_option("--mu", o.mu, "Circulation at infinity (flux > 2)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Steady exterior Navier-Stokes flows near Hamel and potential flows: spectral solver and checks"};
  app.require_subcommand(1);
  Overrides o;
  std::string in_dir, format;
  CLI::App* solve = app.add_subcommand("solve", "Solve one boundary problem (shooting when flux <= 2)");
  CLI::App* branch = app.add_subcommand("branch", "Solve the same boundary data at several circulations");
  CLI::App* shoot = app.add_subcommand("shoot", "Circulation shooting for flux <= 2");
  CLI::App* verify = app.add_subcommand("verify", "Run oracle and inequality suites");
  CLI::App* exp = app.add_subcommand("export", "Convert solve outputs");
  for (CLI::App* sub : {solve, branch, shoot, verify}) add_common(sub, o);
  verify->add_flag("--probe-q1", o.probe_q1, "Search for a mode-1 stream with negative quadratic form");
  exp->add_option("--in", in_dir, "Directory holding solve outputs")->required();
  exp->add_option("--format", format, "csv, json or decay")->required();
  exp->add_option("--out", o.out, "Output directory (default: the input directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*exp) return cmd_export(in_dir, format, o.out.empty() ? fs::path(in_dir) : fs::path(o.out));
    const RunConfig cfg = prepare(o);
    if (*solve) return cmd_solve(cfg, false);
    if (*shoot) return cmd_solve(cfg, true);
    if (*branch) return cmd_branch(cfg);
    return cmd_verify(cfg);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace hamel::cli
