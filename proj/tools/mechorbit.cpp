#include "mechorbit/errors.hpp"
#include "mechorbit/loop_io.hpp"
#include "mechorbit/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mechorbit;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string eps_schedule;
  std::optional<double> tol;
  bool overwrite = false;
};

std::vector<double> parse_csv_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw ConfigError("--eps-schedule", "bad number '" + item + "'");
    v.push_back(x);
  }
  if (v.empty()) throw ConfigError("--eps-schedule", "empty list");
  return v;
}

RunConfig load(const Overrides& o) {
  RunConfig c = parse_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.samples) c.samples = *o.samples;
  if (!o.eps_schedule.empty()) {
    c.schedule.eps = parse_csv_list(o.eps_schedule);
    c.schedule.tolerances.clear();
  }
  if (o.tol) {
    c.schedule.default_tolerance = *o.tol;
    c.schedule.tolerances.clear();
  }
  if (!o.out.empty()) c.output = o.out;
  validate(c);
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigError(p.string(), "cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Reports are append-only: an existing run directory needs --overwrite.
fs::path prepare_output(const RunConfig& c, bool overwrite) {
  const fs::path dir(c.output);
  if (fs::exists(dir / "report.json") && !overwrite)
    throw ConfigError("--out", dir.string() + " already holds a run; use a fresh directory or --overwrite");
  fs::create_directories(dir);
  return dir;
}

int run_check_regularity(const Overrides& o) {
  const RunConfig c = load(o);
  RegularityOptions ro = c.regularity;
  ro.seed = c.seed;
  const RegularityReport r = regularity_scan(build_bundle(c.geometry), ro);
  std::printf("regularity: %s\n", r.pass ? "PASS" : "FAIL");
  std::printf("  V_inf estimate    %.6g\n", r.v_infinity);
  std::printf("  ratio decreasing  %s\n", r.ratio_decreasing ? "yes" : "no");
  std::printf("  samples           %d in %zu shells\n", r.total_samples, r.shells.size());
  if (!r.reason.empty()) std::printf("  reason            %s\n", r.reason.c_str());
  if (!o.out.empty()) {
    fs::create_directories(c.output);
    write_file(fs::path(c.output) / "regularity.json", regularity_report(r));
  }
  return r.pass ? kOk : kFail;
}

int run_check_contact(const Overrides& o) {
  const RunConfig c = load(o);
  SolveOptions so = solve_options(c);
  so.contact.seed = c.seed;
  const ContactCheckReport r = uniform_contact_scan(build_bundle(c.geometry), so.contact);
  std::printf("contact: %s\n", r.pass ? "PASS" : "FAIL");
  std::printf("  kappa             %.6g%s\n", r.kappa, r.kappa_auto ? " (kappa0)" : "");
  std::printf("  a_kappa           %.6g\n", r.a_kappa);
  std::printf("  min Theta(X_H)    %.6g\n", r.min_theta);
  std::printf("  samples           %d (%d degenerate)\n", r.samples, r.degenerate);
  if (!r.reason.empty()) std::printf("  reason            %s\n", r.reason.c_str());
  if (!o.out.empty()) {
    fs::create_directories(c.output);
    write_file(fs::path(c.output) / "contact.json", contact_report(r));
  }
  return r.pass ? kOk : kFail;
}

int run_solve(const Overrides& o) {
  const RunConfig c = load(o);
  const fs::path dir = prepare_output(c, o.overwrite);
  const GeometryBundle b = build_bundle(c.geometry);
  const SolveReport r = solve(b, c.linking, c.schedule, solve_options(c));

  write_file(dir / "config.json", write_config(c));
  write_loop_csv(dir / "orbit.csv", r.final_solution.point);
  write_file(dir / "report.json", solve_report(c, r));

  std::printf("solve: %s%s\n", r.converged ? "converged" : "NOT CONVERGED", r.advisory ? " [ADVISORY]" : "");
  std::printf("  regularity        %s\n", r.regularity.pass ? "PASS" : "FAIL");
  std::printf("  a_kappa           %.6g\n", r.a_kappa);
  std::printf("  linking           sigma1 %.6g  sigma2 %.6g  a %.6g  b %.6g\n", r.linking.sigma1, r.linking.sigma2,
              r.linking.a, r.linking.b);
  std::printf("  mountain pass     %s after %d iterations, candidate %.10g (a_bar %.6g, initial max %.6g)\n",
              r.mountain_pass.status.c_str(), r.mountain_pass.iterations, r.mountain_pass.candidate_value, r.a_bar,
              r.mountain_pass.initial_max);
  std::printf("  %-10s %-14s %-14s %-10s %-10s %-10s %s\n", "eps", "action", "tau", "grad", "H resid", "closure",
              "accepted");
  for (const OrbitSolution& s : r.continuation.solutions)
    std::printf("  %-10.3g %-14.10f %-14.10f %-10.2e %-10.2e %-10.2e %s\n", s.eps, s.action, s.point.tau, s.grad_norm,
                s.hamiltonian_residual, s.closure, s.accepted ? "yes" : s.reason.c_str());
  if (r.continuation.action_extrapolated)
    std::printf("  eps -> 0          action %.10f  tau %.10f\n", *r.continuation.action_extrapolated,
                *r.continuation.tau_extrapolated);
  std::printf("  period            %.10f\n", r.final_solution.period);
  if (!r.converged) std::printf("  status            %s\n", r.status.c_str());
  std::printf("  wrote             %s\n", (dir / "orbit.csv").string().c_str());
  return r.converged ? kOk : kFail;
}

int run_verify(const Overrides& o, const std::string& orbit_path, std::optional<double> eps_arg) {
  const RunConfig c = load(o);
  const GeometryBundle b = build_bundle(c.geometry);
  const LoopRecord rec = read_loop_csv(orbit_path);
  if (rec.samples.cols() != c.geometry.dimension)
    throw ConfigError("--orbit", "dimension does not match the config");
  const LoopSpace ls(b, static_cast<int>(rec.samples.rows()), c.scheme);
  const LoopPoint p{ls.make_loop(rec.samples), rec.tau};
  const double eps = eps_arg ? *eps_arg : c.schedule.eps.back();
  const Objective obj(ls, eps);
  RefineResult rr;
  rr.point = p;
  rr.message = "loaded";
  const OrbitSolution s = make_solution(obj, rr, c.schedule.tolerance(c.schedule.eps.size() - 1), c.tolerances,
                                        c.schedule, 0.0, c.shooting_steps);
  const ShootingReport& shot = s.shooting;
  const bool pass = shot.closure <= c.tolerances.closure;
  std::printf("verify: %s\n", pass ? "PASS" : "FAIL");
  std::printf("  closure           %.6e (tolerance %.3g)\n", shot.closure, c.tolerances.closure);
  std::printf("  energy drift      %.6e\n", shot.energy_drift);
  std::printf("  max |H - eps~|    %.6e\n", shot.level_deviation);
  std::printf("  period            %.10f (%d RK4 steps)\n", shot.period, shot.steps);
  std::printf("  action            %.10f\n", s.action);
  std::printf("  gradient norm     %.3e\n", s.grad_norm);
  if (!o.out.empty()) {
    fs::create_directories(c.output);
    write_file(fs::path(c.output) / "verify.json", verify_report(s, shot, c.tolerances.closure));
  }
  return pass ? kOk : kFail;
}

int run_report(const std::string& dir) {
  const std::string text = read_file(fs::path(dir) / "report.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError((fs::path(dir) / "report.json").string(), e.what());
  }
  const auto& f = j.at("final");
  std::printf("report: %s (%s)\n", j.at("status").get<std::string>().c_str(), j.at("stamp").get<std::string>().c_str());
  std::printf("  eps               %.3g\n", f.at("eps").get<double>());
  std::printf("  action            %.10f\n", f.at("action").get<double>());
  std::printf("  period            %.10f\n", f.at("period").get<double>());
  std::printf("  gradient norm     %.3e\n", f.at("grad_norm").get<double>());
  std::printf("  H residual        %.3e\n", f.at("hamiltonian_residual").get<double>());
  std::printf("  EL residual       %.3e\n", f.at("euler_lagrange").get<double>());
  std::printf("  closure           %.3e\n", f.at("closure").get<double>());
  const auto& ex = j.at("continuation").at("action_extrapolated");
  if (!ex.is_null()) std::printf("  action at eps=0   %.10f\n", ex.get<double>());
  return j.at("converged").get<bool>() ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed characteristics of mechanical Hamiltonians by penalized mountain pass"};
  app.require_subcommand(1);
  Overrides o;
  std::string orbit, report_dir;
  std::optional<double> verify_eps;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "deterministic seed");
    if (with_out) sub->add_option("--out", o.out, "output directory");
  };
  CLI::App* reg = app.add_subcommand("check-regularity", "asymptotic regularity scan of V");
  common(reg, true);
  CLI::App* con = app.add_subcommand("check-contact", "uniform contact-type scan near the zero level");
  common(con, true);
  CLI::App* sol = app.add_subcommand("solve", "mountain pass, refinement, continuation and verification");
  common(sol, true);
  sol->add_option("--samples", o.samples, "samples per loop");
  sol->add_option("--eps-schedule", o.eps_schedule, "comma-separated decreasing eps list");
  sol->add_option("--tol", o.tol, "gradient tolerance for every eps");
  sol->add_flag("--overwrite", o.overwrite, "reuse an existing run directory");
  CLI::App* ver = app.add_subcommand("verify", "shoot a stored orbit with RK4");
  common(ver, true);
  ver->add_option("--orbit", orbit, "orbit.csv")->required()->check(CLI::ExistingFile);
  ver->add_option("--eps", verify_eps, "penalty level of the orbit (default: last schedule entry)");
  CLI::App* rep = app.add_subcommand("report", "summarize a run directory");
  rep->add_option("--out", report_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*reg) return run_check_regularity(o);
    if (*con) return run_check_contact(o);
    if (*sol) return run_solve(o);
    if (*ver) return run_verify(o, orbit, verify_eps);
    if (*rep) return run_report(report_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return kFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kFail;
}
