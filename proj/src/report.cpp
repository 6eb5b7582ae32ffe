#include "mechorbit/report.hpp"

#include <json.hpp>

#include <cmath>

namespace mechorbit {

namespace {

using json = nlohmann::ordered_json;

json vec(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json regularity_json(const RegularityReport& r) {
  json shells = json::array();
  for (const RegularityShell& s : r.shells)
    shells.push_back({{"r_inner", s.r_inner},
                      {"r_outer", s.r_outer},
                      {"min_grad", s.min_grad},
                      {"max_ratio", s.max_ratio},
                      {"samples", s.samples}});
  return {{"verdict", r.pass ? "PASS" : "FAIL"},
          {"v_infinity", r.v_infinity},
          {"ratio_decreasing", r.ratio_decreasing},
          {"total_samples", r.total_samples},
          {"reason", r.reason},
          {"shells", shells}};
}

json contact_json(const ContactCheckReport& r) {
  return {{"verdict", r.pass ? "PASS" : "FAIL"},
          {"kappa", r.kappa},
          {"kappa_source", r.kappa_auto ? "kappa0 = 1/(2 C)" : "configured"},
          {"kappa0", r.kappa0},
          {"c_estimate", r.c_estimate},
          {"v_infinity", r.v_infinity},
          {"v0", r.v0},
          {"eps0", r.eps0},
          {"a_kappa", r.a_kappa},
          {"min_theta_xh", r.min_theta},
          {"min_excess", r.min_excess},
          {"samples", r.samples},
          {"band_hits", r.band_hits},
          {"degenerate", r.degenerate},
          {"regularity_pass", r.regularity_pass},
          {"reason", r.reason}};
}

json solution_json(const OrbitSolution& s) {
  const PenaltyDiagnostics& d = s.penalty;
  const TauBounds& t = d.tau_bounds;
  return {{"eps", s.eps},
          {"tau", s.point.tau},
          {"period", s.period},
          {"action", s.action},
          {"penalized_action", s.penalized_action},
          {"grad_norm", s.grad_norm},
          {"grad_tolerance", s.grad_tolerance},
          {"eps_tilde", d.eps_tilde},
          {"hamiltonian_residual", s.hamiltonian_residual},
          {"hamiltonian_mean_residual", d.level_mean_residual},
          {"level_tolerance", s.level_tolerance},
          {"euler_lagrange", s.euler_lagrange},
          {"closure", s.closure},
          {"shooting",
           {{"steps", s.shooting.steps},
            {"closure_q", s.shooting.closure_q},
            {"closure_theta", s.shooting.closure_theta},
            {"energy_drift", s.shooting.energy_drift},
            {"level_deviation", s.shooting.level_deviation}}},
          {"identities",
           {{"r1", d.residuals.r1},
            {"r2", d.residuals.r2},
            {"raw1", d.residuals.raw1},
            {"raw1_doubled", d.residuals.raw1_doubled},
            {"raw2", d.residuals.raw2},
            {"ok", d.residuals_ok}}},
          {"tau_bounds",
           {{"est2", t.est2_value},
            {"est2_bound", t.est2_bound},
            {"t0", t.t0},
            {"t1", t.t1},
            {"t2", t.t2},
            {"t3", d.t3 ? json(*d.t3) : json(nullptr)},
            {"pass", t.pass()}}},
          {"action_in_window", d.in_window},
          {"refine",
           {{"message", s.refine.message},
            {"iterations", s.refine.iterations},
            {"grad_initial", s.refine.grad_norm_initial},
            {"rank", s.refine.rank},
            {"unknowns", s.refine.unknowns},
            {"pinned_sample", s.refine.pinned_sample},
            {"pinned_coordinate", s.refine.pinned_coordinate},
            {"fallback", s.refine.fallback},
            {"trace", s.refine.grad_trace}}},
          {"accepted", s.accepted},
          {"reason", s.reason}};
}

}  // namespace

std::string regularity_report(const RegularityReport& r) { return regularity_json(r).dump(2) + "\n"; }

std::string contact_report(const ContactCheckReport& r) { return contact_json(r).dump(2) + "\n"; }

std::string verify_report(const OrbitSolution& s, const ShootingReport& shot, double closure_tolerance) {
  json j = {{"verdict", shot.closure <= closure_tolerance ? "PASS" : "FAIL"},
            {"closure_tolerance", closure_tolerance},
            {"period", shot.period},
            {"steps", shot.steps},
            {"closure", shot.closure},
            {"closure_q", shot.closure_q},
            {"closure_theta", shot.closure_theta},
            {"energy_drift", shot.energy_drift},
            {"level_deviation", shot.level_deviation},
            {"q0", vec(shot.q0)},
            {"theta0", vec(shot.theta0)},
            {"orbit", solution_json(s)}};
  return j.dump(2) + "\n";
}

std::string solve_report(const RunConfig& config, const SolveReport& r) {
  const LinkingEndpoints& e = r.linking;
  const LinkingConfig& lc = config.linking;
  const MountainPassResult& mp = r.mountain_pass;
  const ContinuationResult& c = r.continuation;

  json linking = {{"sigma1", e.sigma1},
                  {"sigma2", e.sigma2},
                  {"a", e.a},
                  {"b", e.b},
                  {"v_max", e.v_max},
                  {"energy_max", e.energy_max},
                  {"min_potential", e.min_potential},
                  {"seed_potential_mean", e.seed_potential},
                  {"action_low", e.action_low},
                  {"action_high", e.action_high},
                  {"rho", e.rho},
                  {"nu", e.nu},
                  {"symmetry",
                   {{"enabled", e.symmetry.enabled},
                    {"order", e.symmetry.order},
                    {"center", vec(e.symmetry.center)},
                    {"reason", e.symmetry_reason}}},
                  {"provenance",
                   {{"b", lc.b ? "configured" : "0.1 |min sampled V|"},
                    {"a", "b/2"},
                    {"sigma1", lc.sigma1 ? "configured" : "log(b/(2 V_max)) - margin"},
                    {"sigma2", lc.sigma2 ? "configured" : "max(log(E_max/b), sigma1) + margin"}}}};

  json minimax = {{"a_bar", r.a_bar},
                  {"a_bar_rule", r.a_bar > e.a ? "max endpoint value + a/2" : "a"},
                  {"initial_max", mp.initial_max},
                  {"c_eps", mp.c_eps},
                  {"candidate_value", mp.candidate_value},
                  {"candidate_tau", mp.candidate.tau},
                  {"grad_norm", mp.grad_norm},
                  {"iterations", mp.iterations},
                  {"reparam_rejected", mp.reparam_rejected},
                  {"chord_rejected", mp.chord_rejected},
                  {"monotone", mp.monotone},
                  {"sandwich", r.sandwich},
                  {"status", mp.status},
                  {"max_trace", mp.max_trace}};

  json table = json::array();
  json tau_trace = json::array();
  for (const OrbitSolution& s : c.solutions) {
    table.push_back(solution_json(s));
    tau_trace.push_back(s.point.tau);
  }
  json continuation = {{"aborted", c.aborted},
                       {"message", c.message},
                       {"tau_trace", tau_trace},
                       {"tau_spread", c.tau_spread},
                       {"t3", c.t3},
                       {"action_extrapolated", c.action_extrapolated ? json(*c.action_extrapolated) : json(nullptr)},
                       {"tau_extrapolated", c.tau_extrapolated ? json(*c.tau_extrapolated) : json(nullptr)},
                       {"extrapolation", "linear in eps through the last two accepted solutions"},
                       {"solutions", table}};

  const OrbitSolution& f = r.final_solution;
  json j;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["stamp"] = r.advisory ? "ADVISORY" : "VERIFIED";
  j["final"] = {{"eps", f.eps},
                {"action", f.action},
                {"period", f.period},
                {"tau", f.point.tau},
                {"grad_norm", f.grad_norm},
                {"hamiltonian_residual", f.hamiltonian_residual},
                {"euler_lagrange", f.euler_lagrange},
                {"closure", f.closure},
                {"accepted", f.accepted}};
  j["regularity"] = regularity_json(r.regularity);
  if (r.contact)
    j["contact"] = contact_json(*r.contact);
  else
    j["contact"] = {{"verdict", config.contact.enabled ? "ERROR" : "SKIPPED"}, {"reason", r.contact_error}};
  j["a_kappa"] = r.a_kappa;
  j["linking"] = linking;
  j["minimax"] = minimax;
  j["continuation"] = continuation;
  // The run directory is where the report lives, not part of the run.
  j["config"] = json::parse(write_config(config));
  j["config"].erase("output");
  return j.dump(2) + "\n";
}

}  // namespace mechorbit
