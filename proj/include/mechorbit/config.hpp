#pragma once

#include "mechorbit/presets.hpp"
#include "mechorbit/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mechorbit {

struct GeometrySpec {
  int dimension = 1;
  std::string preset = "harmonic";  // empty when `potential` is an expression
  ParamMap params;
  std::string potential;
  std::string metric = "flat";  // flat, conformal or warped
  std::string metric_expression;  // conformal factor f or warp w
  std::vector<std::optional<double>> periods;  // empty: none periodic
  std::optional<Vector> box_lo, box_hi;        // default: [-half_width, half_width]^n
  double half_width = 10.0;
};

struct ContactSpec {
  bool enabled = true;
  double eps0 = 0.05;
  std::optional<double> kappa;
  int samples = 2000;
};

struct RunConfig {
  GeometrySpec geometry;
  int samples = 128;
  DerivativeScheme scheme = DerivativeScheme::kCentral;
  int path_nodes = 33;
  LinkingConfig linking;
  PenaltySchedule schedule;
  AcceptanceTolerances tolerances;
  double refine_tol = 1e-10;
  double newton_basin = 2.0;
  double tau_jump = 1.0;
  int mp_max_iter = 4000;
  double mp_tol = 1e-4;
  int push_radius = 8;
  int stall_window = 100;
  double stall_tol = 1e-4;
  int shooting_steps = 10000;
  RegularityOptions regularity;
  ContactSpec contact;
  std::string output = "run";
  std::uint64_t seed = 1;
};

/// Throws ConfigError: "line:col" for syntax, a field path for semantics.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);
/// Every field written, so parse(write(c)) reproduces c.
std::string write_config(const RunConfig& c);
bool operator==(const RunConfig& a, const RunConfig& b);

/// Cross-field checks (sigma order, point dimensions, preset names).
void validate(const RunConfig& c);

GeometryBundle build_bundle(const GeometrySpec& g);
SolveOptions solve_options(const RunConfig& c);

}  // namespace mechorbit
