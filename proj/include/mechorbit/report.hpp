#pragma once

#include "mechorbit/config.hpp"

#include <string>

namespace mechorbit {

/// Structured run reports (JSON text). No wall-clock data, so identical runs
/// give identical bytes.
std::string solve_report(const RunConfig& config, const SolveReport& report);
std::string regularity_report(const RegularityReport& r);
std::string contact_report(const ContactCheckReport& r);
std::string verify_report(const OrbitSolution& s, const ShootingReport& shot, double closure_tolerance);

}  // namespace mechorbit
