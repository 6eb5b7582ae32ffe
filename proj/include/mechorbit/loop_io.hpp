#pragma once

#include "mechorbit/loopspace.hpp"

#include <filesystem>
#include <string>

namespace mechorbit {

/// Raw loop file contents: samples and tau. Winding is recovered from the
/// samples by LoopSpace::make_loop.
struct LoopRecord {
  Matrix samples;
  double tau = 0.0;
};

/// Header `s,q1..qn`, one row per sample, trailing `tau,<value>` row; all
/// numbers with 17 significant digits.
std::string format_loop_csv(const LoopPoint& p);
LoopRecord parse_loop_csv(const std::string& text);

void write_loop_csv(const std::filesystem::path& path, const LoopPoint& p);
LoopRecord read_loop_csv(const std::filesystem::path& path);

}  // namespace mechorbit
