#include "mechorbit/loop_io.hpp"

#include "mechorbit/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mechorbit {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double number(const std::string& s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw Error("loop csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_loop_csv(const LoopPoint& p) {
  const Matrix& s = p.loop.samples;
  std::string out = "s";
  for (Eigen::Index k = 0; k < s.cols(); ++k) out += ",q" + std::to_string(k + 1);
  out += "\n";
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    out += g17(static_cast<double>(i) / static_cast<double>(s.rows()));
    for (Eigen::Index k = 0; k < s.cols(); ++k) out += "," + g17(s(i, k));
    out += "\n";
  }
  out += "tau," + g17(p.tau) + "\n";
  return out;
}

LoopRecord parse_loop_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("loop csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "s") throw Error("loop csv header must start with 's,q1'");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < dim; ++k)
    if (header[k + 1] != "q" + std::to_string(k + 1)) throw Error("loop csv header column " + std::to_string(k + 2) + " must be q" + std::to_string(k + 1));
  std::vector<std::vector<double>> rows;
  bool have_tau = false;
  LoopRecord rec;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (have_tau) throw Error("loop csv line " + std::to_string(lineno) + ": data after tau row");
    const auto cells = split(line);
    if (!cells.empty() && cells[0] == "tau") {
      if (cells.size() != 2) throw Error("loop csv line " + std::to_string(lineno) + ": tau row needs one value");
      rec.tau = number(cells[1], lineno);
      have_tau = true;
      continue;
    }
    if (static_cast<int>(cells.size()) != dim + 1) throw Error("loop csv line " + std::to_string(lineno) + ": wrong column count");
    std::vector<double> r(dim);
    for (int k = 0; k < dim; ++k) r[k] = number(cells[k + 1], lineno);
    number(cells[0], lineno);
    rows.push_back(std::move(r));
  }
  if (!have_tau) throw Error("loop csv has no tau row");
  rec.samples.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < dim; ++k) rec.samples(static_cast<Eigen::Index>(i), k) = rows[i][k];
  return rec;
}

void write_loop_csv(const std::filesystem::path& path, const LoopPoint& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_loop_csv(p);
  if (!out) throw Error("failed writing " + path.string());
}

LoopRecord read_loop_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_loop_csv(ss.str());
}

}  // namespace mechorbit
