#include "mfgpi/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace mfg {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

void write_coordinates(std::ofstream& out, const SpaceGrid& grid, std::size_t k) {
  for (int d = 0; d < grid.dim(); ++d) out << ',' << format_real(grid.coordinate(k, d));
}

std::string coordinate_header(const SpaceGrid& grid) {
  return grid.dim() == 1 ? "t,x1" : "t,x1,x2";
}

void write_time_field(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                      const TimeField& f, const char* column) {
  if (f.node_count() != grid.size()) throw std::invalid_argument("field does not match grid");
  auto out = open_for_write(path);
  out << coordinate_header(grid) << ',' << column << '\n';
  for (std::size_t n = 0; n < f.slice_count(); ++n) {
    const std::string t = format_real(time.time(static_cast<int>(n)));
    const auto slice = f.slice(n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out << t;
      write_coordinates(out, grid, k);
      out << ',' << format_real(slice[k]) << '\n';
    }
  }
  finish(out, path);
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int digits = 15; digits < 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_density_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                       const TimeField& m) {
  write_time_field(path, grid, time, m, "m");
}

void write_value_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                     const TimeField& u) {
  write_time_field(path, grid, time, u, "u");
}

void write_policy_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                      const PolicyTimeField& q) {
  auto out = open_for_write(path);
  out << coordinate_header(grid);
  for (int d = 1; d <= grid.dim(); ++d) out << ",q_left_" << d << ",q_right_" << d;
  out << '\n';
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (q[n].node_count() != grid.size() || q[n].dim() != grid.dim()) {
      throw std::invalid_argument("policy does not match grid");
    }
    const std::string t = format_real(time.time(static_cast<int>(n)));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out << t;
      write_coordinates(out, grid, k);
      for (std::size_t c = 0; c < q[n].component_count(); ++c) {
        out << ',' << format_real(q[n].component(c)[k]);
      }
      out << '\n';
    }
  }
  finish(out, path);
}

void write_history_csv(const std::string& path, const ConvergenceReport& report) {
  auto out = open_for_write(path);
  out << "iteration,d_density,res_hjb,res_fp,gap_u,gap_m,gap_q\n";
  for (const auto& r : report.history) {
    out << r.iteration << ',' << format_real(r.d_density) << ',' << format_real(r.res_hjb) << ','
        << format_real(r.res_fp) << ',' << format_real(r.gap_u) << ',' << format_real(r.gap_m)
        << ',' << format_real(r.gap_q) << '\n';
  }
  finish(out, path);
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm local{};
  localtime_r(&now, &local);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S%z", &local);
  return buf;
}

}  // namespace mfg
