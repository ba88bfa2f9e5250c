#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/cloud.hpp"
#include "core/config.hpp"
#include "core/runtime.hpp"

namespace lskum {

// Uniform free stream under the nondimensionalization rho_inf = 1,
// a_inf = 1 (so p_inf = 1/gamma): u = M (cos aoa, sin aoa).
void freestream_init(PointCloud& cloud, double mach, double aoa_deg,
                     const GasModel& gas);

// Rate of data processing: wall seconds per iteration per point. Lower is
// faster; ratios of two RDPs compare codes independently of cloud size.
double rdp(double wall_seconds, std::int64_t iterations, std::int64_t n_points);
double relative_performance(double rdp_test, double rdp_reference);

struct KernelMetric {
  std::string name;
  double seconds = 0.0;
  double rdp = 0.0;
};

struct BenchReport {
  int iterations = 0;
  std::int32_t n_points = 0;
  double total_seconds = 0.0;
  double total_rdp = 0.0;
  std::vector<KernelMetric> kernels;
};

// In split4 mode the report carries both the four directional passes and
// an aggregate flux_residual row whose RDP is the sum of theirs.
BenchReport make_bench_report(const RunResult& run, std::int32_t n_points);

double pressure_coefficient(double p, double mach, double gamma);

void write_residue_csv(const std::string& path, const ConvergenceHistory& history);
void write_solution_dat(const std::string& path, const PointCloud& cloud);
void write_bench_csv(const std::string& path, const BenchReport& report);
void write_surface_csv(const std::string& path, const PointCloud& cloud, double mach,
                       double gamma);

// Full output set under `prefix` (parent directories are created):
// <prefix>.residue.csv, <prefix>.solution.dat, <prefix>.bench.csv, and
// <prefix>.surface.csv when the cloud has wall points.
void write_outputs(const std::string& prefix, const PointCloud& cloud,
                   const RunResult& run, const BenchReport& report,
                   const SolverConfig& cfg);

}  // namespace lskum
