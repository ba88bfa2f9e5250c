#include "core/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "core/kinetic.hpp"

namespace lskum {

namespace {

std::string real17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open output file: " + path);
  }
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw Error(ErrorCode::io, "failed writing output file: " + path);
  }
}

}  // namespace

void freestream_init(PointCloud& cloud, double mach, double aoa_deg,
                     const GasModel& gas) {
  const double aoa = aoa_deg * M_PI / 180.0;
  const double u1 = mach * std::cos(aoa);
  const double u2 = mach * std::sin(aoa);
  const double p = 1.0 / gas.gamma;
  FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    store.at(i, slot::prim + 0) = 1.0;
    store.at(i, slot::prim + 1) = u1;
    store.at(i, slot::prim + 2) = u2;
    store.at(i, slot::prim + 3) = p;
  }
}

double rdp(double wall_seconds, std::int64_t iterations, std::int64_t n_points) {
  if (iterations <= 0 || n_points <= 0) {
    throw Error(ErrorCode::argument, "rdp needs positive iteration and point counts");
  }
  return wall_seconds / static_cast<double>(iterations) / static_cast<double>(n_points);
}

double relative_performance(double rdp_test, double rdp_reference) {
  if (rdp_reference == 0.0) {
    throw Error(ErrorCode::argument, "relative performance needs a nonzero reference");
  }
  return rdp_test / rdp_reference;
}

BenchReport make_bench_report(const RunResult& run, std::int32_t n_points) {
  BenchReport report;
  report.iterations = run.iterations;
  report.n_points = n_points;
  report.total_seconds = run.total_seconds;
  const bool have_rate = run.iterations > 0 && n_points > 0;
  report.total_rdp = have_rate ? rdp(run.total_seconds, run.iterations, n_points) : 0.0;

  double split_seconds = 0.0;
  double split_rdp = 0.0;
  bool split_mode = false;
  for (const KernelTiming& k : run.kernels) {
    KernelMetric m;
    m.name = k.name;
    m.seconds = k.seconds;
    m.rdp = have_rate ? rdp(k.seconds, run.iterations, n_points) : 0.0;
    if (k.name.rfind("flux_residual_", 0) == 0) {
      split_mode = true;
      split_seconds += m.seconds;
      split_rdp += m.rdp;
    }
    report.kernels.push_back(std::move(m));
  }
  if (split_mode) {
    report.kernels.push_back({"flux_residual", split_seconds, split_rdp});
  }
  return report;
}

double pressure_coefficient(double p, double mach, double gamma) {
  if (mach == 0.0) return 0.0;
  const double p_inf = 1.0 / gamma;
  return (p - p_inf) / (0.5 * mach * mach);
}

void write_residue_csv(const std::string& path, const ConvergenceHistory& history) {
  std::ofstream out = open_output(path);
  out << "iter,residue,log10rel,wall_ms\n";
  for (std::size_t i = 0; i < history.residue.size(); ++i) {
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", history.wall_ms[i]);
    out << (i + 1) << ',' << real17(history.residue[i]) << ','
        << real17(history.log10_rel[i]) << ',' << wall << "\n";
  }
  close_output(out, path);
}

void write_solution_dat(const std::string& path, const PointCloud& cloud) {
  std::ofstream out = open_output(path);
  const FieldStore& store = cloud.store();
  out << "# id x y rho u1 u2 p\n";
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    out << i << ' ' << real17(cloud.x(i)) << ' ' << real17(cloud.y(i));
    for (int c = 0; c < 4; ++c) {
      out << ' ' << real17(store.at(i, slot::prim + c));
    }
    out << "\n";
  }
  close_output(out, path);
}

void write_bench_csv(const std::string& path, const BenchReport& report) {
  std::ofstream out = open_output(path);
  out << "kernel,seconds,rdp\n";
  char buf[96];
  for (const KernelMetric& k : report.kernels) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g\n", k.name.c_str(), k.seconds, k.rdp);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "total,%.9g,%.9g\n", report.total_seconds,
                report.total_rdp);
  out << buf;
  close_output(out, path);
}

void write_surface_csv(const std::string& path, const PointCloud& cloud, double mach,
                       double gamma) {
  // Wall points are emitted in id order, which the generators lay out as
  // consecutive positions along the boundary loop; arc position is the
  // cumulative chord length from the first wall point.
  std::ofstream out = open_output(path);
  const FieldStore& store = cloud.store();
  out << "arc_position,cp\n";
  double arc = 0.0;
  double prev_x = 0.0, prev_y = 0.0;
  bool have_prev = false;
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    if (cloud.kind(i) != PointKind::wall) continue;
    if (have_prev) {
      const double dx = cloud.x(i) - prev_x;
      const double dy = cloud.y(i) - prev_y;
      arc += std::sqrt(dx * dx + dy * dy);
    }
    prev_x = cloud.x(i);
    prev_y = cloud.y(i);
    have_prev = true;
    const double cp = pressure_coefficient(store.at(i, slot::prim + 3), mach, gamma);
    out << real17(arc) << ',' << real17(cp) << "\n";
  }
  close_output(out, path);
}

void write_outputs(const std::string& prefix, const PointCloud& cloud,
                   const RunResult& run, const BenchReport& report,
                   const SolverConfig& cfg) {
  write_residue_csv(prefix + ".residue.csv", run.history);
  write_solution_dat(prefix + ".solution.dat", cloud);
  write_bench_csv(prefix + ".bench.csv", report);
  if (cloud.has_wall_points()) {
    write_surface_csv(prefix + ".surface.csv", cloud, cfg.mach, cfg.gamma);
  }
}

}  // namespace lskum
