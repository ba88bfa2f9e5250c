#pragma once

#include <cstdint>
#include <string>

#include "core/cloud.hpp"
#include "core/kernels.hpp"
#include "core/layout.hpp"

namespace lskum {

struct SolverConfig {
  double mach = 0.63;
  double aoa_deg = 2.0;
  double gamma = 1.4;
  int iters = 1000;
  int n_inner = 3;
  double cfl = 0.5;
  int order = 2;
  Layout layout = Layout::aos;
  ResidualMode residual_mode = ResidualMode::fused;
  int n_parts = 1;
  int n_workers = 1;
  std::string out_prefix;

  void validate() const;  // throws ErrorCode::config
};

// Where the point cloud comes from: an on-disk grid file, or one of the
// generators ("NXxNY" rectangle, "annulus:NTxNR" ring around the unit
// circle). Exactly one of grid_path/generate must be set.
struct GridSpec {
  std::string grid_path;
  std::string generate;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  int knn = 8;
  RectBounds bounds;
  double outer_radius = 10.0;
};

PointCloud acquire_cloud(const GridSpec& spec);

Layout parse_layout(const std::string& name);
ResidualMode parse_residual_mode(const std::string& name);
const char* layout_name(Layout layout);
const char* residual_mode_name(ResidualMode mode);

// Flat key=value settings, one per line, '#' comments. Keys mirror the CLI
// flags (mach, aoa, gamma, iters, inner, cfl, order, layout, residual_mode,
// parts, workers, out_prefix, grid, generate, jitter, seed, knn, bounds,
// outer_radius). Unknown keys are configuration errors.
void apply_config_entry(SolverConfig& cfg, GridSpec& grid, const std::string& key,
                        const std::string& value);
void load_config_file(SolverConfig& cfg, GridSpec& grid, const std::string& path);

}  // namespace lskum
