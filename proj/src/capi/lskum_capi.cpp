#include "lskum/lskum.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "core/bench.hpp"
#include "core/cloud.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/runtime.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int status, const char* what) {
  g_last_error = what;
  return status;
}

// Funnels C++ exceptions into status codes; the ErrorCode values were
// chosen to match the LSKUM_ERR_* constants one to one.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LSKUM_OK;
  } catch (const lskum::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LSKUM_ERR_ARGUMENT;
  }
}

}  // namespace

struct lskum_cloud {
  lskum::PointCloud cloud;
};

struct lskum_config {
  lskum::SolverConfig solver;
  lskum::GridSpec grid;
};

struct lskum_result {
  lskum::RunResult run;
  lskum::BenchReport report;
  lskum::SolverConfig solver;
};

extern "C" {

int lskum_cloud_read_file(const char* path, lskum_cloud** out) {
  if (!path || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new lskum_cloud{lskum::read_point_cloud_file(path)}; });
}

int lskum_cloud_write_file(const lskum_cloud* cloud, const char* path) {
  if (!cloud || !path) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { lskum::write_point_cloud_file(cloud->cloud, path); });
}

int lskum_cloud_generate_rect(int nx, int ny, double jitter, uint64_t seed, int knn,
                              lskum_cloud** out) {
  if (!out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lskum_cloud{
        lskum::generate_rect_cloud(nx, ny, lskum::RectBounds{}, jitter, seed, knn)};
  });
}

int lskum_cloud_generate_annulus(int n_theta, int n_rings, double outer_radius,
                                 double jitter, uint64_t seed, int knn,
                                 lskum_cloud** out) {
  if (!out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lskum_cloud{lskum::generate_annulus_cloud(n_theta, n_rings, outer_radius,
                                                         jitter, seed, knn)};
  });
}

int lskum_cloud_from_config(const lskum_config* cfg, lskum_cloud** out) {
  if (!cfg || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new lskum_cloud{lskum::acquire_cloud(cfg->grid)}; });
}

int32_t lskum_cloud_n_points(const lskum_cloud* cloud) {
  return cloud ? cloud->cloud.n_points() : 0;
}

int lskum_cloud_validate(const lskum_cloud* cloud, lskum_validation* out) {
  if (!cloud || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const lskum::ValidationReport report = lskum::validate_cloud(cloud->cloud);
    out->n_points = cloud->cloud.n_points();
    out->n_defective = report.n_defective;
    out->n_wall_isolated = report.n_wall_isolated;
    out->min_stencil_size = report.min_stencil_size;
    out->h_ref = report.h_ref;
    out->det_tol = report.det_tol;
  });
}

int lskum_cloud_defective_ids(const lskum_cloud* cloud, int32_t* ids, int32_t cap,
                              int32_t* n_out) {
  if (!cloud || !n_out || (cap > 0 && !ids)) {
    return fail(LSKUM_ERR_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const lskum::ValidationReport report = lskum::validate_cloud(cloud->cloud);
    *n_out = report.n_defective;
    const int32_t n_copy =
        std::min<int32_t>(cap, static_cast<int32_t>(report.defective_ids.size()));
    for (int32_t i = 0; i < n_copy; ++i) ids[i] = report.defective_ids[i];
  });
}

int lskum_cloud_primitive(const lskum_cloud* cloud, int32_t point, double out[4]) {
  if (!cloud || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  if (point < 0 || point >= cloud->cloud.n_points()) {
    return fail(LSKUM_ERR_ARGUMENT, "point id out of range");
  }
  const lskum::FieldStore& store = cloud->cloud.store();
  for (int c = 0; c < 4; ++c) out[c] = store.at(point, lskum::slot::prim + c);
  return LSKUM_OK;
}

int lskum_cloud_fields_equal(const lskum_cloud* a, const lskum_cloud* b, int* equal) {
  if (!a || !b || !equal) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *equal = lskum::store_equivalence_check(a->cloud.store(), b->cloud.store()) ? 1 : 0;
  });
}

void lskum_cloud_destroy(lskum_cloud* cloud) { delete cloud; }

int lskum_config_create(lskum_config** out) {
  if (!out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  *out = new lskum_config{};
  return LSKUM_OK;
}

int lskum_config_set(lskum_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { lskum::apply_config_entry(cfg->solver, cfg->grid, key, value); });
}

int lskum_config_get(const lskum_config* cfg, const char* key, char* buf, size_t cap) {
  if (!cfg || !key || !buf) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    char tmp[512];
    const std::string k = key;
    const lskum::SolverConfig& s = cfg->solver;
    const lskum::GridSpec& g = cfg->grid;
    auto real = [&](double v) { std::snprintf(tmp, sizeof(tmp), "%.17g", v); };
    auto integer = [&](long long v) { std::snprintf(tmp, sizeof(tmp), "%lld", v); };
    auto text = [&](const std::string& v) {
      std::snprintf(tmp, sizeof(tmp), "%s", v.c_str());
    };
    if (k == "mach") real(s.mach);
    else if (k == "aoa") real(s.aoa_deg);
    else if (k == "gamma") real(s.gamma);
    else if (k == "iters") integer(s.iters);
    else if (k == "inner") integer(s.n_inner);
    else if (k == "cfl") real(s.cfl);
    else if (k == "order") integer(s.order);
    else if (k == "layout") text(lskum::layout_name(s.layout));
    else if (k == "residual_mode") text(lskum::residual_mode_name(s.residual_mode));
    else if (k == "parts") integer(s.n_parts);
    else if (k == "workers") integer(s.n_workers);
    else if (k == "out_prefix") text(s.out_prefix);
    else if (k == "grid") text(g.grid_path);
    else if (k == "generate") text(g.generate);
    else if (k == "jitter") real(g.jitter);
    else if (k == "seed") integer(static_cast<long long>(g.seed));
    else if (k == "knn") integer(g.knn);
    else if (k == "outer_radius") real(g.outer_radius);
    else if (k == "bounds") {
      std::snprintf(tmp, sizeof(tmp), "%.17g,%.17g,%.17g,%.17g", g.bounds.xmin,
                    g.bounds.xmax, g.bounds.ymin, g.bounds.ymax);
    } else {
      throw lskum::Error(lskum::ErrorCode::config, "unknown config key '" + k + "'");
    }
    const std::size_t need = std::strlen(tmp) + 1;
    if (cap < need) {
      throw lskum::Error(lskum::ErrorCode::argument, "buffer too small for " + k);
    }
    std::memcpy(buf, tmp, need);
  });
}

int lskum_config_load(lskum_config* cfg, const char* path) {
  if (!cfg || !path) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { lskum::load_config_file(cfg->solver, cfg->grid, path); });
}

int lskum_config_validate(const lskum_config* cfg) {
  if (!cfg) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { cfg->solver.validate(); });
}

void lskum_config_destroy(lskum_config* cfg) { delete cfg; }

int lskum_run(lskum_cloud* cloud, const lskum_config* cfg, lskum_result** out) {
  if (!cloud || !cfg || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->solver.validate();
    cloud->cloud.reset_store(cfg->solver.layout);
    lskum::freestream_init(cloud->cloud, cfg->solver.mach, cfg->solver.aoa_deg,
                           lskum::GasModel{cfg->solver.gamma});
    lskum::RunResult run = lskum::run_fixed_point(cloud->cloud, cfg->solver);
    lskum::BenchReport report = lskum::make_bench_report(run, cloud->cloud.n_points());
    *out = new lskum_result{std::move(run), std::move(report), cfg->solver};
  });
}

int lskum_result_iterations(const lskum_result* result) {
  return result ? result->run.iterations : 0;
}

int lskum_result_residue(const lskum_result* result, int iteration, double* out) {
  if (!result || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  const auto& residue = result->run.history.residue;
  if (iteration < 1 || iteration > static_cast<int>(residue.size())) {
    return fail(LSKUM_ERR_ARGUMENT, "iteration out of range");
  }
  *out = residue[iteration - 1];
  return LSKUM_OK;
}

int lskum_result_final_residue(const lskum_result* result, double* out) {
  if (!result || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  if (result->run.history.residue.empty()) {
    return fail(LSKUM_ERR_ARGUMENT, "empty history");
  }
  *out = result->run.history.residue.back();
  return LSKUM_OK;
}

int lskum_result_final_log10_rel(const lskum_result* result, double* out) {
  if (!result || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  if (result->run.history.log10_rel.empty()) {
    return fail(LSKUM_ERR_ARGUMENT, "empty history");
  }
  *out = result->run.history.log10_rel.back();
  return LSKUM_OK;
}

double lskum_result_total_seconds(const lskum_result* result) {
  return result ? result->run.total_seconds : 0.0;
}

int lskum_result_rdp(const lskum_result* result, double* out) {
  if (!result || !out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  *out = result->report.total_rdp;
  return LSKUM_OK;
}

int lskum_result_kernel_count(const lskum_result* result) {
  return result ? static_cast<int>(result->report.kernels.size()) : 0;
}

const char* lskum_result_kernel_name(const lskum_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->report.kernels.size())) {
    return nullptr;
  }
  return result->report.kernels[index].name.c_str();
}

int lskum_result_kernel_seconds(const lskum_result* result, int index, double* out) {
  if (!result || !out || index < 0 ||
      index >= static_cast<int>(result->report.kernels.size())) {
    return fail(LSKUM_ERR_ARGUMENT, "bad kernel index");
  }
  *out = result->report.kernels[index].seconds;
  return LSKUM_OK;
}

int lskum_result_kernel_rdp(const lskum_result* result, int index, double* out) {
  if (!result || !out || index < 0 ||
      index >= static_cast<int>(result->report.kernels.size())) {
    return fail(LSKUM_ERR_ARGUMENT, "bad kernel index");
  }
  *out = result->report.kernels[index].rdp;
  return LSKUM_OK;
}

int lskum_result_write_outputs(const lskum_result* result, const lskum_cloud* cloud,
                               const char* prefix) {
  if (!result || !cloud || !prefix) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    lskum::write_outputs(prefix, cloud->cloud, result->run, result->report,
                         result->solver);
  });
}

void lskum_result_destroy(lskum_result* result) { delete result; }

int lskum_rdp(double wall_seconds, int64_t iterations, int64_t n_points, double* out) {
  if (!out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = lskum::rdp(wall_seconds, iterations, n_points); });
}

int lskum_relative_performance(double rdp_test, double rdp_reference, double* out) {
  if (!out) return fail(LSKUM_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = lskum::relative_performance(rdp_test, rdp_reference); });
}

const char* lskum_last_error(void) { return g_last_error.c_str(); }

const char* lskum_status_name(int status) {
  switch (status) {
    case LSKUM_OK: return "ok";
    case LSKUM_ERR_ARGUMENT: return "argument";
    case LSKUM_ERR_PARSE: return "parse";
    case LSKUM_ERR_IO: return "io";
    case LSKUM_ERR_VALIDATION: return "validation";
    case LSKUM_ERR_SINGULAR: return "singular";
    case LSKUM_ERR_POSITIVITY: return "positivity";
    case LSKUM_ERR_CONFIG: return "config";
    default: return "unknown";
  }
}

const char* lskum_version(void) { return "1.0.0"; }

}  // extern "C"
