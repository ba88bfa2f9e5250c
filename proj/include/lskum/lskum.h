/* Meshfree kinetic Euler solver — C interface.
 *
 * All functions that can fail return an int status (LSKUM_OK on success);
 * lskum_last_error() describes the most recent failure on the calling
 * thread. Handles are opaque and must be released with the matching
 * *_destroy call.
 */
#ifndef LSKUM_H
#define LSKUM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  LSKUM_OK = 0,
  LSKUM_ERR_ARGUMENT = 1,
  LSKUM_ERR_PARSE = 2,
  LSKUM_ERR_IO = 3,
  LSKUM_ERR_VALIDATION = 4,
  LSKUM_ERR_SINGULAR = 5,
  LSKUM_ERR_POSITIVITY = 6,
  LSKUM_ERR_CONFIG = 7
};

typedef struct lskum_cloud lskum_cloud;
typedef struct lskum_config lskum_config;
typedef struct lskum_result lskum_result;

typedef struct {
  int32_t n_points;
  int32_t n_defective;
  int32_t n_wall_isolated;
  int32_t min_stencil_size;
  double h_ref;
  double det_tol;
} lskum_validation;

/* ---- point clouds ---- */

int lskum_cloud_read_file(const char* path, lskum_cloud** out);
int lskum_cloud_write_file(const lskum_cloud* cloud, const char* path);
int lskum_cloud_generate_rect(int nx, int ny, double jitter, uint64_t seed, int knn,
                              lskum_cloud** out);
int lskum_cloud_generate_annulus(int n_theta, int n_rings, double outer_radius,
                                 double jitter, uint64_t seed, int knn,
                                 lskum_cloud** out);
/* Builds the cloud described by the config's grid/generate keys. */
int lskum_cloud_from_config(const lskum_config* cfg, lskum_cloud** out);
int32_t lskum_cloud_n_points(const lskum_cloud* cloud);
int lskum_cloud_validate(const lskum_cloud* cloud, lskum_validation* out);
/* Fills up to `cap` defective point ids; sets *n_out to the total count. */
int lskum_cloud_defective_ids(const lskum_cloud* cloud, int32_t* ids, int32_t cap,
                              int32_t* n_out);
/* Primitive state (rho, u1, u2, p) currently stored at a point. */
int lskum_cloud_primitive(const lskum_cloud* cloud, int32_t point, double out[4]);
/* Bitwise comparison of the two clouds' field stores. */
int lskum_cloud_fields_equal(const lskum_cloud* a, const lskum_cloud* b, int* equal);
void lskum_cloud_destroy(lskum_cloud* cloud);

/* ---- configuration ---- */

int lskum_config_create(lskum_config** out);
/* Keys mirror the config-file format: mach, aoa, gamma, iters, inner, cfl,
 * order, layout (aos|soa), residual_mode (fused|split4), parts, workers,
 * out_prefix, grid, generate, jitter, seed, knn, bounds, outer_radius. */
int lskum_config_set(lskum_config* cfg, const char* key, const char* value);
/* Current value of a key, rendered in the same form lskum_config_set
 * accepts. Fails if `cap` cannot hold the value and its terminator. */
int lskum_config_get(const lskum_config* cfg, const char* key, char* buf, size_t cap);
int lskum_config_load(lskum_config* cfg, const char* path);
/* Semantic check of the solver settings (ranges, enum values). */
int lskum_config_validate(const lskum_config* cfg);
void lskum_config_destroy(lskum_config* cfg);

/* ---- solving ---- */

/* Initialises the cloud's fields to the configured free stream, runs the
 * configured number of fixed-point iterations, and leaves the final state
 * in the cloud. */
int lskum_run(lskum_cloud* cloud, const lskum_config* cfg, lskum_result** out);

int lskum_result_iterations(const lskum_result* result);
/* Residue history entry for a 1-based iteration number. */
int lskum_result_residue(const lskum_result* result, int iteration, double* out);
int lskum_result_final_residue(const lskum_result* result, double* out);
int lskum_result_final_log10_rel(const lskum_result* result, double* out);
double lskum_result_total_seconds(const lskum_result* result);
int lskum_result_rdp(const lskum_result* result, double* out);
int lskum_result_kernel_count(const lskum_result* result);
const char* lskum_result_kernel_name(const lskum_result* result, int index);
int lskum_result_kernel_seconds(const lskum_result* result, int index, double* out);
int lskum_result_kernel_rdp(const lskum_result* result, int index, double* out);
/* Writes <prefix>.residue.csv, .solution.dat, .bench.csv and, for clouds
 * with wall points, .surface.csv. */
int lskum_result_write_outputs(const lskum_result* result, const lskum_cloud* cloud,
                               const char* prefix);
void lskum_result_destroy(lskum_result* result);

/* ---- metrics ---- */

int lskum_rdp(double wall_seconds, int64_t iterations, int64_t n_points, double* out);
int lskum_relative_performance(double rdp_test, double rdp_reference, double* out);

/* ---- diagnostics ---- */

const char* lskum_last_error(void);
const char* lskum_status_name(int status);
const char* lskum_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LSKUM_H */
