// Command-line driver: solve / bench / generate / validate on meshfree
// clouds. Talks to the solver exclusively through the public C API.

#include <cstdio>
#include <list>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lskum/lskum.h"

namespace {

int exit_code(int status) {
  switch (status) {
    case LSKUM_OK:
      return 0;
    case LSKUM_ERR_VALIDATION:
      return 2;
    case LSKUM_ERR_SINGULAR:
    case LSKUM_ERR_POSITIVITY:
      return 3;
    default:
      return 1;  // configuration, argument, io, parse
  }
}

int report_error(int status) {
  std::fprintf(stderr, "error (%s): %s\n", lskum_status_name(status),
               lskum_last_error());
  return exit_code(status);
}

// Forwards CLI flags into a config object as key=value pairs, in the same
// form the config file uses; only flags the user actually passed are
// applied, so file settings survive unless overridden.
class ConfigFlags {
 public:
  void attach_grid(CLI::App* cmd) {
    cmd->add_option("--config", config_path_, "key=value config file (flags win)");
    add(cmd, "--grid", "grid", "read a grid file");
    add(cmd, "--generate", "generate",
        "generate a cloud: NXxNY rectangle or annulus:NTxNR");
    add(cmd, "--jitter", "jitter", "relative point jitter in [0,0.3]");
    add(cmd, "--seed", "seed", "jitter RNG seed");
    add(cmd, "--knn", "knn", "stencil size (nearest neighbours)");
    add(cmd, "--bounds", "bounds", "rectangle bounds xmin,xmax,ymin,ymax");
    add(cmd, "--outer-radius", "outer_radius", "annulus far-field radius");
  }

  void attach_solver(CLI::App* cmd) {
    add(cmd, "--mach", "mach", "free-stream Mach number");
    add(cmd, "--aoa", "aoa", "angle of attack in degrees");
    add(cmd, "--gamma", "gamma", "ratio of specific heats");
    add(cmd, "--iters", "iters", "outer iterations");
    add(cmd, "--inner", "inner", "inner derivative sweeps per iteration");
    add(cmd, "--cfl", "cfl", "CFL number for local timesteps");
    add(cmd, "--order", "order", "spatial order: 1 or 2");
    add(cmd, "--layout", "layout", "field storage layout: aos or soa");
    add(cmd, "--residual-mode", "residual_mode", "fused or split4");
    add(cmd, "--parts", "parts", "partition count");
    add(cmd, "--workers", "workers", "worker thread count");
    add(cmd, "--out-prefix", "out_prefix", "output file prefix");
  }

  int apply(lskum_config* cfg) const {
    if (!config_path_.empty()) {
      const int rc = lskum_config_load(cfg, config_path_.c_str());
      if (rc != LSKUM_OK) return rc;
    }
    for (const Entry& e : entries_) {
      if (e.opt->count() > 0) {
        const int rc = lskum_config_set(cfg, e.key, e.value.c_str());
        if (rc != LSKUM_OK) return rc;
      }
    }
    return LSKUM_OK;
  }

 private:
  struct Entry {
    const char* key;
    std::string value;
    CLI::Option* opt;
  };

  void add(CLI::App* cmd, const char* flag, const char* key, const char* desc) {
    entries_.push_back({key, {}, nullptr});
    entries_.back().opt = cmd->add_option(flag, entries_.back().value, desc);
  }

  std::list<Entry> entries_;  // stable addresses for CLI11 bindings
  std::string config_path_;
};

std::string config_string(const lskum_config* cfg, const char* key) {
  char buf[1024];
  if (lskum_config_get(cfg, key, buf, sizeof(buf)) != LSKUM_OK) return {};
  return buf;
}

std::string effective_prefix(const lskum_config* cfg, const char* fallback) {
  const std::string prefix = config_string(cfg, "out_prefix");
  return prefix.empty() ? fallback : prefix;
}

int print_validation(lskum_cloud* cloud, bool verbose) {
  lskum_validation report;
  int rc = lskum_cloud_validate(cloud, &report);
  if (rc != LSKUM_OK) return report_error(rc);
  std::printf("points: %d  min stencil: %d  h_ref: %.6g  det_tol: %.6g\n",
              report.n_points, report.min_stencil_size, report.h_ref,
              report.det_tol);
  std::printf("defective stencils: %d  isolated wall points: %d\n",
              report.n_defective, report.n_wall_isolated);
  if (report.n_defective > 0 && verbose) {
    int32_t ids[10];
    int32_t total = 0;
    rc = lskum_cloud_defective_ids(cloud, ids, 10, &total);
    if (rc != LSKUM_OK) return report_error(rc);
    std::printf("first defective ids:");
    for (int32_t i = 0; i < total && i < 10; ++i) std::printf(" %d", ids[i]);
    std::printf("\n");
  }
  return report.n_defective > 0 ? 2 : 0;
}

void print_run_summary(const lskum_result* result) {
  double final_res = 0.0, final_rel = 0.0, total_rdp = 0.0;
  if (lskum_result_iterations(result) > 0) {
    lskum_result_final_residue(result, &final_res);
    lskum_result_final_log10_rel(result, &final_rel);
    std::printf("iterations: %d  final residue: %.6g  log10 rel: %.6g\n",
                lskum_result_iterations(result), final_res, final_rel);
  }
  lskum_result_rdp(result, &total_rdp);
  std::printf("wall seconds: %.6g  rdp: %.6g\n",
              lskum_result_total_seconds(result), total_rdp);
  std::printf("%-24s %12s %12s\n", "kernel", "seconds", "rdp");
  for (int k = 0; k < lskum_result_kernel_count(result); ++k) {
    double sec = 0.0, kr = 0.0;
    lskum_result_kernel_seconds(result, k, &sec);
    lskum_result_kernel_rdp(result, k, &kr);
    std::printf("%-24s %12.6g %12.6g\n", lskum_result_kernel_name(result, k), sec, kr);
  }
}

int cmd_solve(const ConfigFlags& flags) {
  lskum_config* cfg = nullptr;
  lskum_config_create(&cfg);
  int rc = flags.apply(cfg);
  if (rc == LSKUM_OK) rc = lskum_config_validate(cfg);
  if (rc != LSKUM_OK) {
    lskum_config_destroy(cfg);
    return report_error(rc);
  }

  lskum_cloud* cloud = nullptr;
  rc = lskum_cloud_from_config(cfg, &cloud);
  if (rc != LSKUM_OK) {
    lskum_config_destroy(cfg);
    return report_error(rc);
  }

  int code = print_validation(cloud, true);
  lskum_result* result = nullptr;
  if (code == 0) {
    rc = lskum_run(cloud, cfg, &result);
    if (rc != LSKUM_OK) {
      code = report_error(rc);
    } else {
      const std::string prefix = effective_prefix(cfg, "out/solve");
      rc = lskum_result_write_outputs(result, cloud, prefix.c_str());
      if (rc != LSKUM_OK) {
        code = report_error(rc);
      } else {
        print_run_summary(result);
        std::printf("outputs: %s.{residue.csv,solution.dat,bench.csv}\n",
                    prefix.c_str());
      }
    }
  }
  lskum_result_destroy(result);
  lskum_cloud_destroy(cloud);
  lskum_config_destroy(cfg);
  return code;
}

int cmd_bench(const ConfigFlags& flags, const std::string& layouts_csv) {
  std::vector<std::string> layouts;
  for (std::size_t pos = 0; pos < layouts_csv.size();) {
    const std::size_t comma = layouts_csv.find(',', pos);
    const std::size_t end = comma == std::string::npos ? layouts_csv.size() : comma;
    if (end > pos) layouts.push_back(layouts_csv.substr(pos, end - pos));
    pos = end + 1;
  }
  if (layouts.empty()) {
    std::fprintf(stderr, "error (config): --layouts needs at least one layout\n");
    return 1;
  }

  lskum_config* cfg = nullptr;
  lskum_config_create(&cfg);
  int rc = flags.apply(cfg);
  if (rc == LSKUM_OK) rc = lskum_config_validate(cfg);
  if (rc != LSKUM_OK) {
    lskum_config_destroy(cfg);
    return report_error(rc);
  }
  const std::string prefix = effective_prefix(cfg, "out/bench");

  int code = 0;
  std::vector<lskum_cloud*> clouds;
  std::vector<double> rdps;
  for (const std::string& layout : layouts) {
    rc = lskum_config_set(cfg, "layout", layout.c_str());
    if (rc != LSKUM_OK) {
      code = report_error(rc);
      break;
    }
    lskum_cloud* cloud = nullptr;
    rc = lskum_cloud_from_config(cfg, &cloud);
    if (rc != LSKUM_OK) {
      code = report_error(rc);
      break;
    }
    clouds.push_back(cloud);

    lskum_result* result = nullptr;
    rc = lskum_run(cloud, cfg, &result);
    if (rc != LSKUM_OK) {
      code = report_error(rc);
      break;
    }
    const std::string run_prefix =
        layouts.size() > 1 ? prefix + "." + layout : prefix;
    rc = lskum_result_write_outputs(result, cloud, run_prefix.c_str());
    if (rc == LSKUM_OK) {
      double total_rdp = 0.0;
      lskum_result_rdp(result, &total_rdp);
      rdps.push_back(total_rdp);
      std::printf("== layout %s ==\n", layout.c_str());
      print_run_summary(result);
    } else {
      code = report_error(rc);
    }
    lskum_result_destroy(result);
    if (code != 0) break;
  }

  if (code == 0 && clouds.size() > 1) {
    for (std::size_t i = 1; i < clouds.size(); ++i) {
      int equal = 0;
      rc = lskum_cloud_fields_equal(clouds[0], clouds[i], &equal);
      if (rc != LSKUM_OK) {
        code = report_error(rc);
        break;
      }
      std::printf("fields %s vs %s: %s\n", layouts[0].c_str(), layouts[i].c_str(),
                  equal ? "identical" : "DIFFER");
      if (!equal) code = 2;
    }
    for (std::size_t i = 1; i < rdps.size() && code == 0; ++i) {
      double ratio = 0.0;
      if (lskum_relative_performance(rdps[i], rdps[0], &ratio) == LSKUM_OK) {
        std::printf("relative performance %s / %s: %.6g\n", layouts[i].c_str(),
                    layouts[0].c_str(), ratio);
      }
    }
  }

  for (lskum_cloud* cloud : clouds) lskum_cloud_destroy(cloud);
  lskum_config_destroy(cfg);
  return code;
}

int cmd_generate(const ConfigFlags& flags, const std::string& out_path) {
  lskum_config* cfg = nullptr;
  lskum_config_create(&cfg);
  int rc = flags.apply(cfg);
  if (rc != LSKUM_OK) {
    lskum_config_destroy(cfg);
    return report_error(rc);
  }
  lskum_cloud* cloud = nullptr;
  rc = lskum_cloud_from_config(cfg, &cloud);
  lskum_config_destroy(cfg);
  if (rc != LSKUM_OK) return report_error(rc);

  int code = print_validation(cloud, true);
  if (code == 0) {
    rc = lskum_cloud_write_file(cloud, out_path.c_str());
    if (rc != LSKUM_OK) {
      code = report_error(rc);
    } else {
      std::printf("wrote %s (%d points)\n", out_path.c_str(),
                  lskum_cloud_n_points(cloud));
    }
  }
  lskum_cloud_destroy(cloud);
  return code;
}

int cmd_validate(const ConfigFlags& flags) {
  lskum_config* cfg = nullptr;
  lskum_config_create(&cfg);
  int rc = flags.apply(cfg);
  if (rc != LSKUM_OK) {
    lskum_config_destroy(cfg);
    return report_error(rc);
  }
  lskum_cloud* cloud = nullptr;
  rc = lskum_cloud_from_config(cfg, &cloud);
  lskum_config_destroy(cfg);
  if (rc != LSKUM_OK) return report_error(rc);
  const int code = print_validation(cloud, true);
  lskum_cloud_destroy(cloud);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshfree kinetic Euler solver (least-squares upwind scheme)"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run the solver and write outputs");
  ConfigFlags solve_flags;
  solve_flags.attach_grid(solve);
  solve_flags.attach_solver(solve);

  auto* bench = app.add_subcommand("bench", "time the solver under one or more layouts");
  ConfigFlags bench_flags;
  bench_flags.attach_grid(bench);
  bench_flags.attach_solver(bench);
  std::string layouts = "aos,soa";
  bench->add_option("--layouts", layouts, "comma-separated layouts to benchmark");

  auto* generate = app.add_subcommand("generate", "write a generated cloud to a grid file");
  ConfigFlags generate_flags;
  generate_flags.attach_grid(generate);
  std::string generate_out;
  generate->add_option("--out", generate_out, "grid file to write")->required();

  auto* validate = app.add_subcommand("validate", "check stencil health of a cloud");
  ConfigFlags validate_flags;
  validate_flags.attach_grid(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (solve->parsed()) return cmd_solve(solve_flags);
  if (bench->parsed()) return cmd_bench(bench_flags, layouts);
  if (generate->parsed()) return cmd_generate(generate_flags, generate_out);
  if (validate->parsed()) return cmd_validate(validate_flags);
  return 1;
}
