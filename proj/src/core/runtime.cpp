#include "core/runtime.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>

#include "core/error.hpp"
#include "core/reduce.hpp"

namespace lskum {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

struct WorkerPool::Shared {
  std::mutex m;
  std::condition_variable cv_start;
  std::condition_variable cv_done;
  const std::function<void(int)>* job = nullptr;
  int n_jobs = 0;
  std::int64_t epoch = 0;
  int running = 0;
  bool stop = false;
  std::vector<std::exception_ptr> errors;
};

WorkerPool::WorkerPool(int n_workers)
    : n_workers_(n_workers), shared_(std::make_unique<Shared>()) {
  if (n_workers < 1) {
    throw Error(ErrorCode::argument, "worker count must be >= 1");
  }
  threads_.reserve(n_workers - 1);
  for (int w = 1; w < n_workers; ++w) {
    threads_.emplace_back(&WorkerPool::worker_loop, this, w);
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lk(shared_->m);
    shared_->stop = true;
  }
  shared_->cv_start.notify_all();
  for (std::thread& t : threads_) t.join();
}

void WorkerPool::worker_loop(int worker_id) {
  std::int64_t seen = 0;
  for (;;) {
    std::unique_lock<std::mutex> lk(shared_->m);
    shared_->cv_start.wait(lk, [&] { return shared_->stop || shared_->epoch != seen; });
    if (shared_->stop) return;
    seen = shared_->epoch;
    const std::function<void(int)>* job = shared_->job;
    const int n_jobs = shared_->n_jobs;
    lk.unlock();

    for (int p = worker_id; p < n_jobs; p += n_workers_) {
      try {
        (*job)(p);
      } catch (...) {
        std::lock_guard<std::mutex> g(shared_->m);
        shared_->errors[p] = std::current_exception();
      }
    }

    lk.lock();
    if (--shared_->running == 0) {
      lk.unlock();
      shared_->cv_done.notify_one();
    }
  }
}

void WorkerPool::run(int n_jobs, const std::function<void(int)>& job) {
  if (n_jobs <= 0) return;

  if (threads_.empty()) {
    // Serial path: ascending order on the calling thread, stop at the
    // first failure — the same error the parallel path would report.
    for (int p = 0; p < n_jobs; ++p) job(p);
    return;
  }

  {
    std::lock_guard<std::mutex> lk(shared_->m);
    shared_->job = &job;
    shared_->n_jobs = n_jobs;
    shared_->errors.assign(n_jobs, nullptr);
    shared_->running = static_cast<int>(threads_.size());
    ++shared_->epoch;
  }
  shared_->cv_start.notify_all();

  for (int p = 0; p < n_jobs; p += n_workers_) {
    try {
      job(p);
    } catch (...) {
      std::lock_guard<std::mutex> g(shared_->m);
      shared_->errors[p] = std::current_exception();
    }
  }

  std::unique_lock<std::mutex> lk(shared_->m);
  shared_->cv_done.wait(lk, [&] { return shared_->running == 0; });
  // Report the lowest-index failure regardless of thread interleaving.
  for (const std::exception_ptr& e : shared_->errors) {
    if (e) std::rethrow_exception(e);
  }
}

PhaseExecutor::PhaseExecutor(const Partitioning& parts, WorkerPool& pool)
    : parts_(parts), pool_(pool) {}

void PhaseExecutor::run_phase(const Phase& phase) {
  pool_.run(parts_.n_parts(), [&](int p) {
    phase.fn(std::span<const std::int32_t>(parts_.parts[p].locals));
  });
  exchange_ghosts(*this);
}

void exchange_ghosts(PhaseExecutor& exec) {
  // Shared-memory build: the pool's join already hands freshly written
  // locals to every other partition, so the exchange reduces to that
  // synchronisation point. Counted so tests can assert one exchange per
  // phase per iteration.
  ++exec.exchanges_;
}

PhasePlan build_phase_plan(PointCloud& cloud, const SolverConfig& cfg,
                           const KernelParams& params, std::vector<double>& scratch) {
  PhasePlan plan;
  auto& store = cloud.store();

  plan.phases.push_back({"q_variables", [&cloud, &store, params](auto ids) {
                           q_variables_kernel(cloud, store, ids, params);
                         }});
  if (cfg.order == 2) {
    // Jacobi sweeps: everyone reads the published generation, the publish
    // phase swaps the new one in. With zeroed derivative slots the very
    // first sweep degenerates to the plain (first-order) gradient.
    for (int s = 0; s < cfg.n_inner; ++s) {
      plan.phases.push_back(
          {"q_derivatives", [&cloud, &store, params, &scratch](auto ids) {
             q_derivatives_kernel(cloud, store, ids, params, scratch.data());
           }});
      plan.phases.push_back({"q_derivatives", [&store, &scratch](auto ids) {
                               publish_q_derivatives(store, ids, scratch.data());
                             }});
    }
  }
  if (cfg.residual_mode == ResidualMode::fused) {
    plan.phases.push_back({"flux_residual", [&cloud, &store, params](auto ids) {
                             flux_residual_fused_kernel(cloud, store, ids, params);
                           }});
  } else {
    struct Pass {
      const char* timer;
      Axis axis;
      FluxSign sign;
      bool first;
    };
    static constexpr Pass passes[4] = {
        {"flux_residual_xplus", Axis::x, FluxSign::plus, true},
        {"flux_residual_xminus", Axis::x, FluxSign::minus, false},
        {"flux_residual_yplus", Axis::y, FluxSign::plus, false},
        {"flux_residual_yminus", Axis::y, FluxSign::minus, false},
    };
    for (const Pass& pass : passes) {
      plan.phases.push_back({pass.timer, [&cloud, &store, params, pass](auto ids) {
                               flux_residual_direction_kernel(cloud, store, ids, params,
                                                              pass.axis, pass.sign,
                                                              pass.first);
                             }});
    }
  }
  plan.phases.push_back({"timestep", [&cloud, &store, params](auto ids) {
                           local_timestep_kernel(cloud, store, ids, params);
                         }});
  plan.phases.push_back({"state_update", [&cloud, &store, params](auto ids) {
                           state_update_kernel(cloud, store, ids, params);
                         }});
  return plan;
}

RunResult run_fixed_point(PointCloud& cloud, const SolverConfig& cfg) {
  cfg.validate();
  const std::int32_t n = cloud.n_points();

  const ValidationReport report = validate_cloud(cloud);
  if (report.n_defective > 0) {
    throw Error(ErrorCode::validation,
                "cloud has " + std::to_string(report.n_defective) +
                    " defective stencils (first at point " +
                    std::to_string(report.defective_ids.front()) + ")");
  }

  KernelParams params;
  params.gas = GasModel{cfg.gamma};
  params.cfl = cfg.cfl;
  params.det_tol = report.det_tol;

  const Partitioning parts = partition_cloud(cloud, cfg.n_parts);
  WorkerPool pool(cfg.n_workers);
  PhaseExecutor exec(parts, pool);

  FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < n; ++i) {
    for (int c = 0; c < 4; ++c) {
      store.at(i, slot::qx + c) = 0.0;
      store.at(i, slot::qy + c) = 0.0;
      store.at(i, slot::flux_res + c) = 0.0;
    }
    store.at(i, slot::delta_t) = 0.0;
  }
  std::vector<double> scratch(static_cast<std::size_t>(n) * 8, 0.0);
  const PhasePlan plan = build_phase_plan(cloud, cfg, params, scratch);

  RunResult result;
  auto timer_bucket = [&result](const std::string& name) -> double& {
    for (KernelTiming& k : result.kernels) {
      if (k.name == name) return k.seconds;
    }
    result.kernels.push_back({name, 0.0});
    return result.kernels.back().seconds;
  };

  const auto t_run = Clock::now();
  for (int it = 0; it < cfg.iters; ++it) {
    const auto t_iter = Clock::now();
    for (const Phase& phase : plan.phases) {
      const auto t0 = Clock::now();
      try {
        exec.run_phase(phase);
      } catch (const Error& e) {
        throw Error(e.code(),
                    "iteration " + std::to_string(it + 1) + ": " + e.what());
      }
      timer_bucket(phase.timer) += seconds_since(t0);
    }

    const auto t0 = Clock::now();
    const double sum = deterministic_reduce(0, n, [&store](std::int64_t i) {
      const double d = mass_update_magnitude(store, static_cast<std::int32_t>(i));
      return d * d;
    });
    const double res = std::sqrt(sum) / n;
    timer_bucket("residue") += seconds_since(t0);

    if (!std::isfinite(res)) {
      throw Error(ErrorCode::positivity,
                  "solver diverged at iteration " + std::to_string(it + 1) +
                      " (non-finite residue)");
    }
    result.history.residue.push_back(res);
    const double first = result.history.residue.front();
    const double rel =
        (first > 0.0 && res > 0.0) ? std::log10(res / first) : 0.0;
    result.history.log10_rel.push_back(rel);
    result.history.wall_ms.push_back(seconds_since(t_iter) * 1e3);
  }
  result.total_seconds = seconds_since(t_run);
  result.iterations = cfg.iters;
  result.ghost_exchanges = exec.ghost_exchanges();
  return result;
}

}  // namespace lskum
