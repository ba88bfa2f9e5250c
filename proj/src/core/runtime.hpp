#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "core/cloud.hpp"
#include "core/config.hpp"
#include "core/kernels.hpp"
#include "core/partition.hpp"

namespace lskum {

// One parallel step of an iteration. The runtime calls `fn` once per
// partition with that partition's local ids; writes must stay inside those
// ids. A ghost exchange (barrier) separates consecutive phases.
struct Phase {
  std::string timer;  // kernel bucket this phase's wall time accrues to
  std::function<void(std::span<const std::int32_t> locals)> fn;
};

struct PhasePlan {
  std::vector<Phase> phases;
};

struct ConvergenceHistory {
  std::vector<double> residue;
  std::vector<double> log10_rel;
  std::vector<double> wall_ms;
};

struct KernelTiming {
  std::string name;
  double seconds = 0.0;
};

struct RunResult {
  int iterations = 0;
  ConvergenceHistory history;
  std::vector<KernelTiming> kernels;  // in first-use order
  double total_seconds = 0.0;
  std::int64_t ghost_exchanges = 0;
};

class WorkerPool {
 public:
  explicit WorkerPool(int n_workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // Runs job(p) for p in [0, n_jobs); partition p is handled by worker
  // p % n_workers, the calling thread acting as worker 0. Blocks until all
  // jobs finish, then rethrows the lowest-index captured exception.
  void run(int n_jobs, const std::function<void(int)>& job);

  int n_workers() const { return n_workers_; }

 private:
  struct Shared;
  void worker_loop(int worker_id);

  int n_workers_;
  std::unique_ptr<Shared> shared_;
  std::vector<std::thread> threads_;
};

// Executes phases over a fixed partitioning. In this shared-memory build
// the ghost "exchange" between phases is a synchronisation point, not a
// copy: locals written before the barrier are what neighbouring partitions
// read after it. The exchange counter lets tests pin that contract down.
class PhaseExecutor {
 public:
  PhaseExecutor(const Partitioning& parts, WorkerPool& pool);

  void run_phase(const Phase& phase);
  std::int64_t ghost_exchanges() const { return exchanges_; }

 private:
  const Partitioning& parts_;
  WorkerPool& pool_;
  std::int64_t exchanges_ = 0;

  friend void exchange_ghosts(PhaseExecutor&);
};

void exchange_ghosts(PhaseExecutor& exec);

// Builds the per-iteration phase sequence for the configured scheme:
// q_variables; n_inner Jacobi sweeps of the q-derivative system (skipped
// for order 1); the residual passes (one fused phase or four directional
// ones); timestep; state update.
PhasePlan build_phase_plan(PointCloud& cloud, const SolverConfig& cfg,
                           const KernelParams& params, std::vector<double>& scratch);

// Pseudo-time fixed-point driver. Expects primitive fields initialised in
// the cloud's store; advances cfg.iters iterations and records the
// convergence history plus per-kernel wall time.
RunResult run_fixed_point(PointCloud& cloud, const SolverConfig& cfg);

}  // namespace lskum
