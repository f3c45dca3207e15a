#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "batchq/model.hpp"
#include "batchq/queueing.hpp"

namespace batchq::simulate {

// Exact discrete-event simulation of the queue: batch arrivals at exp(mu)
// epochs with partial rejection (admit min{batch, free}, lose the rest),
// service completions removing min{r, delta} with delta ~ ge(lambda), the
// in-progress service at t = 0 drawn from the residual law at age x. Also
// simulates the free governing process for two-sided exit estimates.

enum class Estimand {
  kBusyPeriod,            // time to empty from (r >= 1, x)
  kFirstLossTime,         // first arrival epoch with a positive loss
  kFirstLossCount,        // number lost at that epoch
  kOccupancyAtT,          // level occupied at time `occupancy_time`
  kTimeAverageOccupancy,  // per-level time fractions over the horizon
  kExitSide,              // free process: exit of [-exit_r, exit_k] downward
};

struct SimConfig {
  SimConfig(QueueModel m, queueing::SystemState init)
      : model(std::move(m)), initial(init) {}

  QueueModel model;
  queueing::SystemState initial;
  double horizon = 1e9;  // safety cap for stopping-time estimands
  int replications = 10000;
  std::uint64_t seed = 1;
  std::vector<Estimand> estimands;
  double occupancy_time = 0.0;     // for kOccupancyAtT
  double burn_in_fraction = 0.1;   // for kTimeAverageOccupancy
  int exit_r = 0, exit_k = 0;      // interval for kExitSide
  int threads = 0;                 // 0 -> hardware concurrency
};

struct SimEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double half_width_99 = 0.0;
  int n = 0;
};

struct SimResult {
  std::map<Estimand, SimEstimate> scalars;
  // Per-level estimates (size B + 2) for the occupancy estimands.
  std::vector<SimEstimate> occupancy_at_t;
  std::vector<SimEstimate> time_average_occupancy;
  // Raw histograms: occupancy level counts at occupancy_time and the
  // first-loss count frequencies (index 0 unused).
  std::vector<long long> occupancy_histogram;
  std::vector<long long> loss_count_histogram;
};

// Deterministic for fixed (config, seed): replication i of estimand group g
// uses an mt19937_64 engine seeded with splitmix64(seed + g * 2^32 + i), and
// results are reduced in replication order regardless of thread count.
SimResult run(const SimConfig& config);

SimEstimate summarize(const std::vector<double>& samples);

}  // namespace batchq::simulate
