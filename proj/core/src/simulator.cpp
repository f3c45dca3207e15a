#include "batchq/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace batchq::simulate {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

int sample_batch(const BatchLaw& law, std::mt19937_64& rng) {
  double u = u01(rng);
  for (int n = 1; n < law.support(); ++n) {
    const double p = law.pmf(n);
    if (u < p) return n;
    u -= p;
  }
  return law.support();
}

int sample_departure(double lambda, std::mt19937_64& rng) {
  if (lambda == 0.0) return 1;
  return 1 + static_cast<int>(std::log(u01(rng)) / std::log(lambda));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// One queue path; collects whichever outputs the caller needs.
struct QueuePath {
  double busy_period = kInf;
  double first_loss_time = kInf;
  int first_loss_count = 0;
  int level_at_t = -1;
  std::vector<double> level_time;  // per-level occupation after burn-in
};

enum PathMode { kStopAtEmpty, kStopAtLoss, kRunHorizon };

QueuePath run_queue_path(const QueueModel& model,
                         const queueing::SystemState& initial, PathMode mode,
                         double horizon, double occupancy_time,
                         double burn_start, std::mt19937_64& rng) {
  const int cap = model.buffer() + 1;
  QueuePath out;
  if (mode == kRunHorizon) out.level_time.assign(cap + 1, 0.0);

  int r = initial.r;
  double t = 0.0;
  double next_completion =
      (r >= 1) ? model.service().sample_residual(initial.x, rng) : kInf;
  double next_arrival = -std::log(u01(rng)) / model.mu();
  bool recorded_level = false;

  while (t < horizon) {
    const double te = std::min(next_arrival, next_completion);
    assert(r >= 0 && r <= cap);
    assert(r >= 1 || next_completion == kInf);

    if (!recorded_level && occupancy_time >= 0.0 && te > occupancy_time) {
      out.level_at_t = r;
      recorded_level = true;
    }
    if (mode == kRunHorizon) {
      const double a = std::max(t, burn_start);
      const double b = std::min(te, horizon);
      if (b > a) out.level_time[r] += b - a;
    }
    if (te >= horizon) break;

    if (next_arrival <= next_completion) {
      t = next_arrival;
      const int batch = sample_batch(model.batch(), rng);
      const int free = cap - r;
      const int admitted = std::min(batch, free);
      const int lost = batch - admitted;
      if (r == 0 && admitted > 0)
        next_completion = t + model.service().sample(rng);
      r += admitted;
      if (lost > 0 && out.first_loss_time == kInf) {
        out.first_loss_time = t;
        out.first_loss_count = lost;
        if (mode == kStopAtLoss) break;
      }
      next_arrival = t - std::log(u01(rng)) / model.mu();
    } else {
      t = next_completion;
      const int dep = sample_departure(model.lambda(), rng);
      r -= std::min(r, dep);
      if (r > 0) {
        next_completion = t + model.service().sample(rng);
      } else {
        next_completion = kInf;
        if (mode == kStopAtEmpty) {
          out.busy_period = t;
          break;
        }
      }
    }
  }
  return out;
}

// Free governing process D_x(t) on [-r, k]: returns +1 for a lower exit,
// 0 for an upper exit.
int run_exit_path(const QueueModel& model, double x, int r, int k,
                  double horizon, std::mt19937_64& rng) {
  int d = 0;
  double t = 0.0;
  double next_renewal = model.service().sample_residual(x, rng);
  double next_arrival = -std::log(u01(rng)) / model.mu();
  while (t < horizon) {
    if (next_arrival <= next_renewal) {
      t = next_arrival;
      d += sample_batch(model.batch(), rng);
      if (d > k) return 0;
      next_arrival = t - std::log(u01(rng)) / model.mu();
    } else {
      t = next_renewal;
      d -= sample_departure(model.lambda(), rng);
      if (d < -r) return 1;
      next_renewal = t + model.service().sample(rng);
    }
  }
  throw std::runtime_error("exit path exceeded the simulation horizon");
}

template <typename Fn>
void parallel_reps(int reps, int threads, const Fn& body) {
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, reps));
  if (n_threads == 1) {
    for (int i = 0; i < reps; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < reps; i += n_threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool wants(const SimConfig& c, Estimand e) {
  return std::find(c.estimands.begin(), c.estimands.end(), e) !=
         c.estimands.end();
}

}  // namespace

SimEstimate summarize(const std::vector<double>& samples) {
  SimEstimate est;
  est.n = static_cast<int>(samples.size());
  if (est.n == 0) return est;
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= est.n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var = (est.n > 1) ? var / (est.n - 1) : 0.0;
  est.mean = mean;
  est.variance = var;
  // z_{0.995}: two-sided 99% normal interval from replication-level samples.
  est.half_width_99 = 2.5758293035489004 * std::sqrt(var / est.n);
  return est;
}

SimResult run(const SimConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (!(config.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (config.estimands.empty())
    throw std::invalid_argument("no estimands requested");

  const QueueModel& model = config.model;
  const int levels = model.buffer() + 2;
  model.service().require_age(config.initial.x);
  const bool queue_estimands =
      wants(config, Estimand::kBusyPeriod) ||
      wants(config, Estimand::kFirstLossTime) ||
      wants(config, Estimand::kFirstLossCount) ||
      wants(config, Estimand::kOccupancyAtT) ||
      wants(config, Estimand::kTimeAverageOccupancy);
  if (queue_estimands) {
    if (config.initial.r < 0 || config.initial.r > model.buffer() + 1)
      throw std::invalid_argument("initial.r must lie in 0..B+1");
    if (config.initial.r == 0 && config.initial.x != 0.0)
      throw std::invalid_argument("initial state (0, x) requires x == 0");
  }
  SimResult result;

  auto stream = [&](int group, int rep) {
    return std::mt19937_64(splitmix64(
        config.seed + (static_cast<std::uint64_t>(group) << 32) +
        static_cast<std::uint64_t>(rep)));
  };

  // Group 0: busy period.
  if (wants(config, Estimand::kBusyPeriod)) {
    if (config.initial.r < 1)
      throw std::invalid_argument("busy period needs initial r >= 1");
    std::vector<double> samples(config.replications);
    parallel_reps(config.replications, config.threads, [&](int i) {
      std::mt19937_64 rng = stream(0, i);
      const QueuePath p = run_queue_path(model, config.initial, kStopAtEmpty,
                                         config.horizon, -1.0, 0.0, rng);
      samples[i] = p.busy_period;
    });
    result.scalars[Estimand::kBusyPeriod] = summarize(samples);
  }

  // Group 1: first loss (time and count share paths).
  if (wants(config, Estimand::kFirstLossTime) ||
      wants(config, Estimand::kFirstLossCount)) {
    std::vector<double> times(config.replications);
    std::vector<double> counts(config.replications);
    parallel_reps(config.replications, config.threads, [&](int i) {
      std::mt19937_64 rng = stream(1, i);
      const QueuePath p = run_queue_path(model, config.initial, kStopAtLoss,
                                         config.horizon, -1.0, 0.0, rng);
      times[i] = p.first_loss_time;
      counts[i] = p.first_loss_count;
    });
    result.scalars[Estimand::kFirstLossTime] = summarize(times);
    result.scalars[Estimand::kFirstLossCount] = summarize(counts);
    int max_lost = 0;
    for (double c : counts) max_lost = std::max(max_lost, static_cast<int>(c));
    result.loss_count_histogram.assign(max_lost + 1, 0);
    for (double c : counts) ++result.loss_count_histogram[static_cast<int>(c)];
  }

  // Group 2: occupancy snapshots and time averages share horizon paths.
  if (wants(config, Estimand::kOccupancyAtT) ||
      wants(config, Estimand::kTimeAverageOccupancy)) {
    const bool want_avg = wants(config, Estimand::kTimeAverageOccupancy);
    const double occ_t =
        wants(config, Estimand::kOccupancyAtT)
            ? (config.occupancy_time > 0.0 ? config.occupancy_time
                                           : config.horizon)
            : -1.0;
    if (occ_t > config.horizon)
      throw std::invalid_argument("occupancy_time must lie within the horizon");
    std::vector<int> at_t(config.replications, -1);
    std::vector<std::vector<double>> fractions(config.replications);
    parallel_reps(config.replications, config.threads, [&](int i) {
      std::mt19937_64 rng = stream(2, i);
      const double burn = config.burn_in_fraction * config.horizon;
      const QueuePath p =
          run_queue_path(model, config.initial, kRunHorizon, config.horizon,
                         occ_t, burn, rng);
      at_t[i] = p.level_at_t;
      if (want_avg) {
        std::vector<double> f(levels, 0.0);
        const double span = config.horizon - burn;
        for (int l = 0; l < levels; ++l) f[l] = p.level_time[l] / span;
        fractions[i] = std::move(f);
      }
    });
    if (occ_t >= 0.0) {
      result.occupancy_histogram.assign(levels, 0);
      result.occupancy_at_t.resize(levels);
      for (int l = 0; l < levels; ++l) {
        std::vector<double> ind(config.replications);
        for (int i = 0; i < config.replications; ++i)
          ind[i] = (at_t[i] == l) ? 1.0 : 0.0;
        result.occupancy_at_t[l] = summarize(ind);
      }
      for (int v : at_t)
        if (v >= 0) ++result.occupancy_histogram[v];
    }
    if (want_avg) {
      result.time_average_occupancy.resize(levels);
      for (int l = 0; l < levels; ++l) {
        std::vector<double> per(config.replications);
        for (int i = 0; i < config.replications; ++i) per[i] = fractions[i][l];
        result.time_average_occupancy[l] = summarize(per);
      }
    }
  }

  // Group 3: two-sided exit of the free process.
  if (wants(config, Estimand::kExitSide)) {
    std::vector<double> lower(config.replications);
    parallel_reps(config.replications, config.threads, [&](int i) {
      std::mt19937_64 rng = stream(3, i);
      lower[i] = run_exit_path(model, config.initial.x, config.exit_r,
                               config.exit_k, config.horizon, rng);
    });
    result.scalars[Estimand::kExitSide] = summarize(lower);
  }

  return result;
}

}  // namespace batchq::simulate
