#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "batchq/reflected.hpp"

namespace batchq::queueing {

// State of the M^x|G^d|1|B system: r occupied places (0..B+1) and the
// elapsed age x of the running service; the empty-and-idle state is (0, 0).
struct SystemState {
  int r = 0;
  double x = 0.0;
};

// Transient law at one level u. The raw transform q^s(u) for u >= 1
// excludes occupancy of level 0 at time nu_s (its complement identity is
// q^s(0) + q^s(B+1) = 1), so the honest distribution function is
// cdf = q^s(0) + q^s(u); both are exposed.
struct TransientValue {
  int u = 0;
  double raw = 0.0;  // q^s_{r,x}(u) as displayed
  double cdf = 0.0;  // P[d(nu_s) <= u]
};

// Analytic interface to busy periods, first-loss laws, and customer counts.
// Immutable apart from a read-mostly per-s cache of age-0 resolvent data
// (single-writer initialization, shared readers).
class System {
 public:
  explicit System(QueueModel model);

  const QueueModel& model() const { return model_; }

  // Busy period of type (r, x), r in 1..B+1:
  //   b_r^s(x) = [f~_x(s) + (1-f~(s)) S^s_{B-r}(x)]
  //              / [f~(s) + (1-f~(s)) E S^s_{delta+B-1}].
  double busy_period_lt(const SystemState& state, double s) const;
  // E b_r(x) = E eta_x - E eta + E eta [E S_{delta+B-1} - S_{B-r}(x)].
  double busy_period_mean(const SystemState& state) const;

  // Laplace transform of the time of the first loss from state (r, x)
  // (r = 0 selects the empty-and-idle branch).
  double first_loss_lt(const SystemState& state, double s) const;
  // -d/ds at s = `s_fd` by central differences.
  double first_loss_mean(const SystemState& state, double s_fd = 1e-6) const;

  // Joint transform E[e^{-s l_r(x)} z^{lost}] of the first-loss time and the
  // number lost at that epoch; available for unit departures (lambda = 0)
  // only, where the closed form exists.
  double first_loss_joint_pgf(const SystemState& state, double s,
                              double z) const;
  // Coefficient at z^n: E[e^{-s l_r(x)}; lost = n].
  double first_loss_count_coeff(const SystemState& state, double s,
                                int n) const;
  // P[lost = n] via the Abelian limit at small s.
  std::vector<double> first_loss_count_pmf(const SystemState& state, int n_max,
                                           double s = 1e-8) const;

  // Transient customer counts at the exponential time nu_s.
  TransientValue transient(const SystemState& state, int u, double s) const;
  // All levels 0..B+1 at once (shares the per-s tables).
  std::vector<TransientValue> transient_row(const SystemState& state,
                                            double s) const;

  // Stationary distribution pi_0..pi_{B+1}.
  std::vector<double> stationary() const;

 private:
  struct SData;  // per-s age-0 tables and derived scalars
  std::shared_ptr<const SData> sdata(double s) const;
  TransientValue transient_with_table(const SData& data,
                                      const resolvent::Table& x_table,
                                      const SystemState& state, int u,
                                      double s) const;

  QueueModel model_;
  mutable std::shared_mutex cache_mu_;
  mutable std::map<double, std::shared_ptr<const SData>> cache_;
};

}  // namespace batchq::queueing
