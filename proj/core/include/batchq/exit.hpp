#pragma once

#include "batchq/resolvent.hpp"

namespace batchq::exit_problem {

// One-boundary and two-sided exit laws of the governing process from the
// interval [-r, k], B = r + k, started at level 0 with service age x.

// Joint transform of the lower passage {tau_k(x), T_k(x)}:
//   f_k(x, m, s) = f~_x(s - k(c(s))) c(s)^k (1-lambda) lambda^{m-1}.
double lower_passage(const QueueModel& model, double x, int k, int m, double s);

// E exp(-s tau^k(x)), the upper-crossing transform,
//   1 - (s / (s - k(c(s)))) Q_k^s(x)/(1-lambda) - A_x^k(s).
double upper_passage_lt(const QueueModel& model, double x, int k, double s);
double upper_passage_lt(const QueueModel& model, const resolvent::Table& table,
                        int k);

// Density in l of the joint law f^k(x, dl, m, s) of
// {tau^k(x), eta^k(x), T^k(x)}. The Phi series is evaluated in its factored
// closed form mu e^{l k(c)} U_m(c) with U_m(c) = sum_j a_{m+j} c^j.
double upper_passage_density(const QueueModel& model, double x, int k,
                             double l, int m, double s);
// Same density summed over the overshoot m.
double upper_passage_density_msum(const QueueModel& model, double x, int k,
                                  double l, double s);

// Efficient variants against a prebuilt table (table.x must equal x).
double upper_passage_density(const QueueModel& model,
                             const resolvent::Table& table, int k, double l,
                             int m, double s);
double upper_passage_density_msum(const QueueModel& model,
                                  const resolvent::Table& table, int k,
                                  double l, double s);

// Geometric-weight mixture E f^{delta+B}(0, dl, m, s) (and its m-sum),
// needed by the two-sided densities and the reflected passage quadrature.
double expected_upper_density(const QueueModel& model,
                              const resolvent::GeomTables& tables, double l,
                              int m, double s);
double expected_upper_density_msum(const QueueModel& model,
                                   const resolvent::GeomTables& tables,
                                   double l, double s);

// Two-sided exit law of {chi, L, T} from [-r, k].
struct ExitLaw {
  double lower_lt = 0.0;    // E[e^{-s chi}; exit through -r]
  double upper_lt = 0.0;    // E[e^{-s chi}; exit through k]
  double lower_prob = 0.0;  // P[exit through -r] (s = 0 law)
  double upper_prob = 0.0;
  double lambda = 0.0;
  // Overshoot through the lower boundary is exactly ge(lambda):
  // V_r(x, m, s) = lower_lt (1-lambda) lambda^{m-1}.
  double lower_overshoot_lt(int m) const;
};

ExitLaw two_sided(const QueueModel& model, double x, int r, int k, double s);

// Density in l of V^k(x, dl, m, s) (upper-exit side of the two-sided law).
double two_sided_upper_density(const QueueModel& model,
                               const resolvent::GeomTables& tables, int k,
                               double l, int m, double s);
double two_sided_upper_density_msum(const QueueModel& model,
                                    const resolvent::GeomTables& tables, int k,
                                    double l, double s);

// Per-node bundle for quadrature over l: the m-summed upper-passage
// densities f^k(x, l, s) for every k = 0..k_cap (from `x_table`) together
// with the m-summed E f^{delta+B}(0, l, s) series. Shares the expensive
// kernel convolutions across k.
struct UpperDensityNode {
  double expected = 0.0;    // E f^{delta+B}(0, dl, s)/dl, m-summed
  std::vector<double> fk;   // f^k(x, dl, s)/dl, k = 0..k_cap
};
UpperDensityNode upper_density_node(const QueueModel& model,
                                    const resolvent::Table& x_table,
                                    const resolvent::GeomTables& tables,
                                    int k_cap, double l, double s);

// P[D_x(nu_s) <= u, D_x^+(nu_s) <= k] =
//   A_x^u(s) + (s (1-lambda)^{-1} / (s - k(c))) c^{k-u} Q_k^s(x).
double sup_joint(const QueueModel& model, double x, int k, int u, double s);

// Trivariate law P[-r <= inf, D_x(nu_s) <= u, sup <= k]:
//   A_x^u(s) - (Q_k^s(x)/E Q^s_{delta+B}) E A_0^{delta+r+u}(s).
double trivariate(const QueueModel& model, double x, int r, int k, int u,
                  double s);
double trivariate(const QueueModel& model, const resolvent::GeomTables& tables,
                  int r, int k, int u);

}  // namespace batchq::exit_problem
