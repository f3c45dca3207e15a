#pragma once

#include <vector>

#include "batchq/exit.hpp"

namespace batchq::reflected {

// Characteristics of the process reflected at its supremum: first passage
// below zero (the busy-period engine), increments, ergodic law, and the
// two-sided law of the reflected process.

// a^k(x) = Int V^k(x, dl, s) f~_l(s): the upper-exit transform weighted by
// the service transform at the exit age, computed by adaptive quadrature of
// the exit densities. For delta ~ ge(lambda) it has the closed form
//   f~_x(s) + (1 - f~(s)) S^s_{k-1}(x)
//     - (Q_k^s(x)/E Q^s_{delta+B}) [ f~(s) + (1 - f~(s)) E S^s_{delta+B-1} ],
// which the test suite uses to validate the quadrature path.
double exit_service_weight(const QueueModel& model,
                           const resolvent::Table& x_table,
                           const resolvent::GeomTables& tables, int k,
                           double s, double quad_tol = 1e-8);

// E[e^{-s tau-bar}; T-bar = m] for an explicitly supplied departure pmf
// P[delta = n] = delta_pmf[n-1]: evaluates
//   v-bar_r(x, m) = V_r(x, m, s) + a^{B-r}(x)/(1 - A(0)) *
//     [ P[delta = m+B] + sum_{i=1..B} P[delta = i] V_{B-i}(0, m, s) ],
// with A(0) = sum_{k=1..B} P[delta = k] a^k(0). The exit functionals V are
// those of the model's own governing process; supply a pmf consistent with
// the model's geometric delta (or delta == 1 with lambda == 0) for a
// physically meaningful law.
double passage_general(const QueueModel& model,
                       const std::vector<double>& delta_pmf, double x, int r,
                       int buffer_b, int m, double s, double quad_tol = 1e-8);

// delta ~ ge(lambda) closed form:
//   E e^{-s tau-bar} = [f~_x(s) + (1-f~(s)) S^s_{B-r-1}(x)]
//                      / [f~(s) + (1-f~(s)) E S^s_{delta+B-1}].
double passage_lt(const QueueModel& model, double x, int r, int buffer_b,
                  double s);

// E tau-bar = E eta_x - E eta + E eta [E S_{delta+B-1} - S_{B-r-1}(x)],
// partial sums taken at s = 0.
double passage_mean(const QueueModel& model, double x, int r, int buffer_b);

// P[D-bar^k_0(x, nu_s) <= u]; equals 1 at u = k, and for u < k
//   A_x^u(s) + c^{k-u-1} F(s) (f~_x(s)/(1-f~(s)) + S^s_{k-1}(x)),
// F(s) = s (1-c(s)) / ((1-lambda)(s - k(c(s)))).
double increments(const QueueModel& model, double x, int k, int u, double s);

// Ergodic law of the reflected process (requires rho > 1):
//   p_k(u) = (E kappa / rho) (1-c)/(1 - E c^kappa) c^{k-u-1}, u <= k-1.
double ergodic(const QueueModel& model, int k, int u);

// P[D-bar^k_0(x, nu_s) <= u; tau-bar_{r,k}(x) > nu_s], u in [-r, k], B = k+r.
double two_sided(const QueueModel& model, double x, int r, int k, int u,
                 double s);

}  // namespace batchq::reflected
