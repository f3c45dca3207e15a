#pragma once

#include <vector>

#include "batchq/model.hpp"

namespace batchq::compound_poisson {

// Kernels of the compound Poisson arrival stream pi(t): the pmf
// rho_k(t) = P[pi(t) = k], its normalized transform
// rho~_k(s) = s Int exp(-s t) rho_k(t) dt, the occupation measure
// rho_i = Int P[pi(t) = i] dt, and the mixed service-weighted coefficients
// f_k^s(x) = E[exp(-s eta_x); pi(eta_x) = k].
//
// All functions are pure and return the row k = 0..k_max.

// Panjer recursion: rho_0(t) = exp(-mu t),
// rho_k(t) = (mu t / k) sum_{j=1..k} j a_j rho_{k-j}(t).
std::vector<double> pmf_at_t(const QueueModel& model, double t, int k_max);

// rho~_0(s) = s/(s+mu); (s+mu) rho~_k(s) = mu sum_{j=1..k} a_j rho~_{k-j}(s).
// Values lie in (0,1) and sum to 1 over all k.
std::vector<double> lt_row(const QueueModel& model, double s, int k_max);

// rho_i = v_i / mu with the lattice renewal masses v_0 = 1,
// v_i = sum_{j=1..i} a_j v_{i-j}.
std::vector<double> occupation_row(const QueueModel& model, int k_max);

// f_k^s(x) for k = 0..k_max; sum_k f_k^s(x) = f~_x(s). Closed form for the
// exponential / Erlang / hyperexponential / deterministic families, adaptive
// quadrature of Int exp(-s t) rho_k(t) dF_x(t) otherwise.
std::vector<double> mixed_coeffs(const QueueModel& model, double x, double s,
                                 int k_max);

}  // namespace batchq::compound_poisson
