#pragma once

#include "batchq/model.hpp"

namespace batchq::root {

// Root of theta - lambda = (1 - lambda) f~(s - k(theta)) inside the unit
// disk. The root is real, lies in (lambda, 1], and is the parameter of every
// downward-passage formula. For s > 0 it is strictly below 1; at s = 0 it
// equals 1 when rho <= 1 and lies in (lambda, 1) when rho > 1.
struct RootValue {
  double c = 0.0;
  double s = 0.0;
  double residual = 0.0;  // |c - lambda - (1-lambda) f~(s - k(c))|
  int iterations = 0;
};

struct SolveOptions {
  double tol = 1e-14;        // fixed-point step tolerance
  int max_iter = 100000;     // hard cap before "root stagnation"
  int bisect_after = 1000;   // switch to bracketing bisection this late
};

RootValue solve_c(const QueueModel& model, double s, const SolveOptions& opts = {});

}  // namespace batchq::root
