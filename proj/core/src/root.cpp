#include "batchq/root.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace batchq::root {

namespace {

// theta -> lambda + (1 - lambda) f~(s - k(theta)); increasing and convex on
// [lambda, 1], so iteration from theta_0 = lambda climbs monotonically to the
// smallest fixed point, which is the root inside the disk.
double step_map(const QueueModel& model, double s, double theta) {
  const double arg = s - model.cumulant(theta);
  return model.lambda() + (1.0 - model.lambda()) * model.service().lt(arg);
}

}  // namespace

RootValue solve_c(const QueueModel& model, double s, const SolveOptions& opts) {
  if (s < 0.0) throw std::invalid_argument("solve_c: s must be >= 0");

  RootValue out;
  out.s = s;

  if (s == 0.0 && model.rho() <= 1.0) {
    // c(0) = 1 when rho <= 1.
    out.c = 1.0;
    out.residual = 0.0;
    return out;
  }

  double theta = model.lambda();
  int n = 0;
  for (; n < opts.bisect_after; ++n) {
    const double next = step_map(model, s, theta);
    const double delta = next - theta;
    theta = next;
    if (std::abs(delta) < opts.tol) {
      out.c = theta;
      out.iterations = n + 1;
      out.residual = std::abs(step_map(model, s, theta) - theta);
      return out;
    }
  }

  // Slow contraction (rho near 1, s near 0): bracket and bisect. g is convex
  // with g(theta) > 0 below the smallest root, so the first sign change in
  // [theta, hi] is the root.
  auto g = [&](double t) { return step_map(model, s, t) - t; };
  double lo = theta;
  double hi = 1.0;
  if (s == 0.0) {
    // theta = 1 is always a root at s = 0; stay strictly to its left.
    hi = 1.0 - 1e-9;
    while (g(hi) > 0.0 && 1.0 - hi > 1e-15) hi = 0.5 * (hi + 1.0);
  }
  if (g(hi) > 0.0) {
    // No sign change reachable: fall back to the iterate (root ~ hi).
    out.c = hi;
    out.iterations = n;
    out.residual = std::abs(g(hi));
    return out;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-16 * (1.0 + hi); ++i, ++n) {
    if (n >= opts.max_iter)
      throw std::runtime_error(
          "root stagnation: s=" + std::to_string(s) +
          " bracket=[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  out.c = 0.5 * (lo + hi);
  out.iterations = n;
  out.residual = std::abs(g(out.c));
  return out;
}

}  // namespace batchq::root
