#pragma once

#include <functional>

namespace batchq::inversion {

// Gaver-Stehfest inversion of a Laplace transform from real-axis samples
// F(k ln2 / t), k = 1..order. Real-axis-only by design: the root c(s) that
// underlies every transform in this library is established for real s > 0
// only. The alternating weights grow like 10^{0.45 order}, so the
// combination is accumulated in multiprecision decimal arithmetic; the
// samples themselves are double precision, which bounds the attainable
// accuracy at roughly 10^{0.45 order - 16}.
struct InversionRequest {
  std::function<double(double)> transform;  // s -> F(s), finite for s > 0
  double t = 1.0;                           // target time, > 0
  int order = 14;                           // even, 6..24
  int precision = 0;  // working decimal digits; 0 -> max(32, 2.2 * order)
  // Optional extended-precision evaluator. When set it supplies the samples
  // instead of `transform`, lowering the rounding floor of the weight
  // combination from ~1e-8 to ~1e-11; transforms that only exist in double
  // precision leave it empty.
  std::function<long double(long double)> transform_ld;
};

struct InversionResult {
  double value = 0.0;
  // |result(order) - result(order-2)|; an estimate, not a bound. Callers
  // flag (not fail) when it exceeds their tolerance.
  double error_estimate = 0.0;
};

InversionResult invert(const InversionRequest& request);

// Convenience wrapper for distribution functions: inverts s -> q(s)/s where
// q(s) = P[X(nu_s) in A] = s Int e^{-st} P[X(t) in A] dt is the law at an
// independent exponential time.
InversionResult invert_cdf_transform(
    const std::function<double(double)>& exponential_time_law, double t,
    int order = 14);

}  // namespace batchq::inversion
