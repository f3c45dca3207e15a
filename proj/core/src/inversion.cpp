#include "batchq/inversion.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace batchq::inversion {

namespace {

using Dec50 = boost::multiprecision::cpp_dec_float_50;
using Dec100 = boost::multiprecision::cpp_dec_float_100;

template <typename Dec>
std::vector<Dec> stehfest_weights(int n) {
  // V_k = (-1)^{n/2+k} sum_j j^{n/2} (2j)! /
  //       [(n/2-j)! j! (j-1)! (k-j)! (2j-k)!],
  // j = floor((k+1)/2) .. min(k, n/2). Factorials are exact in the working
  // precision for every supported order.
  const int half = n / 2;
  std::vector<Dec> fact(2 * half + 1);
  fact[0] = 1;
  for (int i = 1; i <= 2 * half; ++i) fact[i] = fact[i - 1] * i;

  std::vector<Dec> v(n + 1);
  for (int k = 1; k <= n; ++k) {
    Dec acc = 0;
    const int j_lo = (k + 1) / 2;
    const int j_hi = std::min(k, half);
    for (int j = j_lo; j <= j_hi; ++j) {
      Dec term = boost::multiprecision::pow(Dec(j), half) * fact[2 * j];
      term /= fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] *
              fact[2 * j - k];
      acc += term;
    }
    v[k] = ((half + k) % 2 == 0) ? acc : -acc;
  }
  return v;
}

template <typename Dec>
double combine(const std::vector<long double>& samples, int order, double t) {
  const std::vector<Dec> w = stehfest_weights<Dec>(order);
  const Dec ln2 = boost::multiprecision::log(Dec(2));
  Dec acc = 0;
  for (int k = 1; k <= order; ++k)
    acc += w[k] * Dec(static_cast<double>(samples[k - 1])) +
           w[k] * Dec(static_cast<double>(
                     samples[k - 1] -
                     static_cast<long double>(
                         static_cast<double>(samples[k - 1]))));
  acc *= ln2 / Dec(t);
  return acc.template convert_to<double>();
}

}  // namespace

InversionResult invert(const InversionRequest& request) {
  const int order = request.order;
  if (order < 6 || order > 24 || order % 2 != 0)
    throw std::invalid_argument("inversion order must be even and in 6..24");
  if (!(request.t > 0.0))
    throw std::invalid_argument("inversion time must be > 0");
  if (!request.transform && !request.transform_ld)
    throw std::invalid_argument("inversion transform is empty");
  const int precision =
      request.precision > 0
          ? request.precision
          : std::max(32, static_cast<int>(std::ceil(2.2 * order)));

  const long double ln2 = std::log(2.0L);
  std::vector<long double> samples(order);
  for (int k = 1; k <= order; ++k) {
    const long double s = k * ln2 / static_cast<long double>(request.t);
    const long double value =
        request.transform_ld ? request.transform_ld(s)
                             : static_cast<long double>(
                                   request.transform(static_cast<double>(s)));
    if (!std::isfinite(static_cast<double>(value)))
      throw std::runtime_error("transform evaluation failed at s = " +
                               std::to_string(static_cast<double>(s)));
    samples[k - 1] = value;
  }

  InversionResult out;
  if (precision <= 50) {
    out.value = combine<Dec50>(samples, order, request.t);
    out.error_estimate =
        std::abs(out.value - combine<Dec50>(samples, order - 2, request.t));
  } else {
    out.value = combine<Dec100>(samples, order, request.t);
    out.error_estimate =
        std::abs(out.value - combine<Dec100>(samples, order - 2, request.t));
  }
  return out;
}

InversionResult invert_cdf_transform(
    const std::function<double(double)>& exponential_time_law, double t,
    int order) {
  InversionRequest req;
  req.transform = [&](double s) { return exponential_time_law(s) / s; };
  req.t = t;
  req.order = order;
  return invert(req);
}

}  // namespace batchq::inversion
