#pragma once

#include <complex>
#include <vector>

namespace batchq {

// Law of the arrival batch size: explicit weights a_i = P[batch = i] for
// i = 1..support(). Index 0 carries no mass. Weights must sum to one within
// 1e-12. Parametric families are materialized onto this representation up to
// a support cap (see geometric_batch).
class BatchLaw {
 public:
  // pmf[i] = P[batch = i + 1], i.e. the vector starts at batch size 1.
  explicit BatchLaw(std::vector<double> pmf_from_one);

  static BatchLaw unit();                              // batch == 1 a.s.
  static BatchLaw deterministic(int size);             // batch == size a.s.
  // P[batch = n] proportional to (1-p) p^{n-1}; the mass beyond `cap` is
  // lumped onto `cap` so the weights still sum to one exactly.
  static BatchLaw geometric(double p, int cap = 64);

  int support() const { return static_cast<int>(pmf_.size()); }
  // P[batch = n]; zero outside 1..support().
  double pmf(int n) const {
    return (n >= 1 && n <= support()) ? pmf_[n - 1] : 0.0;
  }
  // P[batch > n], n >= 0.
  double tail(int n) const;
  double mean() const { return mean_; }
  double second_moment() const { return m2_; }

  // E z^batch.
  double pgf(double z) const;
  std::complex<double> pgf(std::complex<double> z) const;
  // E[z^{batch - i}; batch > i], the truncated shifted generating function.
  double shifted_pgf(int i, double z) const;
  // sum_{j>=0} P[batch > j] z^j.
  double tail_pgf(double z) const;

  // n-fold convolution masses (a*^n)(k) for k = 0..k_max, n = 0..n_max.
  // Used by test oracles and the Erlang kernel path.
  std::vector<double> self_convolution(int n, int k_max) const;

 private:
  std::vector<double> pmf_;
  std::vector<double> tail_;  // tail_[n] = P[batch > n], n = 0..support
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace batchq
