#include "batchq/batch_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace batchq {

BatchLaw::BatchLaw(std::vector<double> pmf_from_one) : pmf_(std::move(pmf_from_one)) {
  if (pmf_.empty()) throw std::invalid_argument("batch pmf is empty");
  double total = 0.0;
  for (double w : pmf_) {
    if (!(w >= 0.0)) throw std::invalid_argument("batch pmf has negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("batch pmf not normalized");
  while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();

  tail_.assign(pmf_.size() + 1, 0.0);
  for (int n = static_cast<int>(pmf_.size()) - 1; n >= 0; --n)
    tail_[n] = tail_[n + 1] + pmf_[n];
  for (size_t i = 0; i < pmf_.size(); ++i) {
    mean_ += (i + 1.0) * pmf_[i];
    m2_ += (i + 1.0) * (i + 1.0) * pmf_[i];
  }
}

BatchLaw BatchLaw::unit() { return BatchLaw({1.0}); }

BatchLaw BatchLaw::deterministic(int size) {
  if (size < 1) throw std::invalid_argument("batch size must be >= 1");
  std::vector<double> w(size, 0.0);
  w[size - 1] = 1.0;
  return BatchLaw(std::move(w));
}

BatchLaw BatchLaw::geometric(double p, int cap) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("geometric p in [0,1)");
  if (cap < 1) throw std::invalid_argument("geometric cap must be >= 1");
  std::vector<double> w(cap, 0.0);
  double tail = 1.0;  // P[batch >= n]
  for (int n = 1; n < cap; ++n) {
    w[n - 1] = tail * (1.0 - p);
    tail *= p;
  }
  w[cap - 1] = tail;
  return BatchLaw(std::move(w));
}

double BatchLaw::tail(int n) const {
  if (n < 0) return 1.0;
  if (n >= static_cast<int>(tail_.size())) return 0.0;
  return tail_[n];
}

double BatchLaw::pgf(double z) const {
  double acc = 0.0;
  for (int i = support(); i >= 1; --i) acc = (acc + pmf_[i - 1]) * z;
  return acc;
}

std::complex<double> BatchLaw::pgf(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (int i = support(); i >= 1; --i) acc = (acc + pmf_[i - 1]) * z;
  return acc;
}

double BatchLaw::shifted_pgf(int i, double z) const {
  // E[z^{batch-i}; batch > i] = sum_{j > i} a_j z^{j-i}
  double acc = 0.0;
  for (int j = support(); j > i; --j) acc = (acc + pmf(j)) * z;
  return acc;
}

double BatchLaw::tail_pgf(double z) const {
  double acc = 0.0;
  for (int n = support() - 1; n >= 0; --n) acc = acc * z + tail_[n];
  return acc;
}

std::vector<double> BatchLaw::self_convolution(int n, int k_max) const {
  std::vector<double> cur(k_max + 1, 0.0), next(k_max + 1, 0.0);
  cur[0] = 1.0;
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int k = 0; k <= k_max; ++k) {
      if (cur[k] == 0.0) continue;
      for (int j = 1; j <= support() && k + j <= k_max; ++j)
        next[k + j] += cur[k] * pmf_[j - 1];
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace batchq
