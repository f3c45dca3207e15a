#pragma once

#include <complex>
#include <memory>
#include <random>
#include <utility>
#include <vector>

namespace batchq {

// Service duration law. Provides the distribution function F, the Laplace
// transform f~(s) = E exp(-s eta), and the residual law at elapsed age x,
//   F_x(u) = [F(x+u) - F(x)] / (1 - F(x)),
// together with its transform f~_x and first moments.
//
// Immutable and cheap to copy; safe to share across threads.
class ServiceLaw {
 public:
  enum class Family {
    kExponential,
    kErlang,
    kHyperexponential,
    kDeterministic,
    kEmpirical,
  };

  static ServiceLaw exponential(double rate);
  static ServiceLaw erlang(int shape, double rate);
  static ServiceLaw hyperexponential(std::vector<double> weights,
                                     std::vector<double> rates);
  static ServiceLaw deterministic(double value);
  // Continuous piecewise-linear cdf through the given (t, F) points;
  // t strictly increasing, F nondecreasing from 0 to 1.
  static ServiceLaw empirical(std::vector<std::pair<double, double>> points);

  Family family() const;

  double cdf(double x) const;
  double pdf(double t) const;  // density; unavailable for deterministic
  double lt(double s) const;
  std::complex<double> lt(std::complex<double> s) const;
  double residual_lt(double x, double s) const;
  std::complex<double> residual_lt(double x, std::complex<double> s) const;

  double mean() const;
  double second_moment() const;
  double residual_mean(double x) const;

  double quantile(double p) const;
  double support_end() const;  // +infinity when unbounded
  // Ages inside the support are valid: always for unbounded laws (even when
  // the cdf saturates to 1 in double precision), F(x) < 1 otherwise.
  bool age_valid(double x) const;
  void require_age(double x) const;  // throws std::domain_error otherwise

  double sample(std::mt19937_64& rng) const;
  double sample_residual(double x, std::mt19937_64& rng) const;

  // Residual law decomposed as a mixture of Erlang(shape_j, rate_j)
  // components; defined for the exponential, Erlang and hyperexponential
  // families. Used by the closed-form compound kernels.
  struct ResidualPhases {
    std::vector<double> weights;
    std::vector<int> shapes;
    std::vector<double> rates;
  };
  ResidualPhases residual_phases(double x) const;

  // Integration breakpoints of the density (knots for the empirical law),
  // clipped to [lo, hi]; used to build quadrature panels.
  std::vector<double> density_breakpoints(double lo, double hi) const;

  struct Impl;

 private:
  explicit ServiceLaw(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace batchq
