#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchq/compound_poisson.hpp"
#include "batchq/quadrature.hpp"

using namespace batchq;
namespace cp = batchq::compound_poisson;

namespace {

// Brute-force oracle: rho_k(t) = sum_n e^{-mu t}(mu t)^n/n! (a*^n)(k).
double convolution_oracle(const QueueModel& m, double t, int k, int n_cap) {
  double acc = 0.0;
  double pois = std::exp(-m.mu() * t);
  for (int n = 0; n <= n_cap; ++n) {
    if (n > 0) pois *= m.mu() * t / n;
    acc += pois * m.batch().self_convolution(n, k)[k];
  }
  return acc;
}

}  // namespace

TEST_CASE("pmf row basics") {
  const QueueModel m(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::exponential(1.0), 0.0, 1);
  const std::vector<double> at0 = cp::pmf_at_t(m, 0.0, 4);
  CHECK(at0[0] == 1.0);
  for (int k = 1; k <= 4; ++k) CHECK(at0[k] == 0.0);
  CHECK_THROWS_AS(cp::pmf_at_t(m, -1.0, 4), std::invalid_argument);

  // unit batches: plain Poisson
  const QueueModel simple(1.7, BatchLaw::unit(), ServiceLaw::exponential(1.0), 0.0, 1);
  const double t = 0.9;
  const std::vector<double> row = cp::pmf_at_t(simple, t, 8);
  double factorial = 1.0;
  for (int k = 0; k <= 8; ++k) {
    if (k > 0) factorial *= k;
    CHECK(row[k] == doctest::Approx(std::exp(-1.7 * t) *
                                    std::pow(1.7 * t, k) / factorial)
                        .epsilon(1e-12));
  }

  // frozen value from the convolution oracle (n <= 40):
  // kappa ~ {1:.5, 2:.5}, mu = 1, t = 1, k = 2.
  const std::vector<double> mix = cp::pmf_at_t(m, 1.0, 2);
  CHECK(mix[2] == doctest::Approx(0.22992465073215145).epsilon(1e-12));
}

TEST_CASE("Panjer vs convolution oracle across batch laws") {
  const std::vector<BatchLaw> laws = {BatchLaw::unit(), BatchLaw({0.5, 0.5}),
                                      BatchLaw({0.3, 0.0, 0.45, 0.25})};
  for (const BatchLaw& a : laws) {
    const QueueModel m(1.3, a, ServiceLaw::exponential(1.0), 0.0, 1);
    for (double t : {0.4, 1.7}) {
      const std::vector<double> row = cp::pmf_at_t(m, t, 20);
      for (int k = 0; k <= 20; ++k)
        CHECK(row[k] ==
              doctest::Approx(convolution_oracle(m, t, k, 40)).epsilon(1e-10));
    }
  }
}

TEST_CASE("transform row") {
  const QueueModel m(1.4, BatchLaw({0.6, 0.4}), ServiceLaw::exponential(1.0), 0.0, 1);
  const double s = 0.8;
  const std::vector<double> row = cp::lt_row(m, s, 200);
  CHECK(row[0] == doctest::Approx(s / (s + 1.4)).epsilon(1e-14));
  CHECK_THROWS_AS(cp::lt_row(m, 0.0, 4), std::invalid_argument);

  // unit batches: geometric expansion of s/(s + mu - mu theta)
  const QueueModel simple(2.0, BatchLaw::unit(), ServiceLaw::exponential(1.0), 0.0, 1);
  const std::vector<double> geo = cp::lt_row(simple, s, 12);
  for (int k = 0; k <= 12; ++k)
    CHECK(geo[k] == doctest::Approx(s * std::pow(2.0, k) /
                                    std::pow(s + 2.0, k + 1))
                        .epsilon(1e-12));

  // generating identity at theta = 1: rows sum to one
  double total = 0.0;
  for (double v : row) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("occupation row") {
  const QueueModel m(2.5, BatchLaw::unit(), ServiceLaw::exponential(1.0), 0.0, 1);
  const std::vector<double> occ = cp::occupation_row(m, 6);
  for (int i = 0; i <= 6; ++i) CHECK(occ[i] == doctest::Approx(1.0 / 2.5));

  // only even levels visited for deterministic batches of 2
  const QueueModel twos(1.0, BatchLaw::deterministic(2), ServiceLaw::exponential(1.0),
                        0.0, 1);
  const std::vector<double> alt = cp::occupation_row(twos, 5);
  CHECK(alt[0] == doctest::Approx(1.0));
  CHECK(alt[1] == 0.0);
  CHECK(alt[2] == doctest::Approx(1.0));
  CHECK(alt[3] == 0.0);

  // renewal masses stay in [0, 1] and approach 1/E kappa for aperiodic laws
  const QueueModel mix(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::exponential(1.0), 0.0, 1);
  const std::vector<double> v = cp::occupation_row(mix, 200);
  for (double m : v) {
    CHECK(m * mix.mu() >= 0.0);
    CHECK(m * mix.mu() <= 1.0 + 1e-15);
  }
  CHECK(v[200] * mix.mu() == doctest::Approx(1.0 / 1.5).epsilon(1e-3));
}

TEST_CASE("mixed coefficients: closed forms") {
  const QueueModel m(1.0, BatchLaw::unit(), ServiceLaw::exponential(2.0), 0.0, 4);
  // f_0^s(x) = f~_x(s + mu)
  for (double x : {0.0, 0.6}) {
    for (double s : {0.0, 0.7}) {
      const std::vector<double> f = cp::mixed_coeffs(m, x, s, 10);
      CHECK(f[0] ==
            doctest::Approx(m.residual_lt(x, s + m.mu())).epsilon(1e-12));
      // geometric mixing oracle at s = 0: f_k = nu mu^k/(nu+mu)^{k+1}
      if (s == 0.0) {
        for (int k = 0; k <= 10; ++k)
          CHECK(f[k] == doctest::Approx(2.0 * std::pow(1.0, k) /
                                        std::pow(3.0, k + 1))
                            .epsilon(1e-12));
      }
      // total mass: sum_k f_k^s(x) = f~_x(s)
      const std::vector<double> big = cp::mixed_coeffs(m, x, s, 120);
      double total = 0.0;
      for (double v : big) total += v;
      CHECK(total == doctest::Approx(m.residual_lt(x, s)).epsilon(1e-10));
    }
  }

  // deterministic service at age 0: f_k^s(0) = e^{-s d} rho_k(d)
  const QueueModel det(1.2, BatchLaw({0.5, 0.5}), ServiceLaw::deterministic(0.8),
                       0.0, 4);
  const std::vector<double> fd = cp::mixed_coeffs(det, 0.0, 0.9, 8);
  const std::vector<double> rho = cp::pmf_at_t(det, 0.8, 8);
  for (int k = 0; k <= 8; ++k)
    CHECK(fd[k] ==
          doctest::Approx(std::exp(-0.9 * 0.8) * rho[k]).epsilon(1e-12));
}

// Quadrature oracle for the phase-type closed forms: integrate
// e^{-s t} rho_k(t) against the residual density directly.
TEST_CASE("mixed coefficients: closed form vs quadrature oracle") {
  const std::vector<ServiceLaw> laws = {
      ServiceLaw::erlang(2, 3.0),
      ServiceLaw::hyperexponential({0.4, 0.6}, {1.0, 4.0})};
  for (const ServiceLaw& law : laws) {
    const QueueModel m(1.1, BatchLaw({0.7, 0.3}), law, 0.0, 4);
    for (double x : {0.0, 0.5}) {
      const double s = 0.6;
      const int k_max = 12;
      const std::vector<double> fast = cp::mixed_coeffs(m, x, s, k_max);
      const double hi = law.quantile(1.0 - 1e-13);
      const double sf = 1.0 - law.cdf(x);
      for (int k = 0; k <= k_max; k += 4) {
        const double oracle =
            quadrature::adaptive(
                [&](double t) {
                  return std::exp(-s * (t - x)) *
                         cp::pmf_at_t(m, t - x, k)[k] * law.pdf(t);
                },
                law.density_breakpoints(x, hi), 1e-12) /
            sf;
        CHECK(fast[k] == doctest::Approx(oracle).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("mixed coefficients: empirical law via internal quadrature") {
  const ServiceLaw emp =
      ServiceLaw::empirical({{0.0, 0.0}, {0.5, 0.4}, {1.2, 1.0}});
  const QueueModel m(1.0, BatchLaw({0.5, 0.5}), emp, 0.0, 4);
  const std::vector<double> f = cp::mixed_coeffs(m, 0.2, 0.5, 40);
  double total = 0.0;
  for (double v : f) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(m.residual_lt(0.2, 0.5)).epsilon(1e-10));
  CHECK(f[0] == doctest::Approx(m.residual_lt(0.2, 0.5 + 1.0)).epsilon(1e-10));
}
