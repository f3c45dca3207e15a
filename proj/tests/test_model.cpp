#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchq/model.hpp"
#include "batchq/quadrature.hpp"

using namespace batchq;

TEST_CASE("model construction and rho") {
  const QueueModel m(1.0, BatchLaw::unit(), ServiceLaw::exponential(2.0), 0.0, 5);
  CHECK(m.rho() == doctest::Approx(0.5).epsilon(1e-14));

  const QueueModel m2(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::exponential(3.0),
                      0.5, 10);
  CHECK(m2.rho() == doctest::Approx(0.25).epsilon(1e-14));
  // rho = (1 - lambda) mu E kappa E eta exactly as defined
  CHECK(std::abs(m2.rho() - (1.0 - m2.lambda()) * m2.mu() * m2.batch().mean() *
                                m2.service().mean()) < 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_WITH_AS(BatchLaw({0.4, 0.5}), doctest::Contains("not normalized"),
                       std::invalid_argument);
  CHECK_THROWS_AS(QueueModel(0.0, BatchLaw::unit(), ServiceLaw::exponential(1.0),
                             0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(QueueModel(1.0, BatchLaw::unit(), ServiceLaw::exponential(1.0),
                             1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(QueueModel(1.0, BatchLaw::unit(), ServiceLaw::exponential(1.0),
                             -0.1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(QueueModel(1.0, BatchLaw::unit(), ServiceLaw::exponential(1.0),
                             0.0, -1),
                  std::invalid_argument);
  CHECK_THROWS_AS(ServiceLaw::hyperexponential({0.5, 0.4}, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("cumulant") {
  const QueueModel m(2.0, BatchLaw::unit(), ServiceLaw::exponential(1.0), 0.0, 1);
  CHECK(m.cumulant(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m.cumulant(0.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(m.cumulant(0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(m.cumulant(1.5), std::invalid_argument);

  // increasing on [0, 1] with k(1) = 0
  const QueueModel mix(1.3, BatchLaw({0.2, 0.5, 0.3}),
                       ServiceLaw::exponential(1.0), 0.0, 1);
  double prev = mix.cumulant(0.0);
  for (double th = 0.1; th <= 1.0 + 1e-12; th += 0.1) {
    const double cur = mix.cumulant(th);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(std::abs(mix.cumulant(1.0)) < 1e-14);
}

TEST_CASE("batch law functionals") {
  const BatchLaw a({0.5, 0.3, 0.2});
  CHECK(a.mean() == doctest::Approx(1.7));
  CHECK(a.tail(0) == doctest::Approx(1.0));
  CHECK(a.tail(1) == doctest::Approx(0.5));
  CHECK(a.tail(2) == doctest::Approx(0.2));
  CHECK(a.tail(3) == 0.0);
  // E[z^{k-i}; k > i] at z = 1 equals the tail
  for (int i = 0; i <= 3; ++i)
    CHECK(a.shifted_pgf(i, 1.0) == doctest::Approx(a.tail(i)));
  // tail pgf vs direct sum
  const double z = 0.7;
  double direct = 0.0;
  for (int n = 0; n < 3; ++n) direct += a.tail(n) * std::pow(z, n);
  CHECK(a.tail_pgf(z) == doctest::Approx(direct).epsilon(1e-14));

  const BatchLaw geo = BatchLaw::geometric(0.4, 64);
  CHECK(geo.pmf(1) == doctest::Approx(0.6));
  CHECK(geo.pmf(3) == doctest::Approx(0.6 * 0.16));
  double total = 0.0;
  for (int n = 1; n <= geo.support(); ++n) total += geo.pmf(n);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("residual transforms: memorylessness and deterministic") {
  const QueueModel m(1.0, BatchLaw::unit(), ServiceLaw::exponential(1.5), 0.0, 1);
  // x = 0 reduces to the plain transform
  CHECK(m.residual_lt(0.0, 0.8) ==
        doctest::Approx(m.service().lt(0.8)).epsilon(1e-15));
  // exponential: residual independent of age
  for (double x : {0.1, 1.0, 7.0})
    CHECK(m.residual_lt(x, 0.8) ==
          doctest::Approx(1.5 / (1.5 + 0.8)).epsilon(1e-14));

  const ServiceLaw det = ServiceLaw::deterministic(1.0);
  CHECK(det.residual_lt(0.25, 1.0) ==
        doctest::Approx(std::exp(-0.75)).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(det.residual_lt(1.0, 1.0),
                       doctest::Contains("age beyond"), std::domain_error);
  CHECK_THROWS_AS(det.residual_lt(2.0, 1.0), std::domain_error);
}

TEST_CASE("transforms decrease in s and stay in (0,1]") {
  const std::vector<ServiceLaw> laws = {
      ServiceLaw::exponential(2.0),
      ServiceLaw::erlang(3, 2.0),
      ServiceLaw::hyperexponential({0.3, 0.7}, {0.8, 3.0}),
      ServiceLaw::deterministic(0.7),
      ServiceLaw::empirical({{0.0, 0.0}, {0.5, 0.25}, {2.0, 1.0}}),
  };
  for (const ServiceLaw& law : laws) {
    double prev = law.lt(0.0);
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
    for (double s : {0.3, 1.0, 3.0, 10.0}) {
      const double cur = law.lt(s);
      CHECK(cur > 0.0);
      CHECK(cur < prev);
      prev = cur;
    }
    const double x = 0.2;
    double prev_x = law.residual_lt(x, 0.0);
    CHECK(prev_x == doctest::Approx(1.0).epsilon(1e-11));
    for (double s : {0.3, 1.0, 3.0}) {
      const double cur = law.residual_lt(x, s);
      CHECK(cur > 0.0);
      CHECK(cur < prev_x);
      prev_x = cur;
    }
  }
}

// Residual law against its definition F_x(u) = [F(x+u) - F(x)]/(1 - F(x)):
// the transform recomputed by direct Stieltjes quadrature of the density.
TEST_CASE("residual transform matches the aged-cdf definition") {
  const std::vector<ServiceLaw> laws = {
      ServiceLaw::erlang(2, 3.0),
      ServiceLaw::hyperexponential({0.4, 0.6}, {1.0, 4.0}),
      ServiceLaw::empirical({{0.0, 0.0}, {0.4, 0.3}, {1.0, 0.8}, {1.6, 1.0}}),
  };
  for (const ServiceLaw& law : laws) {
    for (double x : {0.0, 0.3}) {
      for (double s : {0.5, 2.0}) {
        const double hi =
            std::min(law.support_end(), law.quantile(1.0 - 1e-13));
        const double oracle =
            quadrature::adaptive(
                [&](double t) {
                  return std::exp(-s * (t - x)) * law.pdf(t);
                },
                law.density_breakpoints(x, hi), 1e-12) /
            (1.0 - law.cdf(x));
        CHECK(law.residual_lt(x, s) == doctest::Approx(oracle).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("moments") {
  CHECK(ServiceLaw::erlang(3, 2.0).mean() == doctest::Approx(1.5));
  CHECK(ServiceLaw::erlang(3, 2.0).second_moment() == doctest::Approx(3.0));
  const ServiceLaw hyper = ServiceLaw::hyperexponential({0.3, 0.7}, {1.0, 2.0});
  CHECK(hyper.mean() == doctest::Approx(0.3 + 0.35));
  CHECK(hyper.second_moment() == doctest::Approx(2.0 * 0.3 + 2.0 * 0.7 / 4.0));
  // uniform(0, 1) via the empirical table
  const ServiceLaw uni = ServiceLaw::empirical({{0.0, 0.0}, {1.0, 1.0}});
  CHECK(uni.mean() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(uni.second_moment() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(uni.lt(2.0) ==
        doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-12));
  // residual mean of the deterministic law
  CHECK(ServiceLaw::deterministic(1.0).residual_mean(0.25) ==
        doctest::Approx(0.75));
}

TEST_CASE("extreme ages keep the phase-type residual laws finite") {
  // Erlang: at huge ages the residual approaches a single remaining phase
  // at rate 1/(rate * age); the point here is that the log-space weights
  // stay finite where the naive terms (rate*x)^j/j! overflow.
  const ServiceLaw erl = ServiceLaw::erlang(3, 2.0);
  const double x = 900.0;
  CHECK(std::isfinite(erl.residual_lt(x, 1.0)));
  CHECK(erl.residual_lt(x, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  CHECK(erl.residual_mean(x) == doctest::Approx(0.5).epsilon(1e-2));

  const ServiceLaw hyp = ServiceLaw::hyperexponential({0.5, 0.5}, {0.4, 5.0});
  CHECK(hyp.residual_lt(700.0, 1.0) ==
        doctest::Approx(0.4 / 1.4).epsilon(1e-9));
  CHECK(hyp.residual_mean(700.0) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("diffusion parameters") {
  // kappa ~ {1:.5, 2:.5}, Erlang(2, 4), lambda = .3:
  // Ek(k-1) = 1, Ek E eta^2 / ((1-l)(E eta)^2) = 1.5 * 1.5 / 0.7.
  const QueueModel m(2.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0), 0.3, 8);
  const DiffusionParams p = diffusion_params(m);
  CHECK(p.sigma2 ==
        doctest::Approx(2.0 * (1.0 + 1.5 * 1.5 / 0.7)).epsilon(1e-12));

  const QueueModel crit = critical_load(m);
  CHECK(crit.rho() == doctest::Approx(1.0).epsilon(1e-14));
}
