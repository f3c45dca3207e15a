#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchq/root.hpp"

using namespace batchq;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("analytic quadratic case") {
  // lambda = 0, unit batches, mu = 1, exp(2) service, s = 1: the fixed-point
  // equation becomes theta^2 - 4 theta + 2 = 0 with inside root 2 - sqrt(2).
  const QueueModel m(1.0, BatchLaw::unit(), ServiceLaw::exponential(2.0), 0.0, 5);
  const root::RootValue rv = root::solve_c(m, 1.0);
  CHECK(rv.c == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-13));
  CHECK(rv.residual < 1e-12);
}

TEST_CASE("residual and monotonicity on a log grid") {
  const std::vector<QueueModel> models = {
      QueueModel(1.0, BatchLaw::unit(), ServiceLaw::exponential(2.0), 0.0, 5),
      QueueModel(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0), 0.3, 8),
      QueueModel(0.8, BatchLaw({0.7, 0.0, 0.3}), ServiceLaw::deterministic(0.9),
                 0.2, 6),
  };
  for (const QueueModel& m : models) {
    double prev = 1.0;
    for (double s : log_grid(1e-2, 1e2, 25)) {
      const root::RootValue rv = root::solve_c(m, s);
      CHECK(rv.residual < 1e-12);
      // strict in exact arithmetic; collapses to lambda at huge s in doubles
      CHECK(rv.c >= m.lambda());
      CHECK(rv.c < 1.0);
      CHECK(rv.c <= prev + 1e-14);  // nonincreasing in s
      prev = rv.c;
    }
  }
}

TEST_CASE("limits in s") {
  const QueueModel m(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0), 0.3, 8);
  // s -> infinity: c(s) -> lambda
  CHECK(root::solve_c(m, 1e8).c - m.lambda() < 1e-6);

  // rho <= 1: c(0) = 1 exactly
  CHECK(m.rho() < 1.0);
  CHECK(root::solve_c(m, 0.0).c == 1.0);

  // rho > 1: c(0) inside (lambda, 1) with small residual
  const QueueModel heavy(3.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0),
                         0.3, 8);
  CHECK(heavy.rho() > 1.0);
  const root::RootValue rv = root::solve_c(heavy, 0.0);
  CHECK(rv.c > heavy.lambda());
  CHECK(rv.c < 1.0);
  CHECK(rv.residual < 1e-12);
}

TEST_CASE("lambda = 0 reduces to the simple-renewal equation") {
  // Same code path must solve theta = f~(s - k(theta)).
  const QueueModel m(1.0, BatchLaw({0.3, 0.7}), ServiceLaw::erlang(2, 5.0), 0.0, 4);
  const root::RootValue rv = root::solve_c(m, 0.7);
  const double lhs = rv.c;
  const double rhs = m.service().lt(0.7 - m.cumulant(rv.c));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("slow-contraction fallback near rho = 1") {
  const QueueModel crit =
      critical_load(QueueModel(1.0, BatchLaw({0.5, 0.5}),
                               ServiceLaw::erlang(2, 4.0), 0.3, 8));
  const root::RootValue rv = root::solve_c(crit, 1e-10);
  CHECK(rv.residual < 1e-12);
  CHECK(rv.c < 1.0);
  CHECK(rv.iterations > 0);  // iteration count observable
}
