#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchq/compound_poisson.hpp"
#include "batchq/resolvent.hpp"

using namespace batchq;

namespace {

const QueueModel kExp(1.0, BatchLaw::unit(), ServiceLaw::exponential(2.0), 0.0, 5);
const QueueModel kErl(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0), 0.3, 8);
const QueueModel kDet(0.8, BatchLaw({0.7, 0.0, 0.3}), ServiceLaw::deterministic(0.9),
                      0.2, 6);

}  // namespace

TEST_CASE("Q_0 closed form") {
  for (const QueueModel* m : {&kExp, &kErl, &kDet}) {
    for (double x : {0.0, 0.4}) {
      for (double s : {0.0, 0.8}) {
        const resolvent::Table t = resolvent::q_table(*m, x, s, 4);
        const double lam = m->lambda();
        const double expected = (1.0 - lam) * m->residual_lt(x, s + m->mu()) /
                                (lam + (1.0 - lam) *
                                           m->service().lt(s + m->mu()));
        CHECK(t.Q(0) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(t.Q(-1) == 0.0);
        CHECK(t.S(-1) == 0.0);
        CHECK(t.A(-1) == 0.0);
      }
    }
  }
}

TEST_CASE("s = 0 displayed forms for Q_0 and Q_1") {
  const QueueModel& m = kErl;
  const double x = 0.3;
  const resolvent::Table t = resolvent::q_table(m, x, 0.0, 2);
  const std::vector<double> fx = compound_poisson::mixed_coeffs(m, x, 0.0, 2);
  const std::vector<double> f0 = compound_poisson::mixed_coeffs(m, 0.0, 0.0, 2);
  const double lam = m.lambda();
  const double d = lam + (1.0 - lam) * f0[0];
  const double q0 = (1.0 - lam) / d * fx[0];
  // One step of the recurrence written out; the bracket carries f_1 (the
  // contour integral at s = 0 arbitrates the coefficient).
  const double q1 =
      (1.0 - lam) / d * (fx[1] + (1.0 - (1.0 - lam) * f0[1]) / d * fx[0]);
  CHECK(t.Q(0) == doctest::Approx(q0).epsilon(1e-13));
  CHECK(t.Q(1) == doctest::Approx(q1).epsilon(1e-13));
  CHECK(t.Q(1) == doctest::Approx(resolvent::q_contour(m, x, 0.0, 1,
                                                       0.9 * t.c.c, 4096))
                      .epsilon(1e-11));
}

TEST_CASE("recurrence vs contour-integral oracle") {
  // s small keeps c(s) near 1 so Q_50 stays moderate and the absolute
  // comparison carries full precision.
  const double s = 0.05;
  for (const QueueModel* m : {&kExp, &kErl, &kDet}) {
    for (double x : {0.0, 0.25}) {
      const resolvent::Table t = resolvent::q_table(*m, x, s, 50);
      const double alpha = 0.9 * t.c.c;
      for (int k = 0; k <= 50; k += 5) {
        const double qc = resolvent::q_contour(*m, x, s, k, alpha, 2048);
        CHECK(std::abs(t.Q(k) - qc) < 1e-9);
      }
    }
  }
}

TEST_CASE("contour preconditions and self-convergence") {
  const resolvent::Table t = resolvent::q_table(kErl, 0.0, 0.4, 4);
  CHECK_THROWS_WITH_AS(resolvent::q_contour(kErl, 0.0, 0.4, 2, t.c.c * 1.01, 256),
                       doctest::Contains("radius too large"),
                       std::invalid_argument);
  CHECK_THROWS_AS(resolvent::q_contour(kErl, 0.0, 0.4, 2, 0.1, 100),
                  std::invalid_argument);  // not a power of two

  const double a = resolvent::q_contour(kErl, 0.0, 0.4, 6, 0.9 * t.c.c, 1024);
  const double b = resolvent::q_contour(kErl, 0.0, 0.4, 6, 0.9 * t.c.c, 2048);
  CHECK(std::abs(a - b) < 1e-11);
  CHECK(resolvent::q_contour_auto(kErl, 0.0, 0.4, 6) ==
        doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("asymptotic growth ratio -> 1/c(s)") {
  const double s = 0.3;
  const resolvent::Table t = resolvent::q_table(kErl, 0.0, s, 201);
  const double ratio = std::log(t.Q(201)) - std::log(t.Q(200));
  CHECK(ratio == doctest::Approx(-std::log(t.c.c)).epsilon(1e-3));
}

TEST_CASE("A-identity: sum lambda^i A_0^i(s) = 0") {
  const double s = 0.6;
  const resolvent::GeomTables g(kErl, 0.0, s, kErl.buffer());
  const resolvent::Table& t0 = g.at_zero();
  double acc = 0.0;
  double w = 1.0;
  double final_tail = 0.0;
  for (int i = 0; i <= t0.k_max(); ++i) {
    acc += w * t0.A(i);
    w *= kErl.lambda();
    if (i == t0.k_max()) final_tail = std::abs(acc);
  }
  CHECK(final_tail < 1e-8);
}

TEST_CASE("geometric expectations") {
  // lambda = 0: the series degenerate to single terms.
  const resolvent::GeomTables g0(kExp, 0.0, 0.7, kExp.buffer());
  CHECK(g0.expectations().eq ==
        doctest::Approx(g0.at_zero().Q(kExp.buffer() + 1)).epsilon(1e-15));
  CHECK(g0.expectations().es ==
        doctest::Approx(g0.at_zero().S(kExp.buffer())).epsilon(1e-15));
  CHECK(g0.expectations().ea ==
        doctest::Approx(g0.at_zero().A(kExp.buffer() + 1)).epsilon(1e-15));

  // lambda = .5: successive truncations converge with ratio ~ lambda/c(s).
  const QueueModel half(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 4.0),
                        0.5, 6);
  const double s = 0.4;
  const resolvent::GeomTables g(half, 0.0, s, 6);
  const resolvent::Table& t0 = g.at_zero();
  const double lam = half.lambda();
  auto partial = [&](int n) {
    double acc = 0.0, w = 1.0 - lam;
    for (int i = 1; i <= n; ++i) {
      acc += w * t0.Q(6 + i);
      w *= lam;
    }
    return acc;
  };
  const double full = g.expectations().eq;
  const double r1 = std::abs(partial(12) - full);
  const double r2 = std::abs(partial(13) - full);
  const double observed = r2 / r1;
  CHECK(observed == doctest::Approx(lam / t0.c.c).epsilon(0.05));
  CHECK(g.expectations().truncation_bound < 1e-12 * std::abs(full) * 100);

  // shifted expectations cover every index the formulas touch
  for (int shift = 0; shift <= 6; ++shift) {
    CHECK(std::isfinite(g.ea_shift(shift)));
    CHECK(std::isfinite(g.es_shift(shift)));
  }
  CHECK(g.ea_shift(6) == doctest::Approx(g.expectations().ea).epsilon(1e-15));
}

TEST_CASE("diffusion scaling of the resolvent") {
  const QueueModel crit = critical_load(
      QueueModel(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 0.5), 0.3, 8));
  const DiffusionParams dp = diffusion_params(crit);
  const double s = 1.0;
  const double k_frac = 0.5;
  const double limit = 2.0 * std::sinh(k_frac * std::sqrt(2.0 * s) / dp.sigma()) /
                       (dp.sigma() * std::sqrt(2.0 * s) * crit.service().mean());
  double prev = 1e9;
  for (int b : {50, 100, 200}) {
    const resolvent::Table t =
        resolvent::q_table(crit, 0.0, s / (static_cast<double>(b) * b),
                           static_cast<int>(k_frac * b));
    const double dev =
        std::abs(t.Q(static_cast<int>(k_frac * b)) / b - limit) / limit;
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("overflow guard") {
  // c(s) ~ lambda + tiny at huge s makes Q_k blow past the double range.
  CHECK_THROWS_AS(resolvent::q_table(kExp, 0.0, 1e6, 200), std::overflow_error);
}
