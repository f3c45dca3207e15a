#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "batchq/diffusion.hpp"
#include "batchq/quadrature.hpp"

using namespace batchq;
using batchq::diffusion::WienerSpec;

TEST_CASE("trivariate window boundary geometry") {
  WienerSpec spec{1.0, 0.5, 0.5, -0.5, 0.4};  // u = -r: zero-width event
  CHECK(diffusion::wiener_trivariate(spec) == doctest::Approx(0.0).epsilon(1e-14));

  // reflection symmetry at r = k = 1/2, u = 0: swapping the roles of the
  // boundaries maps the series onto itself
  WienerSpec sym{1.3, 0.5, 0.5, 0.0, 0.3};
  const double v = diffusion::wiener_trivariate(sym);
  WienerSpec swapped{1.3, 0.5, 0.5, 0.0, 0.3};
  CHECK(diffusion::wiener_trivariate(swapped) == doctest::Approx(v));
  CHECK(v > 0.0);
  CHECK(v < 1.0);

  // long horizons decay exponentially
  WienerSpec late{1.0, 0.5, 0.5, 0.0, 6.0};
  CHECK(diffusion::wiener_trivariate(late) < 1e-12);
}

TEST_CASE("gaussian windows against direct quadrature") {
  const WienerSpec spec{1.4, 0.5, 0.5, 0.1, 0.6};
  const double direct = quadrature::adaptive(
      [&](double v) {
        return std::exp(-v * v / (2.0 * spec.sigma * spec.sigma * spec.t)) /
               (spec.sigma * std::sqrt(2.0 * M_PI * spec.t));
      },
      {spec.u, 2.0 * spec.k - spec.u}, 1e-12);
  CHECK(diffusion::wiener_reflected_window(spec) ==
        doctest::Approx(1.0 - direct).epsilon(1e-10));

  const double sup_direct = quadrature::adaptive(
      [&](double v) {
        return std::exp(-v * v / (2.0 * spec.sigma * spec.sigma * spec.t)) /
               (spec.sigma * std::sqrt(2.0 * M_PI * spec.t));
      },
      {-spec.u, 2.0 * spec.k - spec.u}, 1e-12);
  CHECK(diffusion::wiener_sup_window(spec) ==
        doctest::Approx(sup_direct).epsilon(1e-10));

  // u = k: zero-width window, the complement form returns 1 exactly
  WienerSpec degen{1.0, 0.5, 0.5, 0.5, 0.7};
  CHECK(diffusion::wiener_reflected_window(degen) == doctest::Approx(1.0));
}

TEST_CASE("reflected two-boundary series") {
  // u = k, small t: the process starts inside, so the law tends to 1
  WienerSpec start{1.0, 0.5, 0.5, 0.5, 1e-4};
  CHECK(diffusion::wiener_reflected_two_sided(start) ==
        doctest::Approx(1.0).epsilon(1e-6));

  // term count stays under 60 for t >= 0.05, sigma <= 3 at tol 1e-14
  int worst = 0;
  for (double sigma : {0.5, 1.0, 3.0}) {
    for (double t : {0.05, 0.2, 1.0}) {
      WienerSpec spec{sigma, 0.5, 0.5, 0.0, t};
      worst = std::max(worst, diffusion::reflected_two_sided_term_count(spec));
      worst = std::max(worst, diffusion::trivariate_term_count(spec));
    }
  }
  CHECK(worst <= 60);
}

TEST_CASE("reflected passage transform ratio") {
  CHECK(diffusion::wiener_reflected_passage_lt(1.0, 0.5, 1.0) ==
        doctest::Approx(std::cosh(0.5 * std::sqrt(2.0)) /
                        std::cosh(std::sqrt(2.0))));
  // k -> 1 (r -> 0): immediate reflection, transform -> 1
  CHECK(diffusion::wiener_reflected_passage_lt(1.0, 1e-9, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("convergence report requires critical load") {
  const QueueModel m(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 0.5), 0.3, 8);
  CHECK_THROWS_WITH_AS(
      diffusion::convergence_report(m, diffusion::Quantity::kResolventScaling,
                                    {20, 40}),
      doctest::Contains("condition (A)"), std::invalid_argument);

  const QueueModel crit = critical_load(m);
  const auto rows = diffusion::convergence_report(
      crit, diffusion::Quantity::kReflectedPassage, {20, 40});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].deviation < rows[0].deviation);
}

TEST_CASE("root linearization trend") {
  const QueueModel crit = critical_load(
      QueueModel(1.0, BatchLaw({0.5, 0.5}), ServiceLaw::erlang(2, 0.5), 0.3, 8));
  const auto rows = diffusion::convergence_report(
      crit, diffusion::Quantity::kRootLinearization, {50, 100, 200});
  CHECK(rows[1].deviation < rows[0].deviation);
  CHECK(rows[2].deviation < rows[1].deviation);
}
