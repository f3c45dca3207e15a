#include "batchq/diffusion.hpp"

#include <cmath>
#include <stdexcept>

#include "batchq/detail/kahan.hpp"
#include "batchq/exit.hpp"
#include "batchq/inversion.hpp"
#include "batchq/reflected.hpp"
#include "batchq/resolvent.hpp"

namespace batchq::diffusion {

namespace {

double norm_cdf(double y) { return 0.5 * std::erfc(-y / std::sqrt(2.0)); }

void check_window(const WienerSpec& spec) {
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(spec.t > 0.0)) throw std::invalid_argument("t must be > 0");
}

}  // namespace

double wiener_trivariate(const WienerSpec& spec) {
  check_window(spec);
  if (spec.u < -spec.r - 1e-12 || spec.u > spec.k + 1e-12)
    throw std::invalid_argument("u must lie in [-r, k]");
  detail::KahanSum acc;
  for (int n = 1;; ++n) {
    const double decay = std::exp(-0.5 * spec.t * std::pow(M_PI * n * spec.sigma, 2));
    if (decay / n < 1e-14 && n > 1) break;
    const double sr = std::sin(spec.r * M_PI * n);
    const double sw = std::sin(0.5 * (spec.r + spec.u) * n * M_PI);
    acc.add(decay / n * sr * sw * sw);
    if (n > 100000) break;
  }
  return 4.0 / M_PI * acc.value();
}

int trivariate_term_count(const WienerSpec& spec, double tol) {
  // Remainder after N terms is below sum_{n>N} e^{-t(pi n sigma)^2/2} / n,
  // dominated by a geometric tail with ratio e^{-t (pi sigma)^2 (N+1/2)}.
  const double beta = 0.5 * spec.t * M_PI * M_PI * spec.sigma * spec.sigma;
  int n = 1;
  while (std::exp(-beta * n * n) / n >= tol && n < 100000) ++n;
  return n;
}

double wiener_reflected_window(const WienerSpec& spec) {
  check_window(spec);
  const double scale = spec.sigma * std::sqrt(spec.t);
  return 1.0 - (norm_cdf((2.0 * spec.k - spec.u) / scale) -
                norm_cdf(spec.u / scale));
}

double wiener_sup_window(const WienerSpec& spec) {
  check_window(spec);
  const double scale = spec.sigma * std::sqrt(spec.t);
  return norm_cdf((2.0 * spec.k - spec.u) / scale) -
         norm_cdf(-spec.u / scale);
}

double wiener_reflected_two_sided(const WienerSpec& spec) {
  check_window(spec);
  if (spec.u < -spec.r - 1e-12 || spec.u > spec.k + 1e-12)
    throw std::invalid_argument("u must lie in [-r, k]");
  detail::KahanSum acc;
  for (int n = 0;; ++n) {
    const double h = n + 0.5;
    const double decay = std::exp(-0.5 * spec.t * std::pow(M_PI * h * spec.sigma, 2));
    if (decay / h < 1e-14 && n > 0) break;
    const double sr = std::sin(spec.r * h * M_PI);
    const double sw = std::sin(0.5 * (spec.r + spec.u) * h * M_PI);
    acc.add(decay / h * sr * sw * sw);
    if (n > 100000) break;
  }
  return 4.0 / M_PI * acc.value();
}

int reflected_two_sided_term_count(const WienerSpec& spec, double tol) {
  const double beta = 0.5 * spec.t * M_PI * M_PI * spec.sigma * spec.sigma;
  int n = 0;
  while (std::exp(-beta * (n + 0.5) * (n + 0.5)) / (n + 0.5) >= tol &&
         n < 100000)
    ++n;
  return n + 1;
}

double wiener_reflected_passage_lt(double sigma, double r, double s) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
  const double k = 1.0 - r;
  const double y = std::sqrt(2.0 * s) / sigma;
  return std::cosh(k * y) / std::cosh(y);
}

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::kRootLinearization: return "root-linearization";
    case Quantity::kResolventScaling: return "resolvent-scaling";
    case Quantity::kPartialSumScaling: return "partial-sum-scaling";
    case Quantity::kTrivariate: return "trivariate-window";
    case Quantity::kReflectedWindow: return "reflected-window";
    case Quantity::kReflectedTwoSided: return "reflected-two-sided";
    case Quantity::kReflectedPassage: return "reflected-passage";
  }
  return "?";
}

std::vector<DeviationRow> convergence_report(const QueueModel& model,
                                             Quantity quantity,
                                             const std::vector<int>& buffers,
                                             const ReportOptions& opts) {
  if (std::abs(model.rho() - 1.0) > 1e-9)
    throw std::invalid_argument(
        "condition (A) not met: rho must equal 1 (use critical_load)");
  const DiffusionParams dp = diffusion_params(model);
  const double sigma = dp.sigma();
  const double eh = model.service().mean();
  const double k_frac = 1.0 - opts.r;

  std::vector<DeviationRow> rows;
  for (int B : buffers) {
    const double sB = opts.s / (static_cast<double>(B) * B);
    const int kB = static_cast<int>(k_frac * B);
    const int rB = static_cast<int>(opts.r * B);
    const int uB = static_cast<int>(std::floor(opts.u * B));
    DeviationRow row;
    row.buffer_b = B;

    switch (quantity) {
      case Quantity::kRootLinearization: {
        const double c = root::solve_c(model, sB).c;
        row.limit = 1.0 - std::sqrt(2.0 * opts.s) / (sigma * B);
        row.prelimit = c;
        // o(1/B) check: the deviation is |c - linearization| * B.
        row.deviation = std::abs(c - row.limit) * B;
        break;
      }
      case Quantity::kResolventScaling: {
        const resolvent::Table t = resolvent::q_table(model, opts.x, sB, kB);
        const double y = std::sqrt(2.0 * opts.s) / sigma;
        row.prelimit = t.Q(kB) / B;
        row.limit = 2.0 * std::sinh(k_frac * y) /
                    (sigma * std::sqrt(2.0 * opts.s) * eh);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
      case Quantity::kPartialSumScaling: {
        const resolvent::Table t = resolvent::q_table(model, opts.x, sB, kB);
        const double y = std::sqrt(2.0 * opts.s) / sigma;
        row.prelimit = t.S(kB) / (static_cast<double>(B) * B);
        row.limit = (std::cosh(k_frac * y) - 1.0) / (opts.s * eh);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
      case Quantity::kTrivariate: {
        inversion::InversionRequest req;
        req.t = opts.t * B * B;
        req.order = opts.inversion_order;
        req.transform = [&](double s) {
          const resolvent::GeomTables g(model, opts.x, s, rB + kB);
          return exit_problem::trivariate(model, g, rB, kB, uB) / s;
        };
        row.prelimit = inversion::invert(req).value;
        WienerSpec spec{sigma, opts.r, k_frac, opts.u, opts.t};
        row.limit = wiener_trivariate(spec);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
      case Quantity::kReflectedWindow: {
        inversion::InversionRequest req;
        req.t = opts.t * B * B;
        req.order = opts.inversion_order;
        req.transform = [&](double s) {
          return reflected::increments(model, opts.x, kB, uB, s) / s;
        };
        row.prelimit = inversion::invert(req).value;
        WienerSpec spec{sigma, opts.r, k_frac, opts.u, opts.t};
        row.limit = wiener_reflected_window(spec);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
      case Quantity::kReflectedTwoSided: {
        inversion::InversionRequest req;
        req.t = opts.t * B * B;
        req.order = opts.inversion_order;
        req.transform = [&](double s) {
          return reflected::two_sided(model, opts.x, rB, kB, uB, s) / s;
        };
        row.prelimit = inversion::invert(req).value;
        WienerSpec spec{sigma, opts.r, k_frac, opts.u, opts.t};
        row.limit = wiener_reflected_two_sided(spec);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
      case Quantity::kReflectedPassage: {
        row.prelimit = reflected::passage_lt(model, opts.x, rB, B, sB);
        row.limit = wiener_reflected_passage_lt(sigma, opts.r, opts.s);
        row.deviation = std::abs(row.prelimit - row.limit) / std::abs(row.limit);
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace batchq::diffusion
