#include "batchq/compound_poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "batchq/detail/kahan.hpp"
#include "batchq/quadrature.hpp"

namespace batchq::compound_poisson {

std::vector<double> pmf_at_t(const QueueModel& model, double t, int k_max) {
  if (t < 0.0) throw std::invalid_argument("pmf_at_t: t must be >= 0");
  if (k_max < 0) throw std::invalid_argument("pmf_at_t: k_max must be >= 0");
  const BatchLaw& a = model.batch();
  const double mu = model.mu();
  std::vector<double> rho(k_max + 1, 0.0);
  rho[0] = std::exp(-mu * t);
  for (int k = 1; k <= k_max; ++k) {
    detail::KahanSum acc;
    const int jmax = std::min(k, a.support());
    for (int j = 1; j <= jmax; ++j) acc.add(j * a.pmf(j) * rho[k - j]);
    rho[k] = (mu * t / k) * acc.value();
  }
  return rho;
}

std::vector<double> lt_row(const QueueModel& model, double s, int k_max) {
  if (!(s > 0.0)) throw std::invalid_argument("lt_row: s must be > 0");
  if (k_max < 0) throw std::invalid_argument("lt_row: k_max must be >= 0");
  const BatchLaw& a = model.batch();
  const double mu = model.mu();
  std::vector<double> row(k_max + 1, 0.0);
  row[0] = s / (s + mu);
  for (int k = 1; k <= k_max; ++k) {
    detail::KahanSum acc;
    const int jmax = std::min(k, a.support());
    for (int j = 1; j <= jmax; ++j) acc.add(a.pmf(j) * row[k - j]);
    row[k] = mu / (s + mu) * acc.value();
  }
  return row;
}

std::vector<double> occupation_row(const QueueModel& model, int k_max) {
  if (k_max < 0) throw std::invalid_argument("occupation_row: k_max must be >= 0");
  const BatchLaw& a = model.batch();
  std::vector<double> v(k_max + 1, 0.0);
  v[0] = 1.0;
  for (int i = 1; i <= k_max; ++i) {
    detail::KahanSum acc;
    const int jmax = std::min(i, a.support());
    for (int j = 1; j <= jmax; ++j) acc.add(a.pmf(j) * v[i - j]);
    v[i] = acc.value();
  }
  for (double& x : v) x /= model.mu();
  return v;
}

namespace {

// Coefficient row of (nu / (w - mu A(theta)))^shape in powers of theta,
// where w = nu + s + mu and A is the batch pgf: the contribution of one
// Erlang(shape, nu) residual component to f_k^s.
std::vector<double> erlang_component_row(const QueueModel& model, double nu,
                                         int shape, double s, int k_max) {
  const BatchLaw& a = model.batch();
  const double mu = model.mu();
  const double w = nu + s + mu;
  std::vector<double> g(k_max + 1, 0.0);  // shape = 1 row
  g[0] = nu / w;
  for (int k = 1; k <= k_max; ++k) {
    detail::KahanSum acc;
    const int jmax = std::min(k, a.support());
    for (int j = 1; j <= jmax; ++j) acc.add(a.pmf(j) * g[k - j]);
    g[k] = mu / w * acc.value();
  }
  std::vector<double> out = g;
  for (int m = 2; m <= shape; ++m) {
    std::vector<double> next(k_max + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
      detail::KahanSum acc;
      for (int i = 0; i <= k; ++i) acc.add(out[i] * g[k - i]);
      next[k] = acc.value();
    }
    out.swap(next);
  }
  return out;
}

std::vector<double> mixed_coeffs_quadrature(const QueueModel& model, double x,
                                            double s, int k_max) {
  const ServiceLaw& eta = model.service();
  const double sf = 1.0 - eta.cdf(x);
  const double hi = std::min(eta.support_end(), eta.quantile(1.0 - 1e-12));
  std::vector<double> brk = eta.density_breakpoints(x, hi);
  // Integrand in the original time scale: t runs over the remaining-service
  // support [x, hi]; the residual duration is t - x.
  auto f = [&](double t) {
    std::vector<double> row = pmf_at_t(model, t - x, k_max);
    const double weight = std::exp(-s * (t - x)) * eta.pdf(t) / sf;
    for (double& v : row) v *= weight;
    return row;
  };
  return quadrature::adaptive_vector(f, k_max + 1, brk, 1e-11);
}

}  // namespace

std::vector<double> mixed_coeffs(const QueueModel& model, double x, double s,
                                 int k_max) {
  if (s < 0.0) throw std::invalid_argument("mixed_coeffs: s must be >= 0");
  if (k_max < 0) throw std::invalid_argument("mixed_coeffs: k_max must be >= 0");
  const ServiceLaw& eta = model.service();
  eta.require_age(x);
  switch (eta.family()) {
    case ServiceLaw::Family::kDeterministic: {
      const double rem = eta.support_end() - x;
      std::vector<double> row = pmf_at_t(model, rem, k_max);
      const double scale = std::exp(-s * rem);
      for (double& v : row) v *= scale;
      return row;
    }
    case ServiceLaw::Family::kExponential:
    case ServiceLaw::Family::kErlang:
    case ServiceLaw::Family::kHyperexponential: {
      const ServiceLaw::ResidualPhases ph = eta.residual_phases(x);
      std::vector<double> out(k_max + 1, 0.0);
      for (size_t c = 0; c < ph.weights.size(); ++c) {
        if (ph.weights[c] == 0.0) continue;
        const std::vector<double> row = erlang_component_row(
            model, ph.rates[c], ph.shapes[c], s, k_max);
        for (int k = 0; k <= k_max; ++k) out[k] += ph.weights[c] * row[k];
      }
      return out;
    }
    case ServiceLaw::Family::kEmpirical:
      return mixed_coeffs_quadrature(model, x, s, k_max);
  }
  throw std::logic_error("mixed_coeffs: unreachable");
}

}  // namespace batchq::compound_poisson
