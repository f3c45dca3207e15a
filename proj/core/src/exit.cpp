#include "batchq/exit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "batchq/compound_poisson.hpp"
#include "batchq/detail/kahan.hpp"

namespace batchq::exit_problem {

namespace {

// sum_{j >= 0} a_{m+j} z^j (the overshoot section of the batch pgf).
double overshoot_section(const BatchLaw& a, int m, double z) {
  double acc = 0.0;
  for (int i = a.support(); i >= m; --i) acc = acc * z + a.pmf(i);
  return acc;
}

// w[n] = sum_{j=0..n} rho_j(t) a(n - j + m), n = 0..n_max; m == 0 selects the
// tail weights P[batch > n-j] instead (the m-summed kernel).
std::vector<double> crossing_kernel(const QueueModel& model, double t,
                                    int n_max, int m) {
  const std::vector<double> rho = compound_poisson::pmf_at_t(model, t, n_max);
  const BatchLaw& a = model.batch();
  std::vector<double> w(n_max + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    detail::KahanSum acc;
    for (int j = 0; j <= n; ++j) {
      const double weight = (m >= 1) ? a.pmf(n - j + m) : a.tail(n - j);
      if (weight != 0.0) acc.add(rho[j] * weight);
    }
    w[n] = acc.value();
  }
  return w;
}

double section_or_tail(const BatchLaw& a, int m, double z) {
  return (m >= 1) ? overshoot_section(a, m, z) : a.tail_pgf(z);
}

// Density of f^k(x, dl, m, s) at l; m == 0 means summed over m.
double upper_density_impl(const QueueModel& model, const resolvent::Table& t,
                          int k, double l, int m, double s) {
  if (k < 0) throw std::invalid_argument("upper_passage_density: k >= 0");
  if (l < 0.0) return 0.0;
  const ServiceLaw& eta = model.service();
  const double x = t.x;
  const double mu = model.mu();
  const double c = t.c.c;
  const double sfl = 1.0 - eta.cdf(l);
  if (sfl <= 0.0) return 0.0;

  double term1 = 0.0;
  if (l > x) {
    const std::vector<double> w = crossing_kernel(model, l - x, k, m);
    term1 = std::exp(-s * (l - x)) * sfl / (1.0 - eta.cdf(x)) * mu * w[k];
  }
  const double phi = std::exp(-s * l) * sfl * mu *
                     std::exp(l * model.cumulant(c)) *
                     section_or_tail(model.batch(), m, c);
  const double term2 = t.Q(k) * phi;

  const std::vector<double> w0 = crossing_kernel(model, l, k, m);
  detail::KahanSum conv;
  for (int i = 0; i <= k; ++i) conv.add(t.Q(i) * w0[k - i]);
  const double term3 = std::exp(-s * l) * sfl * mu * conv.value();

  return term1 + term2 - term3;
}

// E f^{delta+B}(0, dl, m, s) density at l; m == 0 sums over m.
double expected_density_impl(const QueueModel& model,
                             const resolvent::GeomTables& g, double l, int m,
                             double s) {
  if (l < 0.0) return 0.0;
  const ServiceLaw& eta = model.service();
  const double mu = model.mu();
  const resolvent::Table& t0 = g.at_zero();
  const double c = t0.c.c;
  const double sfl = 1.0 - eta.cdf(l);
  if (sfl <= 0.0) return 0.0;
  const int B = g.buffer_b();
  const int n_max = B + g.series_terms();
  const double lambda = g.lambda();

  const std::vector<double> w = crossing_kernel(model, l, n_max, m);
  std::vector<double> qw(n_max + 1, 0.0);  // (Q * w)[n]
  for (int n = 0; n <= n_max; ++n) {
    detail::KahanSum acc;
    for (int i = 0; i <= n; ++i) acc.add(t0.Q(i) * w[n - i]);
    qw[n] = acc.value();
  }

  detail::KahanSum first, third;
  double weight = 1.0 - lambda;
  for (int i = 1; i <= g.series_terms(); ++i) {
    first.add(weight * w[B + i]);
    third.add(weight * qw[B + i]);
    weight *= lambda;
  }
  const double phi_scale =
      std::exp(l * model.cumulant(c)) * section_or_tail(model.batch(), m, c);
  const double base = std::exp(-s * l) * sfl * mu;
  return base *
         (first.value() + g.expectations().eq * phi_scale - third.value());
}

}  // namespace

double lower_passage(const QueueModel& model, double x, int k, int m, double s) {
  if (k < 0) throw std::invalid_argument("lower_passage: k must be >= 0");
  if (m < 1) throw std::invalid_argument("lower_passage: m must be >= 1");
  if (s < 0.0) throw std::invalid_argument("lower_passage: s must be >= 0");
  const root::RootValue c = root::solve_c(model, s);
  const double arg = s - model.cumulant(c.c);
  const double lambda = model.lambda();
  return model.service().residual_lt(x, arg) * std::pow(c.c, k) *
         (1.0 - lambda) * std::pow(lambda, m - 1);
}

double upper_passage_lt(const QueueModel& model, const resolvent::Table& t,
                        int k) {
  if (k < 0) throw std::invalid_argument("upper_passage_lt: k must be >= 0");
  const double s = t.s;
  const double lambda = model.lambda();
  if (s == 0.0) {
    // s = 0 law: defective for rho < 1, proper otherwise.
    if (model.rho() < 1.0)
      return 1.0 - (1.0 - model.rho()) / (1.0 - lambda) * t.Q(k);
    return 1.0;
  }
  const double ratio = s / (s - model.cumulant(t.c.c));
  return 1.0 - ratio * t.Q(k) / (1.0 - lambda) - t.A(k);
}

double upper_passage_lt(const QueueModel& model, double x, int k, double s) {
  return upper_passage_lt(model, resolvent::q_table(model, x, s, k), k);
}

double upper_passage_density(const QueueModel& model,
                             const resolvent::Table& t, int k, double l, int m,
                             double s) {
  if (m < 1) throw std::invalid_argument("upper_passage_density: m must be >= 1");
  return upper_density_impl(model, t, k, l, m, s);
}

double upper_passage_density(const QueueModel& model, double x, int k,
                             double l, int m, double s) {
  return upper_passage_density(model, resolvent::q_table(model, x, s, k), k, l,
                               m, s);
}

double upper_passage_density_msum(const QueueModel& model,
                                  const resolvent::Table& t, int k, double l,
                                  double s) {
  return upper_density_impl(model, t, k, l, 0, s);
}

double upper_passage_density_msum(const QueueModel& model, double x, int k,
                                  double l, double s) {
  return upper_passage_density_msum(model, resolvent::q_table(model, x, s, k),
                                    k, l, s);
}

double expected_upper_density(const QueueModel& model,
                              const resolvent::GeomTables& tables, double l,
                              int m, double s) {
  if (m < 1) throw std::invalid_argument("expected_upper_density: m must be >= 1");
  return expected_density_impl(model, tables, l, m, s);
}

double expected_upper_density_msum(const QueueModel& model,
                                   const resolvent::GeomTables& tables,
                                   double l, double s) {
  return expected_density_impl(model, tables, l, 0, s);
}

double ExitLaw::lower_overshoot_lt(int m) const {
  if (m < 1) throw std::invalid_argument("overshoot index m must be >= 1");
  return lower_lt * (1.0 - lambda) * std::pow(lambda, m - 1);
}

ExitLaw two_sided(const QueueModel& model, double x, int r, int k, double s) {
  if (r < 0 || k < 0) throw std::invalid_argument("two_sided: r, k must be >= 0");
  if (s < 0.0) throw std::invalid_argument("two_sided: s must be >= 0");
  const int B = r + k;
  ExitLaw law;
  law.lambda = model.lambda();

  const resolvent::GeomTables at_zero_s(model, x, 0.0, B);
  law.lower_prob = at_zero_s.at_x().Q(k) / at_zero_s.expectations().eq;
  law.upper_prob = 1.0 - law.lower_prob;

  if (s == 0.0) {
    law.lower_lt = law.lower_prob;
    law.upper_lt = law.upper_prob;
    return law;
  }
  const resolvent::GeomTables g(model, x, s, B);
  law.lower_lt = g.at_x().Q(k) / g.expectations().eq;
  law.upper_lt = 1.0 - g.at_x().A(k) -
                 law.lower_lt * (1.0 - g.expectations().ea);
  return law;
}

double two_sided_upper_density(const QueueModel& model,
                               const resolvent::GeomTables& g, int k, double l,
                               int m, double s) {
  const double ratio = g.at_x().Q(k) / g.expectations().eq;
  return upper_density_impl(model, g.at_x(), k, l, m, s) -
         ratio * expected_density_impl(model, g, l, m, s);
}

double two_sided_upper_density_msum(const QueueModel& model,
                                    const resolvent::GeomTables& g, int k,
                                    double l, double s) {
  const double ratio = g.at_x().Q(k) / g.expectations().eq;
  return upper_density_impl(model, g.at_x(), k, l, 0, s) -
         ratio * expected_density_impl(model, g, l, 0, s);
}

UpperDensityNode upper_density_node(const QueueModel& model,
                                    const resolvent::Table& x_table,
                                    const resolvent::GeomTables& g, int k_cap,
                                    double l, double s) {
  UpperDensityNode node;
  node.fk.assign(k_cap + 1, 0.0);
  if (l < 0.0) return node;
  const ServiceLaw& eta = model.service();
  const double mu = model.mu();
  const double x = x_table.x;
  const resolvent::Table& t0 = g.at_zero();
  const double c = t0.c.c;
  const double sfl = 1.0 - eta.cdf(l);
  if (sfl <= 0.0) return node;
  const int B = g.buffer_b();
  const int n_max = std::max(k_cap, B + g.series_terms());
  const double lambda = g.lambda();

  const std::vector<double> w0 = crossing_kernel(model, l, n_max, 0);
  const double phi_scale =
      std::exp(l * model.cumulant(c)) * model.batch().tail_pgf(c);
  const double base = std::exp(-s * l) * sfl * mu;

  // E f^{delta+B}(0, dl, s): geometric series over the level index.
  {
    std::vector<double> q0w(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) {
      detail::KahanSum acc;
      for (int i = 0; i <= n; ++i) acc.add(t0.Q(i) * w0[n - i]);
      q0w[n] = acc.value();
    }
    detail::KahanSum first, third;
    double weight = 1.0 - lambda;
    for (int i = 1; i <= g.series_terms(); ++i) {
      first.add(weight * w0[B + i]);
      third.add(weight * q0w[B + i]);
      weight *= lambda;
    }
    node.expected = base * (first.value() + g.expectations().eq * phi_scale -
                            third.value());
  }

  // f^k(x, dl, s) for k = 0..k_cap.
  std::vector<double> wx;
  double head_scale = 0.0;
  if (l > x) {
    wx = crossing_kernel(model, l - x, k_cap, 0);
    head_scale = std::exp(-s * (l - x)) * sfl / (1.0 - eta.cdf(x)) * mu;
  }
  for (int k = 0; k <= k_cap; ++k) {
    detail::KahanSum conv;
    for (int i = 0; i <= k; ++i) conv.add(x_table.Q(i) * w0[k - i]);
    double v = x_table.Q(k) * phi_scale * base - base * conv.value();
    if (l > x) v += head_scale * wx[k];
    node.fk[k] = v;
  }
  return node;
}

double sup_joint(const QueueModel& model, double x, int k, int u, double s) {
  if (k < 0) throw std::invalid_argument("sup_joint: k must be >= 0");
  if (u > k) throw std::invalid_argument("sup_joint: u must be <= k");
  if (!(s > 0.0)) throw std::invalid_argument("sup_joint: s must be > 0");
  const resolvent::Table t = resolvent::q_table(model, x, s, k);
  const double lambda = model.lambda();
  const double factor = s / (1.0 - lambda) / (s - model.cumulant(t.c.c));
  return t.A(u) + factor * std::pow(t.c.c, k - u) * t.Q(k);
}

double trivariate(const QueueModel& /*model*/, const resolvent::GeomTables& g,
                  int r, int k, int u) {
  if (u < -r || u > k)
    throw std::invalid_argument("trivariate: u must lie in [-r, k]");
  if (r + k != g.buffer_b())
    throw std::invalid_argument("trivariate: tables built for a different B");
  const double ratio = g.at_x().Q(k) / g.expectations().eq;
  return g.at_x().A(u) - ratio * g.ea_shift(r + u);
}

double trivariate(const QueueModel& model, double x, int r, int k, int u,
                  double s) {
  if (!(s > 0.0)) throw std::invalid_argument("trivariate: s must be > 0");
  const resolvent::GeomTables g(model, x, s, r + k);
  return trivariate(model, g, r, k, u);
}

}  // namespace batchq::exit_problem
