#include "batchq/reflected.hpp"

#include <cmath>
#include <stdexcept>

#include "batchq/detail/kahan.hpp"
#include "batchq/quadrature.hpp"

namespace batchq::reflected {

namespace {

std::vector<double> density_breaks(const QueueModel& model, double from) {
  const ServiceLaw& eta = model.service();
  const double hi = std::min(eta.support_end(), eta.quantile(1.0 - 1e-12));
  return eta.density_breakpoints(from, hi);
}

}  // namespace

double exit_service_weight(const QueueModel& model,
                           const resolvent::Table& x_table,
                           const resolvent::GeomTables& tables, int k,
                           double s, double quad_tol) {
  if (k < 0) throw std::invalid_argument("exit_service_weight: k must be >= 0");
  const ServiceLaw& eta = model.service();
  auto integrand = [&](double l) {
    if (1.0 - eta.cdf(l) <= 1e-14) return 0.0;
    const exit_problem::UpperDensityNode node =
        exit_problem::upper_density_node(model, x_table, tables, k, l, s);
    const double ratio = x_table.Q(k) / tables.expectations().eq;
    return (node.fk[k] - ratio * node.expected) * eta.residual_lt(l, s);
  };
  return quadrature::adaptive(integrand, density_breaks(model, 0.0), quad_tol);
}

double passage_general(const QueueModel& model,
                       const std::vector<double>& delta_pmf, double x, int r,
                       int buffer_b, int m, double s, double quad_tol) {
  if (r < 0 || r > buffer_b)
    throw std::invalid_argument("passage_general: r must lie in [0, B]");
  if (m < 1) throw std::invalid_argument("passage_general: m must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("passage_general: s must be > 0");
  if (delta_pmf.empty())
    throw std::invalid_argument("passage_general: delta pmf is empty");

  const int B = buffer_b;
  const int k = B - r;
  const double lambda = model.lambda();
  const resolvent::GeomTables g(model, x, s, B);
  const double eq = g.expectations().eq;
  auto pdelta = [&](int n) {
    return (n >= 1 && n <= static_cast<int>(delta_pmf.size()))
               ? delta_pmf[n - 1]
               : 0.0;
  };

  // V_r(x, m, s) and V_{B-i}(0, m, s): two-sided exit closed forms.
  const double geo_m = (1.0 - lambda) * std::pow(lambda, m - 1);
  const double v_r = g.at_x().Q(k) / eq * geo_m;

  // a^{B-r}(x) and a^i(0), i = 1..B, in one vector quadrature: the node
  // kernels are shared across the level index.
  const ServiceLaw& eta = model.service();
  const int k_cap = B;
  auto node_vec = [&](double l) {
    std::vector<double> out(2 * (k_cap + 1), 0.0);
    if (1.0 - eta.cdf(l) <= 1e-14) return out;
    const double w = eta.residual_lt(l, s);
    const exit_problem::UpperDensityNode nx =
        exit_problem::upper_density_node(model, g.at_x(), g, k_cap, l, s);
    for (int i = 0; i <= k_cap; ++i)
      out[i] = (nx.fk[i] - g.at_x().Q(i) / eq * nx.expected) * w;
    const exit_problem::UpperDensityNode n0 =
        exit_problem::upper_density_node(model, g.at_zero(), g, k_cap, l, s);
    for (int i = 0; i <= k_cap; ++i)
      out[k_cap + 1 + i] =
          (n0.fk[i] - g.at_zero().Q(i) / eq * n0.expected) * w;
    return out;
  };
  const std::vector<double> a_all = quadrature::adaptive_vector(
      node_vec, 2 * (k_cap + 1), density_breaks(model, 0.0), quad_tol);

  const double a_x = a_all[k];
  detail::KahanSum a0;
  for (int i = 1; i <= B; ++i) a0.add(pdelta(i) * a_all[k_cap + 1 + i]);
  const double one_minus_a0 = 1.0 - a0.value();

  detail::KahanSum bracket;
  bracket.add(pdelta(m + B));
  for (int i = 1; i <= B; ++i) {
    const double v_bi = g.at_zero().Q(i) / eq * geo_m;
    bracket.add(pdelta(i) * v_bi);
  }
  return v_r + a_x / one_minus_a0 * bracket.value();
}

double passage_lt(const QueueModel& model, double x, int r, int buffer_b,
                  double s) {
  if (r < 0 || r > buffer_b)
    throw std::invalid_argument("passage_lt: r must lie in [0, B]");
  if (s < 0.0) throw std::invalid_argument("passage_lt: s must be >= 0");
  const resolvent::GeomTables g(model, x, s, buffer_b);
  const double fs = model.service().lt(s);
  const double fx = model.service().residual_lt(x, s);
  const double num = fx + (1.0 - fs) * g.at_x().S(buffer_b - r - 1);
  const double den = fs + (1.0 - fs) * g.expectations().es;
  return num / den;
}

double passage_mean(const QueueModel& model, double x, int r, int buffer_b) {
  if (r < 0 || r > buffer_b)
    throw std::invalid_argument("passage_mean: r must lie in [0, B]");
  const resolvent::GeomTables g(model, x, 0.0, buffer_b);
  const double eh = model.service().mean();
  const double ehx = model.service().residual_mean(x);
  return ehx - eh + eh * (g.expectations().es - g.at_x().S(buffer_b - r - 1));
}

double increments(const QueueModel& model, double x, int k, int u, double s) {
  if (k < 0) throw std::invalid_argument("increments: k must be >= 0");
  if (u > k) throw std::invalid_argument("increments: u must be <= k");
  if (u == k) return 1.0;
  if (!(s > 0.0)) throw std::invalid_argument("increments: s must be > 0");
  const resolvent::Table t = resolvent::q_table(model, x, s, k);
  const double lambda = model.lambda();
  const double c = t.c.c;
  const double fs = model.service().lt(s);
  const double fx = model.service().residual_lt(x, s);
  const double big_f =
      s * (1.0 - c) / ((1.0 - lambda) * (s - model.cumulant(c)));
  return t.A(u) +
         std::pow(c, k - u - 1) * big_f * (fx / (1.0 - fs) + t.S(k - 1));
}

double ergodic(const QueueModel& model, int k, int u) {
  if (model.rho() <= 1.0)
    throw std::domain_error("no ergodic reflected law (c = 1 when rho <= 1)");
  if (u > k - 1) throw std::invalid_argument("ergodic: u must be <= k-1");
  const double c = root::solve_c(model, 0.0).c;
  const double ek = model.batch().mean();
  const double factor = (1.0 - c) / (1.0 - model.batch().pgf(c));
  return ek / model.rho() * factor * std::pow(c, k - u - 1);
}

double two_sided(const QueueModel& model, double x, int r, int k, int u,
                 double s) {
  if (r < 0 || k < 0) throw std::invalid_argument("two_sided: r, k must be >= 0");
  if (u < -r || u > k)
    throw std::invalid_argument("two_sided: u must lie in [-r, k]");
  if (!(s > 0.0)) throw std::invalid_argument("two_sided: s must be > 0");
  const int B = k + r;
  const resolvent::GeomTables g(model, x, s, B);
  const double fs = model.service().lt(s);
  const double fx = model.service().residual_lt(x, s);
  const double ratio = (fx + (1.0 - fs) * g.at_x().S(k - 1)) /
                       (fs + (1.0 - fs) * g.expectations().es);
  if (u == k) return 1.0 - ratio;
  return g.at_x().A(u) - ratio * g.ea_shift(u + r);
}

}  // namespace batchq::reflected
