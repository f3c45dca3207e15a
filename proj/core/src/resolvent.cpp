#include "batchq/resolvent.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "batchq/compound_poisson.hpp"
#include "batchq/detail/kahan.hpp"

namespace batchq::resolvent {

namespace {

constexpr double kOverflowGuard = 1e290;

// rho~_k(s) rows enter A_x^k; at s = 0 they vanish identically.
std::vector<double> lt_row_or_zero(const QueueModel& model, double s, int k_max) {
  if (s == 0.0) return std::vector<double>(k_max + 1, 0.0);
  return compound_poisson::lt_row(model, s, k_max);
}

}  // namespace

double Table::Q(int k) const {
  if (k < 0) return 0.0;
  if (k > k_max()) throw std::out_of_range("resolvent::Table::Q index");
  return q[k];
}

double Table::S(int k) const {
  if (k < 0) return 0.0;
  if (k > k_max()) throw std::out_of_range("resolvent::Table::S index");
  return ssum[k];
}

double Table::A(int k) const {
  if (k < 0) return 0.0;
  if (k > k_max()) throw std::out_of_range("resolvent::Table::A index");
  return a[k];
}

Table q_table(const QueueModel& model, double x, double s, int k_max) {
  if (k_max < 0) throw std::invalid_argument("q_table: k_max must be >= 0");
  if (s < 0.0) throw std::invalid_argument("q_table: s must be >= 0");
  model.service().require_age(x);

  Table t;
  t.s = s;
  t.x = x;
  t.c = root::solve_c(model, s);

  const double lambda = model.lambda();
  const double om = 1.0 - lambda;
  const std::vector<double> fx = compound_poisson::mixed_coeffs(model, x, s, k_max);
  const std::vector<double> f0 =
      (x == 0.0) ? fx : compound_poisson::mixed_coeffs(model, 0.0, s, k_max);
  const double denom = lambda + om * f0[0];

  t.q.assign(k_max + 1, 0.0);
  t.ssum.assign(k_max + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    detail::KahanSum acc;
    acc.add(om * fx[k]);
    if (k > 0) acc.add(t.q[k - 1]);
    for (int i = 0; i < k; ++i) acc.add(-om * t.q[i] * f0[k - i]);
    t.q[k] = acc.value() / denom;
    if (!(std::abs(t.q[k]) < kOverflowGuard))
      throw std::overflow_error(
          "resolvent overflow: Q_k exceeds the double range (c(s) too small "
          "for the requested k)");
    t.ssum[k] = (k > 0 ? t.ssum[k - 1] : 0.0) + t.q[k];
  }

  const std::vector<double> rho = lt_row_or_zero(model, s, k_max);
  t.a.assign(k_max + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    detail::KahanSum acc;
    for (int i = 0; i <= k; ++i) acc.add(rho[i] * (1.0 - t.q[k - i] / om));
    t.a[k] = acc.value();
  }
  return t;
}

double q_contour(const QueueModel& model, double x, double s, int k,
                 double alpha, int n_points) {
  if (k < 0) throw std::invalid_argument("q_contour: k must be >= 0");
  if (n_points < 64 || (n_points & (n_points - 1)) != 0)
    throw std::invalid_argument("q_contour: n_points must be a power of two >= 64");
  const root::RootValue c = root::solve_c(model, s);
  if (!(alpha > 0.0 && alpha < c.c))
    throw std::invalid_argument("q_contour: radius too large (pole enclosed)");
  model.service().require_age(x);

  const double lambda = model.lambda();
  const double om = 1.0 - lambda;
  const ServiceLaw& eta = model.service();
  detail::KahanSum re;
  for (int j = 0; j < n_points; ++j) {
    const double phi = 2.0 * M_PI * j / n_points;
    const std::complex<double> theta = std::polar(alpha, phi);
    const std::complex<double> arg = s - model.cumulant(theta);
    const std::complex<double> gen =
        om * eta.residual_lt(x, arg) / (om * eta.lt(arg) + lambda - theta);
    // 1/theta^k factor folded into the Fourier weight.
    re.add((gen * std::polar(1.0, -phi * k)).real());
  }
  return re.value() / (n_points * std::pow(alpha, k));
}

double q_contour_auto(const QueueModel& model, double x, double s, int k) {
  const root::RootValue c = root::solve_c(model, s);
  const double alpha = 0.9 * c.c;
  int n = 1024;
  double prev = q_contour(model, x, s, k, alpha, n);
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    const double cur = q_contour(model, x, s, k, alpha, n);
    if (std::abs(cur - prev) < 1e-11) return cur;
    prev = cur;
  }
  return prev;
}

GeomTables::GeomTables(const QueueModel& model, double x, double s,
                       int buffer_b, int x_k_max)
    : buffer_b_(buffer_b), lambda_(model.lambda()) {
  if (buffer_b < 0) throw std::invalid_argument("GeomTables: B must be >= 0");
  const root::RootValue c = root::solve_c(model, s);
  const double ratio = lambda_ / c.c;

  int terms = 1;
  if (lambda_ > 0.0) {
    // N such that ratio^N * safety / (1 - ratio) < 1e-13.
    const double target = std::log(1e-13 * (1.0 - ratio) / 10.0);
    terms = static_cast<int>(std::ceil(target / std::log(ratio))) + 4;
    terms = std::max(terms, 8);
    if (terms > 200000)
      throw std::runtime_error("geometric series truncation index exceeds cap");
  }
  terms_ = terms;

  const int zero_k_max = buffer_b + terms + 1;
  at_zero_ = q_table(model, 0.0, s, zero_k_max);
  const int want_x = (x_k_max >= 0) ? x_k_max : buffer_b + 1;
  if (x == 0.0 && want_x <= zero_k_max) {
    at_x_ = at_zero_;
  } else {
    at_x_ = q_table(model, x, s, std::max(want_x, buffer_b + 1));
  }

  // E Q^s_{delta+B}, E S^s_{delta+B-1}, E A_0^{delta+B}.
  detail::KahanSum eq, es, ea;
  double weight = 1.0 - lambda_;  // (1-lambda) lambda^{i-1}
  double last_eq_term = 0.0;
  for (int i = 1; i <= terms_; ++i) {
    last_eq_term = weight * at_zero_.Q(buffer_b_ + i);
    eq.add(last_eq_term);
    es.add(weight * at_zero_.S(buffer_b_ + i - 1));
    ea.add(weight * at_zero_.A(buffer_b_ + i));
    weight *= lambda_;
  }
  ge_.eq = eq.value();
  ge_.es = es.value();
  ge_.ea = ea.value();
  ge_.terms = terms_;
  ge_.truncation_bound =
      (lambda_ > 0.0 && ratio < 1.0)
          ? std::abs(last_eq_term) * ratio / (1.0 - ratio) * 10.0
          : 0.0;
}

double GeomTables::ea_shift(int shift) const {
  if (shift < 0) throw std::invalid_argument("ea_shift: shift must be >= 0");
  detail::KahanSum acc;
  double weight = 1.0 - lambda_;
  const int cap = std::min(terms_, at_zero_.k_max() - shift);
  if (cap < 1) throw std::out_of_range("ea_shift: shift beyond stored table");
  for (int i = 1; i <= cap; ++i) {
    acc.add(weight * at_zero_.A(shift + i));
    weight *= lambda_;
  }
  return acc.value();
}

double GeomTables::es_shift(int shift) const {
  detail::KahanSum acc;
  double weight = 1.0 - lambda_;
  const int cap = std::min(terms_, at_zero_.k_max() - shift);
  if (cap < 1) throw std::out_of_range("es_shift: shift beyond stored table");
  for (int i = 1; i <= cap; ++i) {
    acc.add(weight * at_zero_.S(shift + i - 1));
    weight *= lambda_;
  }
  return acc.value();
}

GeomExpectations geom_expectations(const QueueModel& model, double s,
                                   int buffer_b) {
  return GeomTables(model, 0.0, s, buffer_b).expectations();
}

}  // namespace batchq::resolvent
