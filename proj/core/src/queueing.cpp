#include "batchq/queueing.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "batchq/compound_poisson.hpp"
#include "batchq/detail/kahan.hpp"

namespace batchq::queueing {

namespace {

void validate_state(const QueueModel& model, const SystemState& st) {
  if (st.r < 0 || st.r > model.buffer() + 1)
    throw std::invalid_argument("state.r must lie in 0..B+1");
  if (st.r == 0 && st.x != 0.0)
    throw std::invalid_argument("state (0, x) requires x == 0");
  model.service().require_age(st.x);
}

}  // namespace

// Per-s age-0 data shared by every (r, x) evaluation at that s.
struct System::SData {
  double s = 0.0;
  resolvent::GeomTables g0;
  double fs = 0.0;        // f~(s)
  double btilde = 0.0;    // a-hat_B b^s_{B+1}(0) + sum a_i b^s_i(0)
  double count_den = 0.0; // s + mu - mu btilde
  double loss_bracket = 0.0;  // ratio shared by every first-loss state

  SData(const QueueModel& model, double s_in)
      : s(s_in), g0(model, 0.0, s_in, model.buffer(), model.buffer() + 1) {
    const int B = model.buffer();
    const BatchLaw& a = model.batch();
    const double mu = model.mu();
    fs = model.service().lt(s);
    const double den_busy = fs + (1.0 - fs) * g0.expectations().es;

    auto busy0 = [&](int r) {
      return (fs + (1.0 - fs) * g0.at_zero().S(B - r)) / den_busy;
    };
    detail::KahanSum bt;
    bt.add(a.tail(B) * busy0(B + 1));
    for (int i = 1; i <= B; ++i) bt.add(a.pmf(i) * busy0(i));
    btilde = bt.value();
    count_den = s + mu - mu * btilde;

    // Shared first-loss bracket:
    //   [E A_0^{d+B} - mu/(s+mu) A~ - s/(s+mu)] / [E Q_{d+B} - mu/(s+mu) Q~].
    detail::KahanSum qt, at;
    for (int i = 1; i <= B + 1; ++i) {
      qt.add(a.pmf(i) * g0.at_zero().Q(B + 1 - i));
      at.add(a.pmf(i) * g0.at_zero().A(B + 1 - i));
    }
    const double w = mu / (s + mu);
    loss_bracket =
        (g0.expectations().ea - w * at.value() - s / (s + mu)) /
        (g0.expectations().eq - w * qt.value());
  }
};

System::System(QueueModel model) : model_(std::move(model)) {}

std::shared_ptr<const System::SData> System::sdata(double s) const {
  {
    std::shared_lock lock(cache_mu_);
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
  }
  auto data = std::make_shared<const SData>(model_, s);
  std::unique_lock lock(cache_mu_);
  return cache_.try_emplace(s, std::move(data)).first->second;
}

double System::busy_period_lt(const SystemState& state, double s) const {
  validate_state(model_, state);
  if (state.r < 1)
    throw std::invalid_argument("busy_period: r must be >= 1 (no busy period)");
  if (s < 0.0) throw std::invalid_argument("busy_period: s must be >= 0");
  if (s == 0.0) return 1.0;  // proper for every finite buffer
  const int B = model_.buffer();
  const auto data = sdata(s);
  const resolvent::Table tx =
      (state.x == 0.0) ? data->g0.at_x()
                       : resolvent::q_table(model_, state.x, s, B + 1);
  const double fx = model_.service().residual_lt(state.x, s);
  const double num = fx + (1.0 - data->fs) * tx.S(B - state.r);
  const double den = data->fs + (1.0 - data->fs) * data->g0.expectations().es;
  return num / den;
}

double System::busy_period_mean(const SystemState& state) const {
  validate_state(model_, state);
  if (state.r < 1)
    throw std::invalid_argument("busy_period: r must be >= 1 (no busy period)");
  const int B = model_.buffer();
  const auto data = sdata(0.0);
  const resolvent::Table tx =
      (state.x == 0.0) ? data->g0.at_x()
                       : resolvent::q_table(model_, state.x, 0.0, B + 1);
  const double eh = model_.service().mean();
  const double ehx = model_.service().residual_mean(state.x);
  return ehx - eh + eh * (data->g0.expectations().es - tx.S(B - state.r));
}

double System::first_loss_lt(const SystemState& state, double s) const {
  validate_state(model_, state);
  if (!(s > 0.0)) throw std::invalid_argument("first_loss: s must be > 0");
  const int B = model_.buffer();
  const auto data = sdata(s);
  if (state.r == 0) {
    return 1.0 - data->g0.expectations().ea +
           data->g0.expectations().eq * data->loss_bracket;
  }
  const int k = B + 1 - state.r;
  const resolvent::Table tx =
      (state.x == 0.0) ? data->g0.at_x()
                       : resolvent::q_table(model_, state.x, s, B + 1);
  return 1.0 - tx.A(k) + tx.Q(k) * data->loss_bracket;
}

double System::first_loss_mean(const SystemState& state, double s_fd) const {
  const double h = 0.5 * s_fd;
  const double lo = first_loss_lt(state, s_fd - h);
  const double hi = first_loss_lt(state, s_fd + h);
  return -(hi - lo) / (2.0 * h);
}

double System::first_loss_joint_pgf(const SystemState& state, double s,
                                    double z) const {
  validate_state(model_, state);
  if (model_.lambda() != 0.0)
    throw std::invalid_argument(
        "joint loss law implemented only for delta == 1 (lambda = 0)");
  if (!(s > 0.0)) throw std::invalid_argument("first_loss_joint: s must be > 0");
  if (std::abs(z) > 1.0 + 1e-12)
    throw std::invalid_argument("first_loss_joint: |z| must be <= 1");
  const int B = model_.buffer();
  const int k = B + 1 - state.r;
  const double mu = model_.mu();
  const BatchLaw& a = model_.batch();
  const auto data = sdata(s);
  const resolvent::Table& t0 = data->g0.at_zero();
  const resolvent::Table tx =
      (state.x == 0.0) ? data->g0.at_x()
                       : resolvent::q_table(model_, state.x, s, B + 1);

  detail::KahanSum head;
  for (int i = 0; i <= k; ++i)
    head.add(a.shifted_pgf(i, z) * (tx.A(k - i) - tx.A(k - i - 1)));

  detail::KahanSum body;
  for (int i = 0; i <= B + 1; ++i)
    body.add(a.shifted_pgf(i, z) * (t0.Q(B + 1 - i) - t0.Q(B - i)));

  detail::KahanSum qt;
  for (int i = 1; i <= B + 1; ++i) qt.add(a.pmf(i) * t0.Q(B + 1 - i));
  const double den = s + mu - mu * qt.value() / t0.Q(B + 1);

  return mu / s * head.value() +
         mu * (tx.Q(k) / t0.Q(B + 1)) * body.value() / den;
}

double System::first_loss_count_coeff(const SystemState& state, double s,
                                      int n) const {
  validate_state(model_, state);
  if (model_.lambda() != 0.0)
    throw std::invalid_argument(
        "joint loss law implemented only for delta == 1 (lambda = 0)");
  if (n < 1) throw std::invalid_argument("first_loss_count: n must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("first_loss_count: s must be > 0");
  const int B = model_.buffer();
  const int k = B + 1 - state.r;
  const double mu = model_.mu();
  const BatchLaw& a = model_.batch();
  const auto data = sdata(s);
  const resolvent::Table& t0 = data->g0.at_zero();
  const resolvent::Table tx =
      (state.x == 0.0) ? data->g0.at_x()
                       : resolvent::q_table(model_, state.x, s, B + 1);

  detail::KahanSum head;
  for (int i = 0; i <= k; ++i)
    head.add(a.pmf(n + i) * (tx.A(k - i) - tx.A(k - i - 1)));

  detail::KahanSum body;
  for (int i = 0; i <= B + 1; ++i)
    body.add(a.pmf(n + i) * (t0.Q(B + 1 - i) - t0.Q(B - i)));

  detail::KahanSum qt;
  for (int i = 1; i <= B + 1; ++i) qt.add(a.pmf(i) * t0.Q(B + 1 - i));
  const double den = s + mu - mu * qt.value() / t0.Q(B + 1);

  return mu / s * head.value() +
         mu * (tx.Q(k) / t0.Q(B + 1)) * body.value() / den;
}

std::vector<double> System::first_loss_count_pmf(const SystemState& state,
                                                 int n_max, double s) const {
  std::vector<double> pmf;
  pmf.reserve(n_max);
  for (int n = 1; n <= n_max; ++n)
    pmf.push_back(first_loss_count_coeff(state, s, n));
  return pmf;
}

TransientValue System::transient_with_table(const SData& data,
                                            const resolvent::Table& tx,
                                            const SystemState& state, int u,
                                            double s) const {
  const int B = model_.buffer();
  const double mu = model_.mu();
  const double lambda = model_.lambda();
  const resolvent::Table& t0 = data.g0.at_zero();

  const double b_rx =
      (state.r == 0)
          ? 1.0
          : (model_.service().residual_lt(state.x, s) +
             (1.0 - data.fs) * tx.S(B - state.r)) /
                (data.fs + (1.0 - data.fs) * data.g0.expectations().es);
  const double empt = s / data.count_den;  // q^s_{0,0}(0)

  TransientValue out;
  out.u = u;
  if (u == 0) {
    out.raw = empt * b_rx;
    out.cdf = out.raw;
    return out;
  }
  if (u == B + 1) {
    out.raw = 1.0 - empt * b_rx;
    out.cdf = out.raw + empt * b_rx;  // == 1 identically
    return out;
  }
  const double c_u = s * t0.Q(u) / (1.0 - lambda) - s +
                     lambda * (s + mu) * (t0.A(u) - data.g0.ea_shift(u));
  const double raw = (state.r == 0)
                         ? data.g0.ea_shift(u - 1) + c_u / data.count_den
                         : tx.A(u - state.r) + b_rx * c_u / data.count_den;
  out.raw = raw;
  out.cdf = raw + empt * b_rx;
  return out;
}

TransientValue System::transient(const SystemState& state, int u,
                                 double s) const {
  validate_state(model_, state);
  if (u < 0 || u > model_.buffer() + 1)
    throw std::invalid_argument("transient: u must lie in 0..B+1");
  if (!(s > 0.0)) throw std::invalid_argument("transient: s must be > 0");
  const auto data = sdata(s);
  const resolvent::Table tx =
      (state.x == 0.0)
          ? data->g0.at_x()
          : resolvent::q_table(model_, state.x, s, model_.buffer() + 1);
  return transient_with_table(*data, tx, state, u, s);
}

std::vector<TransientValue> System::transient_row(const SystemState& state,
                                                  double s) const {
  validate_state(model_, state);
  if (!(s > 0.0)) throw std::invalid_argument("transient: s must be > 0");
  const auto data = sdata(s);
  const resolvent::Table tx =
      (state.x == 0.0)
          ? data->g0.at_x()
          : resolvent::q_table(model_, state.x, s, model_.buffer() + 1);
  std::vector<TransientValue> row;
  row.reserve(model_.buffer() + 2);
  for (int u = 0; u <= model_.buffer() + 1; ++u)
    row.push_back(transient_with_table(*data, tx, state, u, s));
  return row;
}

std::vector<double> System::stationary() const {
  const int B = model_.buffer();
  const double mu = model_.mu();
  const double lambda = model_.lambda();
  const BatchLaw& a = model_.batch();
  const double eh = model_.service().mean();

  const resolvent::GeomTables g0(model_, 0.0, 0.0, B);
  const resolvent::Table& t0 = g0.at_zero();
  const int terms = g0.series_terms();

  // Occupation-measure limits: A_0^u = sum_i rho_i [1 - Q_{u-i}/(1-lambda)],
  // rho_i the expected time pi(t) spends at level i.
  const int top = B + terms + 1;
  const std::vector<double> occ = compound_poisson::occupation_row(model_, top);
  std::vector<double> a0(top + 1, 0.0);
  for (int u = 0; u <= top; ++u) {
    detail::KahanSum acc;
    for (int i = 0; i <= u; ++i)
      acc.add(occ[i] * (1.0 - t0.Q(u - i) / (1.0 - lambda)));
    a0[u] = acc.value();
  }
  auto ea0_shift = [&](int shift) {
    detail::KahanSum acc;
    double weight = 1.0 - lambda;
    for (int i = 1; i <= terms && shift + i <= top; ++i) {
      acc.add(weight * a0[shift + i]);
      weight *= lambda;
    }
    return acc.value();
  };

  auto c_of = [&](int u) {
    if (u == 0) return 0.0;
    return t0.Q(u) / (1.0 - lambda) - 1.0 +
           lambda * mu * (a0[u] - ea0_shift(u));
  };

  detail::KahanSum hat_sum;
  for (int i = 0; i <= B; ++i) hat_sum.add(a.tail(i) * t0.Q(B - i));
  const double pi0 =
      1.0 / (1.0 + mu * eh * (lambda / (1.0 - lambda) * g0.expectations().eq +
                              hat_sum.value()));

  std::vector<double> pi(B + 2, 0.0);
  pi[0] = pi0;
  double prev_c = 0.0;
  for (int i = 1; i <= B; ++i) {
    const double ci = c_of(i);
    pi[i] = pi0 * (ci - prev_c);
    prev_c = ci;
  }
  pi[B + 1] = 1.0 - pi0 * (1.0 + prev_c);  // prev_c == C_B (C_0 = 0)
  return pi;
}

}  // namespace batchq::queueing
