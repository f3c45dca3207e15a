#include "batchq/service_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "batchq/quadrature.hpp"

namespace batchq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double u01(std::mt19937_64& rng) {
  // 53-bit uniform in (0,1); avoids implementation-defined distributions.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_exp(double rate, std::mt19937_64& rng) {
  return -std::log(u01(rng)) / rate;
}

}  // namespace

struct ServiceLaw::Impl {
  virtual ~Impl() = default;
  virtual Family family() const = 0;
  virtual double cdf(double x) const = 0;
  virtual double pdf(double t) const = 0;
  virtual std::complex<double> lt(std::complex<double> s) const = 0;
  virtual std::complex<double> residual_lt(double x,
                                           std::complex<double> s) const = 0;
  virtual double mean() const = 0;
  virtual double second_moment() const = 0;
  virtual double residual_mean(double x) const = 0;
  virtual double quantile(double p) const = 0;
  virtual double support_end() const = 0;
  virtual double sample(std::mt19937_64& rng) const = 0;
  virtual double sample_residual(double x, std::mt19937_64& rng) const = 0;
  virtual ResidualPhases residual_phases(double /*x*/) const {
    throw std::logic_error("residual_phases: not a phase-type family");
  }
  virtual std::vector<double> density_breakpoints(double lo, double hi) const {
    return {lo, hi};
  }
};

namespace {

// ---------------------------------------------------------------------------
class Exponential final : public ServiceLaw::Impl {
 public:
  explicit Exponential(double rate) : rate_(rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("service.rate must be > 0");
  }
  ServiceLaw::Family family() const override {
    return ServiceLaw::Family::kExponential;
  }
  double cdf(double x) const override { return x <= 0 ? 0.0 : -std::expm1(-rate_ * x); }
  double pdf(double t) const override { return t < 0 ? 0.0 : rate_ * std::exp(-rate_ * t); }
  std::complex<double> lt(std::complex<double> s) const override {
    return rate_ / (rate_ + s);
  }
  std::complex<double> residual_lt(double, std::complex<double> s) const override {
    return lt(s);  // memoryless
  }
  double mean() const override { return 1.0 / rate_; }
  double second_moment() const override { return 2.0 / (rate_ * rate_); }
  double residual_mean(double) const override { return 1.0 / rate_; }
  double quantile(double p) const override { return -std::log1p(-p) / rate_; }
  double support_end() const override { return kInf; }
  double sample(std::mt19937_64& rng) const override { return sample_exp(rate_, rng); }
  double sample_residual(double, std::mt19937_64& rng) const override {
    return sample_exp(rate_, rng);
  }
  ServiceLaw::ResidualPhases residual_phases(double) const override {
    return {{1.0}, {1}, {rate_}};
  }

 private:
  double rate_;
};

// ---------------------------------------------------------------------------
class Erlang final : public ServiceLaw::Impl {
 public:
  Erlang(int shape, double rate) : shape_(shape), rate_(rate) {
    if (shape < 1) throw std::invalid_argument("service.shape must be >= 1");
    if (!(rate > 0.0)) throw std::invalid_argument("service.rate must be > 0");
  }
  ServiceLaw::Family family() const override { return ServiceLaw::Family::kErlang; }
  double cdf(double x) const override {
    if (x <= 0) return 0.0;
    // 1 - exp(-r x) sum_{j<n} (r x)^j / j!
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < shape_; ++j) {
      term *= rate_ * x / j;
      sum += term;
    }
    return -std::expm1(-rate_ * x + std::log(sum));
  }
  double pdf(double t) const override {
    if (t < 0) return 0.0;
    double logp = shape_ * std::log(rate_) + (shape_ - 1) * std::log(std::max(t, 1e-300)) -
                  rate_ * t - std::lgamma(shape_);
    return std::exp(logp);
  }
  std::complex<double> lt(std::complex<double> s) const override {
    return std::pow(rate_ / (rate_ + s), shape_);
  }
  std::complex<double> residual_lt(double x, std::complex<double> s) const override {
    const std::vector<double> w = phase_weights(x);
    std::complex<double> acc = 0.0;
    const std::complex<double> base = rate_ / (rate_ + s);
    for (int j = 0; j < shape_; ++j) acc += w[j] * std::pow(base, shape_ - j);
    return acc;
  }
  double mean() const override { return shape_ / rate_; }
  double second_moment() const override {
    return shape_ * (shape_ + 1.0) / (rate_ * rate_);
  }
  double residual_mean(double x) const override {
    const std::vector<double> w = phase_weights(x);
    double acc = 0.0;
    for (int j = 0; j < shape_; ++j) acc += w[j] * (shape_ - j) / rate_;
    return acc;
  }
  double quantile(double p) const override {
    if (p <= 0) return 0.0;
    double hi = mean();
    while (cdf(hi) < p) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  double support_end() const override { return kInf; }
  double sample(std::mt19937_64& rng) const override {
    double acc = 0.0;
    for (int j = 0; j < shape_; ++j) acc += sample_exp(rate_, rng);
    return acc;
  }
  double sample_residual(double x, std::mt19937_64& rng) const override {
    const std::vector<double> w = phase_weights(x);
    double u = u01(rng);
    int j = 0;
    for (; j + 1 < shape_; ++j) {
      if (u < w[j]) break;
      u -= w[j];
    }
    double acc = 0.0;
    for (int i = 0; i < shape_ - j; ++i) acc += sample_exp(rate_, rng);
    return acc;
  }
  ServiceLaw::ResidualPhases residual_phases(double x) const override {
    ServiceLaw::ResidualPhases ph;
    ph.weights = phase_weights(x);
    for (int j = 0; j < shape_; ++j) {
      ph.shapes.push_back(shape_ - j);
      ph.rates.push_back(rate_);
    }
    return ph;
  }

 private:
  // P[j phases completed | age x], j = 0..shape-1. Computed in log space so
  // large rate*x ages cannot overflow the unnormalized terms.
  std::vector<double> phase_weights(double x) const {
    std::vector<double> lw(shape_);
    const double ly = (x > 0.0) ? std::log(rate_ * x) : -1e300;
    double top = -1e300;
    for (int j = 0; j < shape_; ++j) {
      lw[j] = (j == 0) ? 0.0 : j * ly - std::lgamma(j + 1.0);
      top = std::max(top, lw[j]);
    }
    double sum = 0.0;
    std::vector<double> w(shape_);
    for (int j = 0; j < shape_; ++j) sum += (w[j] = std::exp(lw[j] - top));
    for (double& v : w) v /= sum;
    return w;
  }
  int shape_;
  double rate_;
};

// ---------------------------------------------------------------------------
class Hyperexponential final : public ServiceLaw::Impl {
 public:
  Hyperexponential(std::vector<double> w, std::vector<double> r)
      : w_(std::move(w)), r_(std::move(r)) {
    if (w_.empty() || w_.size() != r_.size())
      throw std::invalid_argument("service.weights/rates size mismatch");
    double tot = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) {
      if (!(w_[i] >= 0.0)) throw std::invalid_argument("service.weights must be >= 0");
      if (!(r_[i] > 0.0)) throw std::invalid_argument("service.rates must be > 0");
      tot += w_[i];
    }
    if (std::abs(tot - 1.0) > 1e-12)
      throw std::invalid_argument("service.weights not normalized");
  }
  ServiceLaw::Family family() const override {
    return ServiceLaw::Family::kHyperexponential;
  }
  double cdf(double x) const override {
    if (x <= 0) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) acc += w_[i] * -std::expm1(-r_[i] * x);
    return acc;
  }
  double pdf(double t) const override {
    if (t < 0) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) acc += w_[i] * r_[i] * std::exp(-r_[i] * t);
    return acc;
  }
  std::complex<double> lt(std::complex<double> s) const override {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) acc += w_[i] * r_[i] / (r_[i] + s);
    return acc;
  }
  std::complex<double> residual_lt(double x, std::complex<double> s) const override {
    const std::vector<double> w = aged_weights(x);
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] * r_[i] / (r_[i] + s);
    return acc;
  }
  double mean() const override {
    double acc = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) acc += w_[i] / r_[i];
    return acc;
  }
  double second_moment() const override {
    double acc = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) acc += 2.0 * w_[i] / (r_[i] * r_[i]);
    return acc;
  }
  double residual_mean(double x) const override {
    const std::vector<double> w = aged_weights(x);
    double acc = 0.0;
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] / r_[i];
    return acc;
  }
  double quantile(double p) const override {
    if (p <= 0) return 0.0;
    double hi = mean();
    while (cdf(hi) < p) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  double support_end() const override { return kInf; }
  double sample(std::mt19937_64& rng) const override {
    return sample_from(w_, rng);
  }
  double sample_residual(double x, std::mt19937_64& rng) const override {
    return sample_from(aged_weights(x), rng);
  }
  ServiceLaw::ResidualPhases residual_phases(double x) const override {
    ServiceLaw::ResidualPhases ph;
    ph.weights = aged_weights(x);
    ph.shapes.assign(w_.size(), 1);
    ph.rates = r_;
    return ph;
  }

 private:
  std::vector<double> aged_weights(double x) const {
    // factor out the slowest component so extreme ages cannot underflow to
    // an all-zero weight vector
    const double r_min = *std::min_element(r_.begin(), r_.end());
    std::vector<double> w(w_.size());
    double tot = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) {
      w[i] = w_[i] * std::exp(-(r_[i] - r_min) * x);
      tot += w[i];
    }
    for (double& v : w) v /= tot;
    return w;
  }
  double sample_from(const std::vector<double>& w, std::mt19937_64& rng) const {
    double u = u01(rng);
    size_t i = 0;
    for (; i + 1 < w.size(); ++i) {
      if (u < w[i]) break;
      u -= w[i];
    }
    return sample_exp(r_[i], rng);
  }
  std::vector<double> w_, r_;
};

// ---------------------------------------------------------------------------
class Deterministic final : public ServiceLaw::Impl {
 public:
  explicit Deterministic(double d) : d_(d) {
    if (!(d > 0.0)) throw std::invalid_argument("service.value must be > 0");
  }
  ServiceLaw::Family family() const override {
    return ServiceLaw::Family::kDeterministic;
  }
  double cdf(double x) const override { return x >= d_ ? 1.0 : 0.0; }
  double pdf(double) const override {
    throw std::logic_error("deterministic service has no density");
  }
  std::complex<double> lt(std::complex<double> s) const override {
    return std::exp(-s * d_);
  }
  std::complex<double> residual_lt(double x, std::complex<double> s) const override {
    return std::exp(-s * (d_ - x));
  }
  double mean() const override { return d_; }
  double second_moment() const override { return d_ * d_; }
  double residual_mean(double x) const override { return d_ - x; }
  double quantile(double) const override { return d_; }
  double support_end() const override { return d_; }
  double sample(std::mt19937_64&) const override { return d_; }
  double sample_residual(double x, std::mt19937_64&) const override { return d_ - x; }

 private:
  double d_;
};

// ---------------------------------------------------------------------------
class Empirical final : public ServiceLaw::Impl {
 public:
  explicit Empirical(std::vector<std::pair<double, double>> pts) : pts_(std::move(pts)) {
    if (pts_.size() < 2) throw std::invalid_argument("service.points needs >= 2 entries");
    if (pts_.front().second != 0.0)
      throw std::invalid_argument("service.points must start at F = 0");
    if (std::abs(pts_.back().second - 1.0) > 1e-12)
      throw std::invalid_argument("service.points must end at F = 1");
    pts_.back().second = 1.0;
    for (size_t i = 0; i + 1 < pts_.size(); ++i) {
      if (!(pts_[i].first < pts_[i + 1].first))
        throw std::invalid_argument("service.points abscissae must increase");
      if (pts_[i].second > pts_[i + 1].second + 1e-15)
        throw std::invalid_argument("service.points cdf must be nondecreasing");
    }
    if (pts_.front().first < 0.0)
      throw std::invalid_argument("service.points must be nonnegative");
  }
  ServiceLaw::Family family() const override { return ServiceLaw::Family::kEmpirical; }
  double cdf(double x) const override {
    if (x <= pts_.front().first) return 0.0;
    if (x >= pts_.back().first) return 1.0;
    const size_t i = segment(x);
    const auto& [x0, f0] = pts_[i];
    const auto& [x1, f1] = pts_[i + 1];
    return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
  }
  double pdf(double t) const override {
    if (t <= pts_.front().first || t >= pts_.back().first) return 0.0;
    const size_t i = segment(t);
    return (pts_[i + 1].second - pts_[i].second) /
           (pts_[i + 1].first - pts_[i].first);
  }
  std::complex<double> lt(std::complex<double> s) const override {
    return residual_lt(0.0, s);
  }
  std::complex<double> residual_lt(double x, std::complex<double> s) const override {
    // integral over t > x of exp(-s (t - x)) dF(t) / (1 - F(x)),
    // by adaptive Gauss-Legendre over the cdf panels (abs tol 1e-12).
    const double sf = 1.0 - cdf(x);
    const std::vector<double> brk = density_breakpoints(x, pts_.back().first);
    const std::complex<double> val = quadrature::adaptive_complex(
        [&](double t) { return std::exp(-s * (t - x)) * pdf(t); }, brk, 1e-12);
    return val / sf;
  }
  double mean() const override { return moment(1); }
  double second_moment() const override { return moment(2); }
  double residual_mean(double x) const override {
    const double sf = 1.0 - cdf(x);
    const std::vector<double> brk = density_breakpoints(x, pts_.back().first);
    return quadrature::adaptive(
               [&](double t) { return (t - x) * pdf(t); }, brk, 1e-12) /
           sf;
  }
  double quantile(double p) const override {
    if (p <= 0) return pts_.front().first;
    if (p >= 1) return pts_.back().first;
    size_t i = 0;
    while (i + 2 < pts_.size() && pts_[i + 1].second < p) ++i;
    const auto& [x0, f0] = pts_[i];
    const auto& [x1, f1] = pts_[i + 1];
    if (f1 == f0) return x1;
    return x0 + (x1 - x0) * (p - f0) / (f1 - f0);
  }
  double support_end() const override {
    // First knot where the cdf reaches 1 (the law has no mass beyond it).
    for (const auto& [t, f] : pts_)
      if (f >= 1.0) return t;
    return pts_.back().first;
  }
  double sample(std::mt19937_64& rng) const override { return quantile(u01(rng)); }
  double sample_residual(double x, std::mt19937_64& rng) const override {
    const double fx = cdf(x);
    return quantile(fx + u01(rng) * (1.0 - fx)) - x;
  }
  std::vector<double> density_breakpoints(double lo, double hi) const override {
    std::vector<double> brk;
    brk.push_back(lo);
    for (const auto& [t, f] : pts_)
      if (t > lo && t < hi) brk.push_back(t);
    if (hi > lo) brk.push_back(hi);
    return brk;
  }

 private:
  size_t segment(double x) const {
    size_t lo = 0, hi = pts_.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (pts_[mid].first <= x ? lo : hi) = mid;
    }
    return lo;
  }
  double moment(int k) const {
    const std::vector<double> brk =
        density_breakpoints(pts_.front().first, pts_.back().first);
    return quadrature::adaptive(
        [&](double t) { return std::pow(t, k) * pdf(t); }, brk, 1e-12);
  }
  std::vector<std::pair<double, double>> pts_;
};

}  // namespace

ServiceLaw::ServiceLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ServiceLaw ServiceLaw::exponential(double rate) {
  return ServiceLaw(std::make_shared<Exponential>(rate));
}
ServiceLaw ServiceLaw::erlang(int shape, double rate) {
  return ServiceLaw(std::make_shared<Erlang>(shape, rate));
}
ServiceLaw ServiceLaw::hyperexponential(std::vector<double> weights,
                                        std::vector<double> rates) {
  return ServiceLaw(
      std::make_shared<Hyperexponential>(std::move(weights), std::move(rates)));
}
ServiceLaw ServiceLaw::deterministic(double value) {
  return ServiceLaw(std::make_shared<Deterministic>(value));
}
ServiceLaw ServiceLaw::empirical(std::vector<std::pair<double, double>> points) {
  return ServiceLaw(std::make_shared<Empirical>(std::move(points)));
}

ServiceLaw::Family ServiceLaw::family() const { return impl_->family(); }
double ServiceLaw::cdf(double x) const { return impl_->cdf(x); }
double ServiceLaw::pdf(double t) const { return impl_->pdf(t); }
double ServiceLaw::lt(double s) const { return impl_->lt(std::complex<double>(s)).real(); }
std::complex<double> ServiceLaw::lt(std::complex<double> s) const { return impl_->lt(s); }
double ServiceLaw::residual_lt(double x, double s) const {
  require_age(x);
  return impl_->residual_lt(x, std::complex<double>(s)).real();
}
std::complex<double> ServiceLaw::residual_lt(double x, std::complex<double> s) const {
  require_age(x);
  return impl_->residual_lt(x, s);
}
double ServiceLaw::mean() const { return impl_->mean(); }
double ServiceLaw::second_moment() const { return impl_->second_moment(); }
double ServiceLaw::residual_mean(double x) const {
  require_age(x);
  return impl_->residual_mean(x);
}
double ServiceLaw::quantile(double p) const { return impl_->quantile(p); }
double ServiceLaw::support_end() const { return impl_->support_end(); }
bool ServiceLaw::age_valid(double x) const {
  return x == 0.0 || std::isinf(impl_->support_end()) || impl_->cdf(x) < 1.0;
}
void ServiceLaw::require_age(double x) const {
  if (x < 0.0) throw std::domain_error("service age must be >= 0");
  if (!age_valid(x)) throw std::domain_error("age beyond service support");
}
double ServiceLaw::sample(std::mt19937_64& rng) const { return impl_->sample(rng); }
double ServiceLaw::sample_residual(double x, std::mt19937_64& rng) const {
  require_age(x);
  return impl_->sample_residual(x, rng);
}
ServiceLaw::ResidualPhases ServiceLaw::residual_phases(double x) const {
  require_age(x);
  return impl_->residual_phases(x);
}
std::vector<double> ServiceLaw::density_breakpoints(double lo, double hi) const {
  return impl_->density_breakpoints(lo, hi);
}

}  // namespace batchq
