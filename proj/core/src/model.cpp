#include "batchq/model.hpp"

#include <cmath>
#include <stdexcept>

namespace batchq {

QueueModel::QueueModel(double mu, BatchLaw batch, ServiceLaw service,
                       double lambda, int buffer_b)
    : mu_(mu),
      batch_(std::move(batch)),
      service_(std::move(service)),
      lambda_(lambda),
      buffer_b_(buffer_b) {
  if (!(mu > 0.0)) throw std::invalid_argument("arrival.mu must be > 0");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("jump.lambda must lie in [0,1)");
  if (buffer_b < 0) throw std::invalid_argument("buffer.B must be >= 0");
  rho_ = (1.0 - lambda_) * mu_ * batch_.mean() * service_.mean();
}

double QueueModel::cumulant(double theta) const {
  if (std::abs(theta) > 1.0 + 1e-15)
    throw std::invalid_argument("cumulant: |theta| must be <= 1");
  return mu_ * (batch_.pgf(theta) - 1.0);
}

std::complex<double> QueueModel::cumulant(std::complex<double> theta) const {
  if (std::abs(theta) > 1.0 + 1e-12)
    throw std::invalid_argument("cumulant: |theta| must be <= 1");
  return mu_ * (batch_.pgf(theta) - 1.0);
}

double QueueModel::residual_lt(double x, double s) const {
  if (s < 0.0) throw std::invalid_argument("residual_lt: s must be >= 0");
  return service_.residual_lt(x, s);
}

QueueModel QueueModel::with_mu(double mu) const {
  return QueueModel(mu, batch_, service_, lambda_, buffer_b_);
}

double DiffusionParams::sigma() const { return std::sqrt(sigma2); }

DiffusionParams diffusion_params(const QueueModel& model) {
  const double ek = model.batch().mean();
  const double ek2 = model.batch().second_moment();
  const double eh = model.service().mean();
  const double eh2 = model.service().second_moment();
  DiffusionParams p;
  p.rho = model.rho();
  p.sigma2 = model.mu() *
             ((ek2 - ek) + ek * eh2 / ((1.0 - model.lambda()) * eh * eh));
  return p;
}

QueueModel critical_load(const QueueModel& model) {
  const double mu =
      1.0 / ((1.0 - model.lambda()) * model.batch().mean() * model.service().mean());
  return model.with_mu(mu);
}

}  // namespace batchq
