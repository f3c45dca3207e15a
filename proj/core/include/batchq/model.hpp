#pragma once

#include <complex>

#include "batchq/batch_law.hpp"
#include "batchq/service_law.hpp"

namespace batchq {

// The M^x|G^d|1|B model: Poisson(mu) batch arrivals with batch law `batch`,
// generally distributed service `service`, geometric departure batches with
// parameter `lambda` (delta ~ ge(lambda), P[delta = n] = (1-lambda)
// lambda^{n-1}), and a waiting room of size B + 1.
class QueueModel {
 public:
  QueueModel(double mu, BatchLaw batch, ServiceLaw service, double lambda,
             int buffer_b);

  double mu() const { return mu_; }
  const BatchLaw& batch() const { return batch_; }
  const ServiceLaw& service() const { return service_; }
  double lambda() const { return lambda_; }
  int buffer() const { return buffer_b_; }

  // Traffic intensity rho = (1 - lambda) mu E[batch] E[service].
  double rho() const { return rho_; }

  // Cumulant of the arrival process, k(theta) = mu (E theta^batch - 1),
  // |theta| <= 1. k(1) = 0, k(0) = -mu.
  double cumulant(double theta) const;
  std::complex<double> cumulant(std::complex<double> theta) const;

  // f~_x(s) = E exp(-s eta_x), the residual-service transform at age x.
  double residual_lt(double x, double s) const;

  // Copy with the arrival rate replaced (used by the critical-load helper).
  QueueModel with_mu(double mu) const;

 private:
  double mu_;
  BatchLaw batch_;
  ServiceLaw service_;
  double lambda_;
  int buffer_b_;
  double rho_;
};

// Diffusion scale of condition (A):
//   sigma^2 = mu [ E k(k-1) + E k E eta^2 / ((1-lambda) (E eta)^2) ].
struct DiffusionParams {
  double rho;
  double sigma2;
  double sigma() const;
};

DiffusionParams diffusion_params(const QueueModel& model);

// Rescales mu so that rho == 1 exactly, keeping batch and service shapes.
QueueModel critical_load(const QueueModel& model);

}  // namespace batchq
