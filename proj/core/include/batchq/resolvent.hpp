#pragma once

#include <vector>

#include "batchq/model.hpp"
#include "batchq/root.hpp"

namespace batchq::resolvent {

// Resolvent sequence of the governing process at transform argument s and
// age x: the power-series coefficients Q_k^s(x) of
//   (1-lambda) f~_x(s - k(theta)) / [ (1-lambda) f~(s - k(theta)) +
//                                     lambda - theta ],
// their partial sums S_k^s(x), and the companion
//   A_x^k(s) = sum_{i=0..k} rho~_i(s) [1 - Q_{k-i}^s(x) / (1-lambda)].
// Negative indices follow the conventions Q_{-1} = 0, S_{-1} = 0,
// A_x^u = 0 for u < 0.
struct Table {
  double s = 0.0;
  double x = 0.0;
  root::RootValue c;
  std::vector<double> q;
  std::vector<double> ssum;
  std::vector<double> a;

  int k_max() const { return static_cast<int>(q.size()) - 1; }
  double Q(int k) const;
  double S(int k) const;
  double A(int k) const;
};

// Builds the table by the coefficient recurrence
//   (lambda + (1-lambda) f_0^s) Q_k^s(x) =
//     (1-lambda) f_k^s(x) + Q_{k-1}^s(x)
//     - (1-lambda) sum_{i<k} Q_i^s(x) f_{k-i}^s,
// with f_k^s = f_k^s(0). Validated against the contour oracle below.
Table q_table(const QueueModel& model, double x, double s, int k_max);

// Independent contour-integral evaluation of Q_k^s(x) (the k-th Fourier
// coefficient of the generating function on |theta| = alpha, alpha < c(s)),
// used as the cross-validation oracle for q_table.
double q_contour(const QueueModel& model, double x, double s, int k,
                 double alpha, int n_points);

// Convenience wrapper: alpha = 0.9 c(s), n doubling from 1024 until two
// successive results differ by < 1e-11.
double q_contour_auto(const QueueModel& model, double x, double s, int k);

// Geometric-weight expectations over delta ~ ge(lambda):
//   eq = E Q^s_{delta+B}, es = E S^s_{delta+B-1}, ea = E A_0^{delta+B}(s).
// The series are truncated when the (lambda/c(s))-ratio bound drops the tail
// below 1e-13 of the accumulated sum (safety factor 10).
struct GeomExpectations {
  double eq = 0.0;
  double es = 0.0;
  double ea = 0.0;
  double truncation_bound = 0.0;  // bound on the dropped eq tail
  int terms = 0;
};

// Bundle of the two tables every two-boundary formula needs: the age-x table
// (numerators) and a longer age-0 table carrying the geometric series.
class GeomTables {
 public:
  GeomTables(const QueueModel& model, double x, double s, int buffer_b,
             int x_k_max = -1);

  const Table& at_x() const { return at_x_; }
  const Table& at_zero() const { return at_zero_; }
  const GeomExpectations& expectations() const { return ge_; }
  int buffer_b() const { return buffer_b_; }
  double lambda() const { return lambda_; }

  // E A_0^{delta+shift}(s) = (1-lambda) sum_{i>=1} lambda^{i-1}
  // A_0^{i+shift}(s); shift in [0, B] is always available.
  double ea_shift(int shift) const;
  // E S^s_{delta+shift} likewise (es == ea_shift analogue at B-1).
  double es_shift(int shift) const;

  int series_terms() const { return terms_; }

 private:
  Table at_x_;
  Table at_zero_;
  GeomExpectations ge_;
  int buffer_b_;
  double lambda_;
  int terms_;
};

GeomExpectations geom_expectations(const QueueModel& model, double s,
                                   int buffer_b);

}  // namespace batchq::resolvent
