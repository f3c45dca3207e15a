#pragma once

#include <string>
#include <vector>

#include "batchq/model.hpp"

namespace batchq::diffusion {

// Closed-form Wiener-limit formulas under critical load (rho = 1, finite
// sigma^2), and a comparator that measures convergence of the scaled
// prelimit quantities toward them over a list of buffer sizes.

// Geometry of a limit evaluation in continuum units; r + k = 1 where the
// limits assume it.
struct WienerSpec {
  double sigma = 0.0;
  double r = 0.0;
  double k = 0.0;
  double u = 0.0;
  double t = 0.0;
};

// Trivariate window of the Wiener process on [-r, k] (sine series):
//   (4/pi) sum_{n>=1} n^{-1} e^{-t (pi n sigma)^2 / 2} sin(r pi n)
//                     sin^2((r+u) n pi / 2).
double wiener_trivariate(const WienerSpec& spec);

// Reflected-increment window: 1 - (1/(sigma sqrt(2 pi t)))
//   Int_u^{2k-u} e^{-v^2/(2 sigma^2 t)} dv.
double wiener_reflected_window(const WienerSpec& spec);

// Supremum joint window: (1/(sigma sqrt(2 pi t)))
//   Int_{-u}^{2k-u} e^{-v^2/(2 sigma^2 t)} dv.
double wiener_sup_window(const WienerSpec& spec);

// Reflected process inside [-r, k] ((n + 1/2) sine series).
double wiener_reflected_two_sided(const WienerSpec& spec);

// First-passage transform of the reflected process:
//   ch(k sqrt(2s)/sigma) / ch(sqrt(2s)/sigma), k = 1 - r.
double wiener_reflected_passage_lt(double sigma, double r, double s);

// Number of series terms needed to push the remainder below `tol`.
int trivariate_term_count(const WienerSpec& spec, double tol = 1e-14);
int reflected_two_sided_term_count(const WienerSpec& spec, double tol = 1e-14);

// One row of a convergence report: the scaled prelimit value at buffer B,
// its Wiener limit, and the deviation used for the trend test.
struct DeviationRow {
  int buffer_b = 0;
  double prelimit = 0.0;
  double limit = 0.0;
  double deviation = 0.0;  // see each family for the normalization
};

enum class Quantity {
  kRootLinearization,    // |c(s/B^2) - (1 - sqrt(2s)/(sigma B))| * B
  kResolventScaling,     // B^{-1} Q^{s/B^2}_{[kB]}(x) vs 2 sh(.)/(..)
  kPartialSumScaling,    // B^{-2} S^{s/B^2}_{[kB]}(x) vs (ch(.)-1)/(s E eta)
  kTrivariate,           // time-domain trivariate window (Laplace-inverted)
  kReflectedWindow,      // time-domain reflected increments
  kReflectedTwoSided,    // time-domain reflected two-boundary law
  kReflectedPassage,     // transform-domain ch ratio
};

std::string quantity_name(Quantity q);

struct ReportOptions {
  double s = 1.0;   // transform argument of the scaled evaluations
  double t = 0.5;   // continuum time of the inverted evaluations
  double r = 0.5;   // lower fraction; k = 1 - r
  double u = 0.0;   // level fraction, in [-r, k]
  double x = 0.0;   // initial service age
  int inversion_order = 14;
};

// Requires rho == 1 within 1e-9 (use critical_load to rescale mu).
// Deviations are expected to be nonincreasing over increasing B.
std::vector<DeviationRow> convergence_report(const QueueModel& model,
                                             Quantity quantity,
                                             const std::vector<int>& buffers,
                                             const ReportOptions& opts = {});

}  // namespace batchq::diffusion
