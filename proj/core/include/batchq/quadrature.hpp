#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace batchq::quadrature {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
// Computed once per order by Newton iteration on the Legendre polynomial
// and cached; accurate to machine precision.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] with the fixed-order rule.
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order = 32);

std::complex<double> gauss_panel_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int order = 32);

// Adaptive panel integration: each panel is bisected until the order-32
// result agrees with the sum of its halves within the local tolerance share.
// `breakpoints` must be increasing; integration runs over [front, back].
double adaptive(const std::function<double(double)>& f,
                const std::vector<double>& breakpoints, double abs_tol,
                int max_depth = 28);

std::complex<double> adaptive_complex(
    const std::function<std::complex<double>(double)>& f,
    const std::vector<double>& breakpoints, double abs_tol,
    int max_depth = 28);

// Vector-valued variant: integrates all components of f simultaneously with
// the refinement criterion taken in the max norm.
std::vector<double> adaptive_vector(
    const std::function<std::vector<double>(double)>& f, int dim,
    const std::vector<double>& breakpoints, double abs_tol,
    int max_depth = 24);

}  // namespace batchq::quadrature
