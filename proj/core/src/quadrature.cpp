#include "batchq/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace batchq::quadrature {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double eps = 1e-15;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < eps) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

std::complex<double> gauss_panel_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

namespace {

template <typename Value, typename Panel>
Value adaptive_impl(const Panel& panel, const std::vector<double>& breaks,
                    double abs_tol, int max_depth) {
  if (breaks.size() < 2) throw std::invalid_argument("need >= 2 breakpoints");
  struct Seg {
    double a, b;
    Value whole;
    int depth;
  };
  Value total{};
  std::vector<Seg> stack;
  const double tol_per = abs_tol / static_cast<double>(breaks.size() - 1);
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) continue;
    stack.push_back({breaks[i], breaks[i + 1],
                     panel(breaks[i], breaks[i + 1]), 0});
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      const double m = 0.5 * (s.a + s.b);
      const Value left = panel(s.a, m);
      const Value right = panel(m, s.b);
      const Value refined = left + right;
      if (std::abs(refined - s.whole) < tol_per || s.depth >= max_depth) {
        total += refined;
      } else {
        stack.push_back({s.a, m, left, s.depth + 1});
        stack.push_back({m, s.b, right, s.depth + 1});
      }
    }
  }
  return total;
}

}  // namespace

double adaptive(const std::function<double(double)>& f,
                const std::vector<double>& breakpoints, double abs_tol,
                int max_depth) {
  return adaptive_impl<double>(
      [&](double a, double b) { return gauss_panel(f, a, b, 32); },
      breakpoints, abs_tol, max_depth);
}

std::complex<double> adaptive_complex(
    const std::function<std::complex<double>(double)>& f,
    const std::vector<double>& breakpoints, double abs_tol, int max_depth) {
  return adaptive_impl<std::complex<double>>(
      [&](double a, double b) { return gauss_panel_complex(f, a, b, 32); },
      breakpoints, abs_tol, max_depth);
}

std::vector<double> adaptive_vector(
    const std::function<std::vector<double>(double)>& f, int dim,
    const std::vector<double>& breakpoints, double abs_tol, int max_depth) {
  const GaussRule& rule = gauss_legendre(32);
  auto panel = [&](double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<double> acc(dim, 0.0);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const std::vector<double> v = f(mid + half * rule.nodes[i]);
      for (int j = 0; j < dim; ++j) acc[j] += rule.weights[i] * v[j];
    }
    for (int j = 0; j < dim; ++j) acc[j] *= half;
    return acc;
  };

  struct Seg {
    double a, b;
    std::vector<double> whole;
    int depth;
  };
  std::vector<double> total(dim, 0.0);
  const double tol_per = abs_tol / static_cast<double>(breakpoints.size());
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    std::vector<Seg> stack;
    stack.push_back(
        {breakpoints[i], breakpoints[i + 1],
         panel(breakpoints[i], breakpoints[i + 1]), 0});
    while (!stack.empty()) {
      Seg s = std::move(stack.back());
      stack.pop_back();
      const double m = 0.5 * (s.a + s.b);
      std::vector<double> left = panel(s.a, m);
      std::vector<double> right = panel(m, s.b);
      double err = 0.0;
      for (int j = 0; j < dim; ++j)
        err = std::max(err, std::abs(left[j] + right[j] - s.whole[j]));
      if (err < tol_per || s.depth >= max_depth) {
        for (int j = 0; j < dim; ++j) total[j] += left[j] + right[j];
      } else {
        stack.push_back({s.a, m, std::move(left), s.depth + 1});
        stack.push_back({m, s.b, std::move(right), s.depth + 1});
      }
    }
  }
  return total;
}

}  // namespace batchq::quadrature
