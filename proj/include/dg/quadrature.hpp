#ifndef DG_QUADRATURE_HPP
#define DG_QUADRATURE_HPP

#include <cmath>
#include <vector>

#include "dg/linalg.hpp"

namespace dg {

// Legendre polynomial L_k(x) by the three-term recurrence.
inline double legendre_eval(int k, double x) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  double lm1 = 1.0, l = x;
  for (int n = 1; n < k; ++n) {
    const double lp1 = ((2.0 * n + 1.0) * x * l - n * lm1) / (n + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

// L_k and L_k' together; the derivative recurrence runs alongside the value one.
inline void legendre_eval_with_derivative(int k, double x, double& l, double& dl) {
  if (k == 0) {
    l = 1.0;
    dl = 0.0;
    return;
  }
  double lm1 = 1.0, dlm1 = 0.0;
  l = x;
  dl = 1.0;
  for (int n = 1; n < k; ++n) {
    const double lp1 = ((2.0 * n + 1.0) * x * l - n * lm1) / (n + 1.0);
    const double dlp1 = dlm1 + (2.0 * n + 1.0) * l;
    lm1 = l;
    dlm1 = dl;
    l = lp1;
    dl = dlp1;
  }
}

// Gauss-Lobatto rule of order N: N+1 nodes including the endpoints, exact for
// polynomials of degree <= 2N-1.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  int num_points() const { return order + 1; }
};

// Interior nodes are the roots of L_N'; Newton iteration on
// q(x) = (1-x^2) L_N'(x) with q'(x) = -N(N+1) L_N(x), started from the
// Chebyshev-Gauss-Lobatto points.
inline QuadratureRule lgl_rule(int order) {
  require(order >= 1, "quadrature order must be >= 1");
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(n + 1, 0.0);
  rule.weights.assign(n + 1, 0.0);
  rule.nodes[0] = -1.0;
  rule.nodes[n] = 1.0;

  const double pi = std::acos(-1.0);
  for (int j = 1; j <= n / 2; ++j) {
    double x = -std::cos(pi * j / n);
    for (int it = 0; it < 50; ++it) {
      double l, dl;
      legendre_eval_with_derivative(n, x, l, dl);
      const double q = (1.0 - x * x) * dl;
      const double dq = -static_cast<double>(n) * (n + 1.0) * l;
      const double dx = -q / dq;
      x += dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[j] = x;
    rule.nodes[n - j] = -x;
  }
  if (n % 2 == 0) rule.nodes[n / 2] = 0.0;

  for (int j = 0; j <= n; ++j) {
    const double l = legendre_eval(n, rule.nodes[j]);
    rule.weights[j] = 2.0 / (n * (n + 1.0) * l * l);
  }
  return rule;
}

// Discrete inner product sum f_i g_i w_i. Vector-valued states pass ncomp > 1
// with components interleaved per node.
inline double discrete_inner_product(const std::vector<double>& f, const std::vector<double>& g,
                                     const QuadratureRule& rule, int ncomp = 1) {
  require(f.size() == g.size(), "inner product operands must have equal length");
  require(static_cast<int>(f.size()) == rule.num_points() * ncomp,
          "inner product operands must match the rule's node count");
  double s = 0.0;
  for (int q = 0; q < rule.num_points(); ++q) {
    double node = 0.0;
    for (int c = 0; c < ncomp; ++c) node += f[q * ncomp + c] * g[q * ncomp + c];
    s += node * rule.weights[q];
  }
  return s;
}

// Rule used wherever an exact integral of a degree <= deg integrand is needed.
// The order max(deg, 2N+2) covers every product degree the N-grid analysis
// produces; see the callers in modal.hpp and analysis.hpp.
inline int exact_rule_order(int deg, int n = 0) {
  return std::max(std::max(deg, 2 * n + 2), 1);
}

inline std::vector<double> sample(const std::vector<double>& nodes, double (*f)(double)) {
  std::vector<double> v(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  return v;
}

}  // namespace dg

#endif  // DG_QUADRATURE_HPP
