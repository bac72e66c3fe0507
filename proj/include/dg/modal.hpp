#ifndef DG_MODAL_HPP
#define DG_MODAL_HPP

#include <vector>

#include "dg/linalg.hpp"
#include "dg/operators.hpp"
#include "dg/quadrature.hpp"

namespace dg {

// Legendre-modal coefficients of a polynomial, V = sum_k coefficients[k] L_k.
struct ModalExpansion {
  int degree = 0;
  std::vector<double> coefficients;
};

inline std::vector<double> sample_legendre(int k, const std::vector<double>& nodes) {
  std::vector<double> v(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) v[i] = legendre_eval(k, nodes[i]);
  return v;
}

// Modal transform by exact-quadrature projection: the nodal data (assumed to
// represent a polynomial of the stated degree) is resampled onto a rule exact
// for degree 2*degree, then V_k = <V, L_k> / ||L_k||^2 with ||L_k||^2 = 2/(2k+1).
inline ModalExpansion modal_from_nodal(const std::vector<double>& values, int degree) {
  const int source_order = static_cast<int>(values.size()) - 1;
  require(degree <= source_order, "nodal data cannot represent the requested degree");
  const int q = degree + 1;
  const QuadratureRule rule = lgl_rule(q);
  const std::vector<double> fine = interpolate(values, q);
  ModalExpansion m;
  m.degree = degree;
  m.coefficients.assign(degree + 1, 0.0);
  for (int k = 0; k <= degree; ++k) {
    const std::vector<double> lk = sample_legendre(k, rule.nodes);
    m.coefficients[k] = discrete_inner_product(fine, lk, rule) * (2.0 * k + 1.0) / 2.0;
  }
  return m;
}

inline std::vector<double> nodal_from_modal(const ModalExpansion& m, const std::vector<double>& nodes) {
  std::vector<double> v(nodes.size(), 0.0);
  for (int k = 0; k <= m.degree; ++k) {
    const double c = m.coefficients[k];
    if (c == 0.0) continue;
    for (size_t i = 0; i < nodes.size(); ++i) v[i] += c * legendre_eval(k, nodes[i]);
  }
  return v;
}

// Aliases a_k, k=0..N, of the modes above N under interpolation onto the
// order-N grid: a_k = (1/||L_k||_N^2) sum_{n=N+1}^{deg} <L_n, L_k>_N V_n.
// I^N(V) then has modal coefficients V_k + a_k.
inline std::vector<double> alias_coefficients(const ModalExpansion& v, int n) {
  std::vector<double> a(n + 1, 0.0);
  if (v.degree <= n) return a;
  const QuadratureRule rule = lgl_rule(n);
  std::vector<std::vector<double>> lk(n + 1);
  for (int k = 0; k <= n; ++k) lk[k] = sample_legendre(k, rule.nodes);
  for (int k = 0; k <= n; ++k) {
    const double norm2 = discrete_inner_product(lk[k], lk[k], rule);
    double s = 0.0;
    for (int m = n + 1; m <= v.degree; ++m) {
      const std::vector<double> lm = sample_legendre(m, rule.nodes);
      s += discrete_inner_product(lm, lk[k], rule) * v.coefficients[m];
    }
    a[k] = s / norm2;
  }
  return a;
}

// Integral of V - I^N(V) over [-1,1] for nodal samples of a polynomial on a
// grid exact for its degree. Equals -2 a_0 from the modal path.
inline double interpolation_error_integral(const std::vector<double>& values, int n) {
  const int q = static_cast<int>(values.size()) - 1;
  require(q >= n, "sample grid must be at least as fine as the interpolation order");
  const QuadratureRule rule = lgl_rule(q);
  const std::vector<double> coarse = interpolate(values, n);
  const std::vector<double> back = interpolate(coarse, q);
  double s = 0.0;
  for (int i = 0; i <= q; ++i) s += rule.weights[i] * (values[i] - back[i]);
  return s;
}

}  // namespace dg

#endif  // DG_MODAL_HPP
