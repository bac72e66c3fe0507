#ifndef DG_OPERATORS_HPP
#define DG_OPERATORS_HPP

#include <cmath>
#include <vector>

#include "dg/linalg.hpp"
#include "dg/quadrature.hpp"

namespace dg {

// Barycentric weights for Lagrange interpolation on the given nodes.
inline std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> w(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
  return w;
}

// Dense interpolation matrix mapping nodal values on `src` to values at `dst`.
inline Matrix interpolation_matrix(const std::vector<double>& src, const std::vector<double>& dst) {
  const std::vector<double> w = barycentric_weights(src);
  const int ns = static_cast<int>(src.size());
  const int nd = static_cast<int>(dst.size());
  Matrix t(nd, ns);
  for (int q = 0; q < nd; ++q) {
    bool hit = false;
    for (int j = 0; j < ns; ++j) {
      if (dst[q] == src[j]) {
        t(q, j) = 1.0;
        hit = true;
        break;
      }
    }
    if (hit) continue;
    double denom = 0.0;
    for (int j = 0; j < ns; ++j) denom += w[j] / (dst[q] - src[j]);
    for (int j = 0; j < ns; ++j) t(q, j) = (w[j] / (dst[q] - src[j])) / denom;
  }
  return t;
}

// Operator from the order-N LGL grid to the order-M LGL grid. Exact for
// polynomials of degree <= N when M >= N; otherwise it is the interpolation
// onto the coarser grid (the aliasing map the analysis studies).
struct InterpolationOperator {
  int source_order = 0;
  int target_order = 0;
  Matrix matrix;  // (M+1) x (N+1)

  std::vector<double> apply(const std::vector<double>& values) const {
    require(static_cast<int>(values.size()) == source_order + 1,
            "interpolation input must have source_order+1 values");
    return matrix.apply(values);
  }
};

inline InterpolationOperator make_interpolation(int source_order, int target_order) {
  InterpolationOperator op;
  op.source_order = source_order;
  op.target_order = target_order;
  op.matrix = interpolation_matrix(lgl_rule(source_order).nodes, lgl_rule(target_order).nodes);
  return op;
}

// Nodal values of I^N(f) at the order-M LGL nodes.
inline std::vector<double> interpolate(const std::vector<double>& values, int target_order) {
  const int n = static_cast<int>(values.size()) - 1;
  return make_interpolation(n, target_order).apply(values);
}

// Spectral differentiation matrix on the LGL nodes, exact for degree <= N.
// Off-diagonal entries from the barycentric weights, diagonal by negative sum.
inline Matrix differentiation_matrix(int order) {
  const QuadratureRule rule = lgl_rule(order);
  const std::vector<double> w = barycentric_weights(rule.nodes);
  const int n = rule.num_points();
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (rule.nodes[i] - rule.nodes[j]);
      rowsum += d(i, j);
    }
    d(i, i) = -rowsum;
  }
  return d;
}

}  // namespace dg

#endif  // DG_OPERATORS_HPP
