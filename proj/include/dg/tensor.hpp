#ifndef DG_TENSOR_HPP
#define DG_TENSOR_HPP

#include <vector>

#include "dg/linalg.hpp"

namespace dg {

// Nodal data on the (order+1)^2 tensor LGL grid, `ncomp` values per node.
// Storage is node-major with components innermost; i indexes xi, j indexes eta.
struct Field2 {
  int order = 0;
  int ncomp = 1;
  std::vector<double> a;

  Field2() = default;
  Field2(int order_, int ncomp_)
      : order(order_), ncomp(ncomp_),
        a(static_cast<size_t>(order_ + 1) * (order_ + 1) * ncomp_, 0.0) {}

  int points() const { return order + 1; }
  size_t idx(int i, int j, int c = 0) const {
    return (static_cast<size_t>(j) * (order + 1) + i) * ncomp + c;
  }
  double& at(int i, int j, int c = 0) { return a[idx(i, j, c)]; }
  double at(int i, int j, int c = 0) const { return a[idx(i, j, c)]; }
};

// out(q,r,c) = sum_{i,j} Axi(q,i) Aeta(r,j) in(i,j,c); the workhorse for grid
// transfer and differentiation, applied one direction at a time.
inline Field2 apply_pair(const Matrix& axi, const Matrix& aeta, const Field2& in) {
  const int ni = in.points();
  const int mq = axi.rows();
  const int mr = aeta.rows();
  const int nc = in.ncomp;
  std::vector<double> tmp(static_cast<size_t>(mq) * ni * nc, 0.0);
  for (int j = 0; j < ni; ++j)
    for (int q = 0; q < mq; ++q) {
      double* t = &tmp[(static_cast<size_t>(j) * mq + q) * nc];
      for (int i = 0; i < ni; ++i) {
        const double w = axi(q, i);
        if (w == 0.0) continue;
        const double* src = &in.a[in.idx(i, j, 0)];
        for (int c = 0; c < nc; ++c) t[c] += w * src[c];
      }
    }
  require(mq == mr, "apply_pair expects matching target orders per direction");
  Field2 out(mq - 1, nc);
  for (int r = 0; r < mr; ++r)
    for (int q = 0; q < mq; ++q) {
      double* dst = &out.a[out.idx(q, r, 0)];
      for (int j = 0; j < ni; ++j) {
        const double w = aeta(r, j);
        if (w == 0.0) continue;
        const double* src = &tmp[(static_cast<size_t>(j) * mq + q) * nc];
        for (int c = 0; c < nc; ++c) dst[c] += w * src[c];
      }
    }
  return out;
}

// Derivative along one direction with the square matrix D on the field's grid.
inline Field2 apply_dir2(const Matrix& d, const Field2& in, int axis) {
  const int n = in.points();
  Field2 out(in.order, in.ncomp);
  for (int j = 0; j < n; ++j)
    for (int q = 0; q < n; ++q) {
      double* dst = &out.a[axis == 0 ? out.idx(q, j, 0) : out.idx(j, q, 0)];
      for (int i = 0; i < n; ++i) {
        const double w = d(q, i);
        if (w == 0.0) continue;
        const double* src = &in.a[axis == 0 ? in.idx(i, j, 0) : in.idx(j, i, 0)];
        for (int c = 0; c < in.ncomp; ++c) dst[c] += w * src[c];
      }
    }
  return out;
}

// Nodal data on the (order+1)^3 grid; used by the hexahedral metric checks.
struct Field3 {
  int order = 0;
  int ncomp = 1;
  std::vector<double> a;

  Field3() = default;
  Field3(int order_, int ncomp_)
      : order(order_), ncomp(ncomp_),
        a(static_cast<size_t>(order_ + 1) * (order_ + 1) * (order_ + 1) * ncomp_, 0.0) {}

  int points() const { return order + 1; }
  size_t idx(int i, int j, int k, int c = 0) const {
    return ((static_cast<size_t>(k) * (order + 1) + j) * (order + 1) + i) * ncomp + c;
  }
  double& at(int i, int j, int k, int c = 0) { return a[idx(i, j, k, c)]; }
  double at(int i, int j, int k, int c = 0) const { return a[idx(i, j, k, c)]; }
};

inline Field3 apply_dir3(const Matrix& d, const Field3& in, int axis) {
  const int n = in.points();
  Field3 out(in.order, in.ncomp);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int q = 0; q < n; ++q) {
        size_t di;
        if (axis == 0) di = out.idx(q, j, k, 0);
        else if (axis == 1) di = out.idx(j, q, k, 0);
        else di = out.idx(j, k, q, 0);
        double* dst = &out.a[di];
        for (int i = 0; i < n; ++i) {
          const double w = d(q, i);
          if (w == 0.0) continue;
          size_t si;
          if (axis == 0) si = in.idx(i, j, k, 0);
          else if (axis == 1) si = in.idx(j, i, k, 0);
          else si = in.idx(j, k, i, 0);
          const double* src = &in.a[si];
          for (int c = 0; c < in.ncomp; ++c) dst[c] += w * src[c];
        }
      }
  return out;
}

}  // namespace dg

#endif  // DG_TENSOR_HPP
