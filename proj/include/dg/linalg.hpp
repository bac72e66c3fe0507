#ifndef DG_LINALG_HPP
#define DG_LINALG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dg {

// Thrown for invalid user input (configs, bad scheme combinations).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a computation produces non-finite or inadmissible values.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

// Dense row-major matrix, sized at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  Matrix multiply(const Matrix& b) const {
    Matrix c(rows_, b.cols());
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// y += alpha * A x for a p-by-p block stored row-major at `a`.
inline void block_apply(const double* a, int p, const double* x, double* y, double alpha = 1.0) {
  for (int i = 0; i < p; ++i) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += a[i * p + j] * x[j];
    y[i] += alpha * s;
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Jacobi eigensolver for a symmetric p-by-p matrix (row-major `a`, overwritten).
// Eigenvectors are returned as columns of `v`. Adequate for the small block
// sizes that occur at face nodes.
inline void symmetric_eigen(std::vector<double>& a, int p, std::vector<double>& lambda,
                            std::vector<double>& v) {
  lambda.assign(p, 0.0);
  v.assign(static_cast<size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i) v[i * p + i] = 1.0;
  if (p == 1) {
    lambda[0] = a[0];
    return;
  }
  double scale = 0.0;
  for (int i = 0; i < p * p; ++i) scale = std::max(scale, std::fabs(a[i]));
  const double tol = 1e-14 * std::max(1.0, scale);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) off += a[i * p + j] * a[i * p + j];
    if (std::sqrt(off) <= tol) break;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) {
        const double apq = a[i * p + j];
        if (std::fabs(apq) <= 1e-300) continue;
        const double app = a[i * p + i], aqq = a[j * p + j];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < p; ++k) {
          const double aki = a[k * p + i], akj = a[k * p + j];
          a[k * p + i] = c * aki - s * akj;
          a[k * p + j] = s * aki + c * akj;
        }
        for (int k = 0; k < p; ++k) {
          const double aik = a[i * p + k], ajk = a[j * p + k];
          a[i * p + k] = c * aik - s * ajk;
          a[j * p + k] = s * aik + c * ajk;
        }
        for (int k = 0; k < p; ++k) {
          const double vki = v[k * p + i], vkj = v[k * p + j];
          v[k * p + i] = c * vki - s * vkj;
          v[k * p + j] = s * vki + c * vkj;
        }
      }
  }
  for (int i = 0; i < p; ++i) lambda[i] = a[i * p + i];
}

// Spectral radius (largest |eigenvalue|) of a symmetric block.
inline double symmetric_spectral_radius(const double* a, int p) {
  std::vector<double> work(a, a + static_cast<size_t>(p) * p), lam, vec;
  symmetric_eigen(work, p, lam, vec);
  double r = 0.0;
  for (double l : lam) r = std::max(r, std::fabs(l));
  return r;
}

// Deterministic uniform floats on [lo, hi) built on the raw 64-bit stream of
// mt19937_64, so seeded values are identical across standard libraries.
class DetRng {
 public:
  explicit DetRng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next_u64() {
    // xorshift64*; small, portable, good enough for test fixtures
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  uint64_t state_;
};

}  // namespace dg

#endif  // DG_LINALG_HPP
