#ifndef DG_SYSTEM_HPP
#define DG_SYSTEM_HPP

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dg/geometry.hpp"
#include "dg/linalg.hpp"
#include "dg/meshes.hpp"
#include "dg/operators.hpp"
#include "dg/tensor.hpp"

namespace dg {

// A symmetrized variable-coefficient system: position-dependent symmetric
// coefficient matrices A_m(x), m = 1..dim. The optional stream function psi
// (scalar systems) provides A = (psi_y, -psi_x); interpolating psi instead of
// the velocity makes the discrete contravariant matrices exactly divergence
// free on curved elements.
struct CoefficientField {
  std::string name;
  int p = 1;
  int dim = 2;
  std::function<void(const double* x, double* a)> evaluate;       // a: dim * p*p, row-major
  std::function<void(const double* x, double* div)> divergence;   // optional: p*p
  std::function<double(const double* x)> stream;                  // optional, p == 1
  bool has_divergence = false;
  bool has_stream = false;
};

inline void check_symmetry(const double* a, int p, double tol, const std::string& what) {
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::fabs(a[i * p + j] - a[j * p + i]) > tol)
        throw numerical_error(what + " is not symmetric");
}

namespace systems {

inline double cheb8(double t) {
  const double t2 = t * t;
  return ((128.0 * t2 - 256.0) * t2 + 160.0) * t2 * t2 - 32.0 * t2 + 1.0;
}
inline double cheb8_deriv(double t) {
  const double t2 = t * t;
  return (((1024.0 * t2 - 1536.0) * t2 + 640.0) * t2 - 64.0) * t;
}

inline CoefficientField constant_advection(double a1 = 1.0, double a2 = 0.5) {
  CoefficientField f;
  f.name = "constant";
  f.p = 1;
  f.evaluate = [a1, a2](const double*, double* a) {
    a[0] = a1;
    a[1] = a2;
  };
  f.divergence = [](const double*, double* d) { d[0] = 0.0; };
  f.has_divergence = true;
  f.stream = [a1, a2](const double* x) { return a1 * x[1] - a2 * x[0]; };
  f.has_stream = true;
  return f;
}

// divergence-free polynomial velocity (y, x)
inline CoefficientField rotation() {
  CoefficientField f;
  f.name = "rotation";
  f.p = 1;
  f.evaluate = [](const double* x, double* a) {
    a[0] = x[1];
    a[1] = x[0];
  };
  f.divergence = [](const double*, double* d) { d[0] = 0.0; };
  f.has_divergence = true;
  f.stream = [](const double* x) { return 0.5 * (x[1] * x[1] - x[0] * x[0]); };
  f.has_stream = true;
  return f;
}

// velocity (x, 0), divergence 1 everywhere
inline CoefficientField divergent() {
  CoefficientField f;
  f.name = "divergent";
  f.p = 1;
  f.evaluate = [](const double* x, double* a) {
    a[0] = x[0];
    a[1] = 0.0;
  };
  f.divergence = [](const double*, double* d) { d[0] = 1.0; };
  f.has_divergence = true;
  return f;
}

// p = 2 wave-like system with spatially varying speed in the off-diagonal blocks
inline CoefficientField wave(double eps = 0.25) {
  CoefficientField f;
  f.name = "wave";
  f.p = 2;
  const double pi = std::acos(-1.0);
  f.evaluate = [eps, pi](const double* x, double* a) {
    const double c = 1.0 + eps * std::sin(pi * x[0]) * std::cos(pi * x[1]);
    a[0] = 0.0; a[1] = c; a[2] = c; a[3] = 0.0;        // A_1
    a[4] = c;   a[5] = 0.0; a[6] = 0.0; a[7] = -c;     // A_2
  };
  f.divergence = [eps, pi](const double* x, double* d) {
    const double cx = eps * pi * std::cos(pi * x[0]) * std::cos(pi * x[1]);
    const double cy = -eps * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
    d[0] = cy; d[1] = cx; d[2] = cx; d[3] = -cy;
  };
  f.has_divergence = true;
  return f;
}

// deliberately rough divergence-free velocity from a degree-16 oscillatory
// stream function; underresolved at low N by construction
inline CoefficientField rough(double kappa = 0.04) {
  CoefficientField f;
  f.name = "rough";
  f.p = 1;
  f.evaluate = [kappa](const double* x, double* a) {
    const double t = x[0] - 1.0, s = x[1] - 1.0;
    a[0] = 0.5 + kappa * cheb8(t) * cheb8_deriv(s);   // psi_y
    a[1] = -kappa * cheb8_deriv(t) * cheb8(s);        // -psi_x
  };
  f.divergence = [](const double*, double* d) { d[0] = 0.0; };
  f.has_divergence = true;
  f.stream = [kappa](const double* x) {
    const double t = x[0] - 1.0, s = x[1] - 1.0;
    return 0.5 * (x[1] - 1.0) + kappa * cheb8(t) * cheb8(s);
  };
  f.has_stream = true;
  return f;
}

}  // namespace systems

inline CoefficientField make_system(const std::string& name,
                                    const std::map<std::string, double>& params = {}) {
  auto get = [&params](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "constant") return systems::constant_advection(get("a1", 1.0), get("a2", 0.5));
  if (name == "rotation") return systems::rotation();
  if (name == "divergent") return systems::divergent();
  if (name == "wave") return systems::wave(get("eps", 0.25));
  if (name == "rough") return systems::rough(get("kappa", 0.04));
  throw config_error("unknown system: " + name +
                     " (available: constant, rotation, divergent, wave, rough)");
}

inline std::vector<CoefficientField> builtin_systems() {
  return {systems::constant_advection(), systems::rotation(), systems::divergent(),
          systems::wave(), systems::rough()};
}

// ---------------------------------------------------------------------------
// Contravariant coefficient matrices

// Strategy names follow the polynomial space of the resulting contravariant
// flux: PN collapses the whole flux to P^N, P2N keeps the coefficient
// matrices in P^N (flux degree 2N), P3N keeps them in P^2N (flux degree 3N).
enum class FluxStrategy { PN, P2N, P3N };

inline FluxStrategy parse_strategy(const std::string& s) {
  if (s == "PN") return FluxStrategy::PN;
  if (s == "P2N") return FluxStrategy::P2N;
  if (s == "P3N") return FluxStrategy::P3N;
  throw config_error("strategy must be PN, P2N, or P3N");
}

inline std::string strategy_name(FluxStrategy s) {
  switch (s) {
    case FluxStrategy::PN: return "PN";
    case FluxStrategy::P2N: return "P2N";
    default: return "P3N";
  }
}

struct ElementCoefficients {
  // N-grid nodal contravariant matrices, ncomp = p*p, one field per reference direction
  std::array<Field2, 2> atil;
  // N-grid samples of A_m feeding the P3N product (I^N(A) factor)
  std::array<Field2, 2> a_nodal;
};

struct ContravariantField {
  FluxStrategy strategy = FluxStrategy::P2N;
  bool divfree_construction = false;
  int p = 1;
  std::vector<ElementCoefficients> elems;
};

// Samples coefficients on each element per the strategy. With divfree set (and
// a stream function available) the P^N matrices come from the rotated gradient
// of the interpolated stream potential, which makes them discretely divergence
// free and face continuous for any roughness of the velocity.
inline ContravariantField build_contravariant(const Mesh& mesh, const CoefficientField& sys,
                                              FluxStrategy strategy, bool divfree = false) {
  require(mesh.dim == 2, "the solver path is 2-D");
  if (divfree) require(sys.has_stream && sys.p == 1,
                       "divergence-free construction needs a scalar system with a stream function");
  ContravariantField cf;
  cf.strategy = strategy;
  cf.divfree_construction = divfree;
  cf.p = sys.p;
  const int p = sys.p;
  cf.elems.resize(mesh.elements.size());
  for (size_t k = 0; k < mesh.elements.size(); ++k) {
    const CurvedElement& e = mesh.elements[k];
    const int np = e.points();
    ElementCoefficients& ec = cf.elems[k];
    for (int i = 0; i < 2; ++i) {
      ec.atil[i] = Field2(e.order, p * p);
      ec.a_nodal[i] = Field2(e.order, p * p);
    }
    std::vector<double> a(static_cast<size_t>(2) * p * p, 0.0);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const size_t node = e.node_index2(i, j);
        sys.evaluate(&e.coords[node * 2], a.data());
        check_symmetry(a.data(), p, 1e-13, "coefficient matrix A_1 of system " + sys.name);
        check_symmetry(a.data() + p * p, p, 1e-13, "coefficient matrix A_2 of system " + sys.name);
        for (int dir = 0; dir < 2; ++dir)
          for (int c = 0; c < p * p; ++c) {
            ec.a_nodal[dir].at(i, j, c) = a[dir * p * p + c];
            ec.atil[dir].at(i, j, c) = e.ja[node * 4 + dir * 2 + 0] * a[0 * p * p + c] +
                                       e.ja[node * 4 + dir * 2 + 1] * a[1 * p * p + c];
          }
      }
    if (divfree) {
      Field2 phi(e.order, 1);
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i)
          phi.at(i, j) = sys.stream(&e.coords[e.node_index2(i, j) * 2]);
      const Matrix d = differentiation_matrix(e.order);
      const Field2 dphi_xi = apply_dir2(d, phi, 0);
      const Field2 dphi_eta = apply_dir2(d, phi, 1);
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          ec.atil[0].at(i, j, 0) = dphi_eta.at(i, j);
          ec.atil[1].at(i, j, 0) = -dphi_xi.at(i, j);
        }
    }
  }
  return cf;
}

struct DivergenceReport {
  Field2 nodal;        // p*p per node on the evaluation grid
  int eval_order = 0;
  double gamma_hat = 0.0;
  bool divergence_free = false;
};

// Discrete divergence of the contravariant matrices on the strategy's natural
// grid (N for P^N coefficients, 2N for the P3N product) and the bound
// gamma_hat = max ||div Atil||_2 / J.
inline DivergenceReport coefficient_divergence(const CurvedElement& e,
                                               const ContravariantField& cf) {
  const ElementCoefficients& ec = cf.elems[e.id];
  const int p = cf.p;
  const int q = cf.strategy == FluxStrategy::P3N ? 2 * e.order : e.order;
  DivergenceReport rep;
  rep.eval_order = q;
  std::array<Field2, 2> atil_q;
  Field2 jac_q(e.order, 1);
  for (size_t node = 0; node < e.jac.size(); ++node) jac_q.a[node] = e.jac[node];
  if (cf.strategy == FluxStrategy::P3N) {
    const Matrix t = interpolation_matrix(lgl_rule(e.order).nodes, lgl_rule(q).nodes);
    Field2 ja_q(e.order, 4);
    for (size_t node = 0; node < e.jac.size(); ++node)
      for (int c = 0; c < 4; ++c) ja_q.a[node * 4 + c] = e.ja[node * 4 + c];
    const Field2 ja_f = apply_pair(t, t, ja_q);
    const Field2 a1_f = apply_pair(t, t, ec.a_nodal[0]);
    const Field2 a2_f = apply_pair(t, t, ec.a_nodal[1]);
    jac_q = apply_pair(t, t, jac_q);
    for (int dir = 0; dir < 2; ++dir) {
      atil_q[dir] = Field2(q, p * p);
      for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= q; ++i)
          for (int c = 0; c < p * p; ++c)
            atil_q[dir].at(i, j, c) = ja_f.at(i, j, dir * 2 + 0) * a1_f.at(i, j, c) +
                                      ja_f.at(i, j, dir * 2 + 1) * a2_f.at(i, j, c);
    }
  } else {
    atil_q = ec.atil;
  }
  const Matrix d = differentiation_matrix(q);
  const Field2 d1 = apply_dir2(d, atil_q[0], 0);
  const Field2 d2 = apply_dir2(d, atil_q[1], 1);
  rep.nodal = Field2(q, p * p);
  double worst = 0.0;
  for (int j = 0; j <= q; ++j)
    for (int i = 0; i <= q; ++i) {
      std::vector<double> block(p * p);
      for (int c = 0; c < p * p; ++c) {
        rep.nodal.at(i, j, c) = d1.at(i, j, c) + d2.at(i, j, c);
        block[c] = rep.nodal.at(i, j, c);
      }
      // symmetric part is exact; tiny asymmetry is round-off
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
          const double sym = 0.5 * (block[a * p + b] + block[b * p + a]);
          block[a * p + b] = sym;
          block[b * p + a] = sym;
        }
      const double norm2 = symmetric_spectral_radius(block.data(), p);
      worst = std::max(worst, norm2 / jac_q.at(i, j));
    }
  rep.gamma_hat = worst;
  rep.divergence_free = worst <= 1e-11;
  return rep;
}

// gamma_hat maximized over a mesh-wide contravariant field.
inline double field_gamma_hat(const Mesh& mesh, const ContravariantField& cf) {
  double g = 0.0;
  for (const CurvedElement& e : mesh.elements)
    g = std::max(g, coefficient_divergence(e, cf).gamma_hat);
  return g;
}

// Continuous-problem growth rate gamma = 1/2 max ||div A||_2, sampled at the
// mesh nodes from the analytic divergence when the system provides one.
// Reported alongside gamma_hat; no relation between the two is asserted.
inline double continuous_gamma(const Mesh& mesh, const CoefficientField& sys) {
  if (!sys.has_divergence) return -1.0;  // unknown
  const int p = sys.p;
  std::vector<double> div(static_cast<size_t>(p) * p, 0.0);
  double worst = 0.0;
  for (const CurvedElement& e : mesh.elements)
    for (size_t node = 0; node < e.jac.size(); ++node) {
      sys.divergence(&e.coords[node * 2], div.data());
      worst = std::max(worst, symmetric_spectral_radius(div.data(), p));
    }
  return 0.5 * worst;
}

// ---------------------------------------------------------------------------
// Characteristic splitting

struct CharacteristicSplit {
  int p = 1;
  std::vector<double> an;     // Atil . n
  std::vector<double> absn;   // |Atil . n|
  std::vector<double> plus;   // (an + absn)/2, PSD
  std::vector<double> minus;  // (an - absn)/2, NSD
};

inline CharacteristicSplit normal_split(const std::vector<double>& an_in, int p) {
  double scale = 1.0;
  for (double v : an_in) scale = std::max(scale, std::fabs(v));
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::fabs(an_in[i * p + j] - an_in[j * p + i]) > 1e-12 * scale)
        throw numerical_error("normal_split: input matrix is asymmetric beyond tolerance");

  CharacteristicSplit s;
  s.p = p;
  s.an = an_in;
  s.absn.assign(p * p, 0.0);
  s.plus.assign(p * p, 0.0);
  s.minus.assign(p * p, 0.0);
  std::vector<double> work = an_in, lam, vec;
  symmetric_eigen(work, p, lam, vec);
  for (double& l : lam)
    if (std::fabs(l) < 1e-13) l = 0.0;  // no sign at sonic-like points
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      double abs_v = 0.0, plus_v = 0.0, minus_v = 0.0;
      for (int k = 0; k < p; ++k) {
        const double r = vec[i * p + k] * vec[j * p + k];
        abs_v += std::fabs(lam[k]) * r;
        plus_v += 0.5 * (lam[k] + std::fabs(lam[k])) * r;
        minus_v += 0.5 * (lam[k] - std::fabs(lam[k])) * r;
      }
      s.absn[i * p + j] = abs_v;
      s.plus[i * p + j] = plus_v;
      s.minus[i * p + j] = minus_v;
    }
  return s;
}

}  // namespace dg

#endif  // DG_SYSTEM_HPP
