#ifndef DG_VERIFY_HPP
#define DG_VERIFY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "dg/analysis.hpp"
#include "dg/initial.hpp"
#include "dg/meshes.hpp"
#include "dg/solver.hpp"
#include "dg/system.hpp"

namespace dg {

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

inline VerifyCheck make_check(const std::string& name, double measured, double threshold) {
  return {name, measured, threshold, measured <= threshold};
}

// Quadrature exactness: random polynomials of degree <= 2N-1 against their
// analytic integrals, max relative error over all orders and trials.
inline VerifyCheck verify_quadrature_exactness(int n_max = 16, int trials = 200,
                                               uint64_t seed = 11) {
  DetRng rng(seed);
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const QuadratureRule rule = lgl_rule(n);
    for (int t = 0; t < trials; ++t) {
      const int deg = 2 * n - 1;
      std::vector<double> c(deg + 1);
      for (double& v : c) v = rng.uniform(-1.0, 1.0);
      double exact = 0.0, bound = 0.0;
      for (int k = 0; k <= deg; ++k) {
        if (k % 2 == 0) exact += c[k] * 2.0 / (k + 1.0);
        bound += std::fabs(c[k]) * 2.0 / (k + 1.0);
      }
      double quad = 0.0;
      for (int i = 0; i <= n; ++i) {
        double acc = 0.0;
        for (int k = deg; k >= 0; --k) acc = acc * rule.nodes[i] + c[k];
        quad += rule.weights[i] * acc;
      }
      worst = std::max(worst, std::fabs(quad - exact) / std::max(1e-30, std::max(bound, std::fabs(exact))));
    }
  }
  return make_check("quadrature-exactness", worst, 1e-12);
}

// Discrete Gauss law on the reference quad and hex with nodal random data,
// at the base order and the overintegration orders.
inline VerifyCheck verify_gauss_law(const std::vector<int>& orders = {3, 5, 8}, int trials = 50,
                                    uint64_t seed = 23) {
  DetRng rng(seed);
  double worst = 0.0;
  for (int n : orders) {
    for (int q : {n, 2 * n, 3 * n}) {
      const QuadratureRule rule = lgl_rule(q);
      const Matrix d = differentiation_matrix(q);
      for (int t = 0; t < trials; ++t) {
        Field2 f1(q, 1), f2(q, 1), v(q, 1);
        for (auto& x : f1.a) x = rng.uniform(-1.0, 1.0);
        for (auto& x : f2.a) x = rng.uniform(-1.0, 1.0);
        for (auto& x : v.a) x = rng.uniform(-1.0, 1.0);
        const Field2 df1 = apply_dir2(d, f1, 0);
        const Field2 df2 = apply_dir2(d, f2, 1);
        const Field2 dv1 = apply_dir2(d, v, 0);
        const Field2 dv2 = apply_dir2(d, v, 1);
        double vol = 0.0, surf = 0.0;
        for (int j = 0; j <= q; ++j)
          for (int i = 0; i <= q; ++i) {
            const double w = rule.weights[i] * rule.weights[j];
            vol += w * ((df1.at(i, j) + df2.at(i, j)) * v.at(i, j) +
                        f1.at(i, j) * dv1.at(i, j) + f2.at(i, j) * dv2.at(i, j));
          }
        for (int j = 0; j <= q; ++j) {
          surf += rule.weights[j] * (v.at(q, j) * f1.at(q, j) - v.at(0, j) * f1.at(0, j));
          surf += rule.weights[j] * (v.at(j, q) * f2.at(j, q) - v.at(j, 0) * f2.at(j, 0));
        }
        worst = std::max(worst,
                         std::fabs(vol - surf) / std::max({1.0, std::fabs(vol), std::fabs(surf)}));
      }
    }
  }
  return make_check("discrete-gauss-law", worst, 1e-11);
}

inline VerifyCheck verify_gauss_law_3d(const std::vector<int>& orders = {3, 5}, int trials = 10,
                                       uint64_t seed = 29) {
  DetRng rng(seed);
  double worst = 0.0;
  for (int n : orders) {
    for (int q : {n, 2 * n}) {
      const QuadratureRule rule = lgl_rule(q);
      const Matrix d = differentiation_matrix(q);
      for (int t = 0; t < trials; ++t) {
        std::array<Field3, 3> f;
        Field3 v(q, 1);
        for (int dir = 0; dir < 3; ++dir) {
          f[dir] = Field3(q, 1);
          for (auto& x : f[dir].a) x = rng.uniform(-1.0, 1.0);
        }
        for (auto& x : v.a) x = rng.uniform(-1.0, 1.0);
        double vol = 0.0, surf = 0.0;
        std::array<Field3, 3> df, dv;
        for (int dir = 0; dir < 3; ++dir) {
          df[dir] = apply_dir3(d, f[dir], dir);
          dv[dir] = apply_dir3(d, v, dir);
        }
        for (int k = 0; k <= q; ++k)
          for (int j = 0; j <= q; ++j)
            for (int i = 0; i <= q; ++i) {
              const double w = rule.weights[i] * rule.weights[j] * rule.weights[k];
              double s = 0.0;
              for (int dir = 0; dir < 3; ++dir)
                s += df[dir].at(i, j, k) * v.at(i, j, k) + f[dir].at(i, j, k) * dv[dir].at(i, j, k);
              vol += w * s;
            }
        for (int b = 0; b <= q; ++b)
          for (int a = 0; a <= q; ++a) {
            const double w = rule.weights[a] * rule.weights[b];
            surf += w * (v.at(q, a, b) * f[0].at(q, a, b) - v.at(0, a, b) * f[0].at(0, a, b));
            surf += w * (v.at(a, q, b) * f[1].at(a, q, b) - v.at(a, 0, b) * f[1].at(a, 0, b));
            surf += w * (v.at(a, b, q) * f[2].at(a, b, q) - v.at(a, b, 0) * f[2].at(a, b, 0));
          }
        worst = std::max(worst,
                         std::fabs(vol - surf) / std::max({1.0, std::fabs(vol), std::fabs(surf)}));
      }
    }
  }
  return make_check("discrete-gauss-law-3d", worst, 1e-11);
}

inline VerifyCheck verify_metric_identity_2d(int n = 6) {
  double worst = 0.0;
  for (const char* name : {"curved-quad", "periodic-2x2"}) {
    const Mesh mesh = build_mesh(builtin_mesh_spec(name), n);
    for (const CurvedElement& e : mesh.elements)
      worst = std::max(worst, metric_identity_residual(e));
  }
  return make_check("metric-identity-2d", worst, 1e-11);
}

inline VerifyCheck verify_metric_identity_hex(int n = 6) {
  const CurvedElement hex = build_element(curved_hex_spec(n), n, MetricForm::curl);
  return make_check("metric-identity-hex-curl", metric_identity_residual(hex), 1e-11);
}

// Reference value showing why the curl form is the default: the pointwise
// cross product fails visibly on a non-polynomial perturbation.
inline VerifyCheck verify_cross_form_failure(int n = 5) {
  const CurvedElement hex = build_element(curved_hex_spec(n, 0.1, true), n, MetricForm::cross);
  VerifyCheck c;
  c.name = "metric-identity-hex-cross-failure";
  c.measured = metric_identity_residual(hex);
  c.threshold = 1e-3;
  c.pass = c.measured > c.threshold;  // the failure is the expected outcome
  return c;
}

inline VerifyCheck verify_watertightness(int n = 5) {
  double worst = 0.0;
  for (const char* name : {"curved-quad", "periodic-2x2"}) {
    const Mesh mesh = build_mesh(builtin_mesh_spec(name), n);
    for (const FaceConnection& conn : mesh.interior) {
      worst = std::max(worst, connection_mismatch(mesh, conn));
      const ElementFace& fl = mesh.elements[conn.elem_left].faces[conn.face_left];
      const ElementFace& fr = mesh.elements[conn.elem_right].faces[conn.face_right];
      const int np = static_cast<int>(fl.surf_jac.size());
      for (int q = 0; q < np; ++q) {
        const int qr = conn.reversed ? np - 1 - q : q;
        worst = std::max(worst, std::fabs(fl.surf_jac[q] - fr.surf_jac[qr]));
        worst = std::max(worst, std::hypot(fl.normal[q * 2] + fr.normal[qr * 2],
                                           fl.normal[q * 2 + 1] + fr.normal[qr * 2 + 1]));
      }
    }
  }
  return make_check("watertightness-and-normals", worst, 1e-12);
}

// Constant-state preservation on the curved mesh for every form and strategy.
inline VerifyCheck verify_free_stream(int n = 4) {
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  const CoefficientField sys = make_system("constant", {{"a1", 1.0}, {"a2", 0.7}});
  SolutionField state = make_initial_data(mesh, n, 1, "constant", 0, {{"amplitude", 2.0}});
  double worst = 0.0;
  for (FluxStrategy strat : {FluxStrategy::PN, FluxStrategy::P2N, FluxStrategy::P3N}) {
    const ContravariantField cf = build_contravariant(mesh, sys, strat);
    for (DGForm form : {DGForm::W, DGForm::S1, DGForm::S2})
      for (auto [m, l] : {std::pair{n, n}, std::pair{2 * n + 1, n}, std::pair{2 * n + 1, 2 * n + 1}}) {
        SchemeConfig cfg{n, m, l, strat, form};
        const Discretization disc(mesh, cf, cfg);
        for (const Field2& r : disc.rhs(state))
          for (double v : r.a) worst = std::max(worst, std::fabs(v));
      }
  }
  return make_check("free-stream-rhs", worst, 1e-11);
}

inline VerifyCheck verify_free_stream_steps(int n = 4, int steps = 100) {
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  const CoefficientField sys = make_system("constant", {{"a1", 1.0}, {"a2", 0.7}});
  const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N);
  SchemeConfig cfg{n, 2 * n + 1, 2 * n + 1, FluxStrategy::P2N, DGForm::W};
  const Discretization disc(mesh, cf, cfg);
  SolutionField state = make_initial_data(mesh, n, 1, "constant", 0, {{"amplitude", 2.0}});
  const double dt = cfl_timestep(disc, 0.5);
  for (int s = 0; s < steps; ++s) step_rk(state, dt, disc);
  double worst = 0.0;
  for (const Field2& u : state.u)
    for (double v : u.a) worst = std::max(worst, std::fabs(v - 2.0));
  return make_check("free-stream-100-steps", worst, 1e-10);
}

// Trace agreement of the contravariant normal matrices across conforming
// faces (periodic wraps included for wrap-compatible systems).
inline VerifyCheck verify_face_continuity(int n = 4) {
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  double worst = 0.0;
  for (const CoefficientField& sys : builtin_systems()) {
    const int p = sys.p;
    for (FluxStrategy strat : {FluxStrategy::PN, FluxStrategy::P2N, FluxStrategy::P3N}) {
      const ContravariantField cf = build_contravariant(mesh, sys, strat);
      auto an_trace = [&](int elem, int face) {
        const CurvedElement& e = mesh.elements[elem];
        const int np = e.points();
        std::vector<double> out(static_cast<size_t>(np) * p * p, 0.0);
        if (strat == FluxStrategy::P3N) {
          const ElementFace& ef = e.faces[face];
          const auto a1 = face_trace(cf.elems[elem].a_nodal[0], face);
          const auto a2 = face_trace(cf.elems[elem].a_nodal[1], face);
          for (int q = 0; q < np; ++q)
            for (int c = 0; c < p * p; ++c)
              out[q * p * p + c] = ef.ja_normal[q * 2] * a1[q * p * p + c] +
                                   ef.ja_normal[q * 2 + 1] * a2[q * p * p + c];
        } else {
          const double sign = face_side(face) == 0 ? -1.0 : 1.0;
          out = face_trace(cf.elems[elem].atil[face_axis(face)], face);
          for (double& v : out) v *= sign;
        }
        return out;
      };
      for (const FaceConnection& conn : mesh.interior) {
        const bool wrap = conn.shift[0] != 0.0 || conn.shift[1] != 0.0;
        if (wrap && sys.name == "divergent") continue;
        const auto left = an_trace(conn.elem_left, conn.face_left);
        const auto right = an_trace(conn.elem_right, conn.face_right);
        const int np = n + 1;
        for (int q = 0; q < np; ++q) {
          const int qr = conn.reversed ? n - q : q;
          for (int c = 0; c < p * p; ++c)
            worst = std::max(worst, std::fabs(left[q * p * p + c] + right[qr * p * p + c]));
        }
      }
    }
  }
  return make_check("contravariant-face-continuity", worst, 1e-12);
}

inline std::vector<VerifyCheck> verify_operators() {
  return {verify_quadrature_exactness(), verify_gauss_law(),          verify_gauss_law_3d(),
          verify_metric_identity_2d(),   verify_metric_identity_hex(), verify_cross_form_failure(),
          verify_watertightness(),       verify_free_stream(),        verify_free_stream_steps(),
          verify_face_continuity()};
}

}  // namespace dg

#endif  // DG_VERIFY_HPP
