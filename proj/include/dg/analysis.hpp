#ifndef DG_ANALYSIS_HPP
#define DG_ANALYSIS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "dg/initial.hpp"
#include "dg/modal.hpp"
#include "dg/solver.hpp"
#include "dg/system.hpp"

namespace dg {

// Discrete broken norm squared: sum over elements of the J-weighted N-norm.
inline double total_energy(const SolutionField& state, const Mesh& mesh) {
  const int n = state.u.empty() ? 0 : state.u[0].order;
  const QuadratureRule rule = lgl_rule(n);
  double e = 0.0;
  for (size_t k = 0; k < mesh.elements.size(); ++k) {
    const CurvedElement& el = mesh.elements[k];
    const Field2& u = state.u[k];
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        double u2 = 0.0;
        for (int c = 0; c < state.p; ++c) u2 += u.at(i, j, c) * u.at(i, j, c);
        e += rule.weights[i] * rule.weights[j] * el.jac[el.node_index2(i, j)] * u2;
      }
  }
  return e;
}

// Exact semi-discrete energy derivative 2 sum_k <J U, U_t>_N, independent of
// the time integrator.
inline double energy_rate(const SolutionField& state, const std::vector<Field2>& rhs,
                          const Mesh& mesh) {
  const int n = state.u.empty() ? 0 : state.u[0].order;
  const QuadratureRule rule = lgl_rule(n);
  double r = 0.0;
  for (size_t k = 0; k < mesh.elements.size(); ++k) {
    const CurvedElement& el = mesh.elements[k];
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        double uu = 0.0;
        for (int c = 0; c < state.p; ++c) uu += state.u[k].at(i, j, c) * rhs[k].at(i, j, c);
        r += rule.weights[i] * rule.weights[j] * el.jac[el.node_index2(i, j)] * uu;
      }
  }
  return 2.0 * r;
}

// Per-state energy budget. Every term is computed by direct quadrature from
// the face and volume data, so the closure residual against energy_rate is a
// genuine cross-check of the summation-by-parts algebra in the assembly.
// Sign convention: dissip and pbt are the nonnegative dissipation magnitudes;
// the budget identity is dEdt = -dissip - pbt + surface_alias + volume_resid.
struct EnergyReport {
  double time = 0.0;
  double energy = 0.0;
  double dEdt = 0.0;
  double dissip = 0.0;
  double pbt = 0.0;
  double surface_alias = 0.0;
  double volume_resid = 0.0;
  double coeff_div_term = 0.0;     // -sum <(div Atil) U, U>_M, part of volume_resid
  double product_rule_term = 0.0;  // volume_resid - coeff_div_term
  double eps_quotient = 0.0;       // product_rule_term / (2 energy)
  double gamma_hat = 0.0;
  double closure_residual = 0.0;
  double upwind_pointwise_max = 0.0;  // max over face nodes of F*^T[[U]] - 1/2[[F^T U]]
};

namespace detail {

struct FaceEnergy {
  double dissip = 0.0;
  double pbt = 0.0;
  double surf_total = 0.0;
  double pointwise_max = -1e300;
};

inline FaceEnergy face_energy_terms(const Discretization& disc, const FaceBlock& fb,
                                    const FaceState& fs, const SolutionField& state) {
  FaceEnergy out;
  const SchemeConfig& cfg = disc.config();
  const int p = disc.state_dim();
  const int l = cfg.l, m = cfg.m;
  const QuadratureRule& rl = disc.rule_l();
  const QuadratureRule& rm = disc.rule_m();

  // characteristic dissipation terms at the L nodes
  for (int q = 0; q <= l; ++q) {
    const CharacteristicSplit& sp = fb.split[q];
    const double* ul = &fs.u_l[static_cast<size_t>(q) * p];
    const double* ur = &fs.u_r[static_cast<size_t>(q) * p];
    if (fb.is_boundary) {
      std::vector<double> ap(p, 0.0), am(p, 0.0), dm(p, 0.0);
      std::vector<double> diff(p);
      for (int c = 0; c < p; ++c) diff[c] = ul[c] - ur[c];
      block_apply(sp.plus.data(), p, ul, ap.data());
      block_apply(sp.minus.data(), p, diff.data(), am.data());
      block_apply(sp.minus.data(), p, ur, dm.data());
      double val = 0.0;
      for (int c = 0; c < p; ++c)
        val += ul[c] * ap[c] - diff[c] * am[c] + ur[c] * dm[c];
      if (cfg.flux == FluxType::upwind) out.pbt += rl.weights[q] * val;
      else {
        // central flux boundary contribution: 2 (f* - 1/2 F.n)^T U = U^T An g
        std::vector<double> anu(p, 0.0);
        block_apply(sp.an.data(), p, ul, anu.data());
        double cv = 0.0;
        for (int c = 0; c < p; ++c) cv += ur[c] * anu[c];
        out.pbt += rl.weights[q] * cv;
      }
    } else if (cfg.flux == FluxType::upwind) {
      std::vector<double> jmp(p), absj(p, 0.0);
      for (int c = 0; c < p; ++c) jmp[c] = ur[c] - ul[c];
      block_apply(sp.absn.data(), p, jmp.data(), absj.data());
      double val = 0.0;
      for (int c = 0; c < p; ++c) val += jmp[c] * absj[c];
      out.dissip += rl.weights[q] * val;
    }
    // pointwise upwind identity F*^T [[U]] - 1/2 [[F^T U]]
    if (!fb.is_boundary) {
      const int qr = fb.conn.reversed ? l - q : q;
      double fstar_jump = 0.0, fu_jump = 0.0;
      for (int c = 0; c < p; ++c) {
        const double jc = ur[c] - ul[c];
        fstar_jump += fs.fstar[static_cast<size_t>(q) * p + c] * jc;
        // right own-normal flux is along -n_L, so the n_L-oriented value flips sign
        const double fn_r = -fs.fn_own_r_l[static_cast<size_t>(qr) * p + c];
        const double fn_l = fs.fn_own_l_l[static_cast<size_t>(q) * p + c];
        fu_jump += fn_r * ur[c] - fn_l * ul[c];
      }
      out.pointwise_max = std::max(out.pointwise_max, fstar_jump - 0.5 * fu_jump);
    }
  }

  // the form's actual surface energy contribution, 2 sum_sides <surface terms, U>
  auto dot_l = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (int q = 0; q <= l; ++q) {
      double node = 0.0;
      for (int c = 0; c < p; ++c)
        node += a[static_cast<size_t>(q) * p + c] * b[static_cast<size_t>(q) * p + c];
      s += rl.weights[q] * node;
    }
    return s;
  };
  const std::vector<double>& tau = disc.tau();
  auto dot_m = [&](const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& w) {
    double s = 0.0;
    for (int q = 0; q <= m; ++q) {
      double node = 0.0;
      for (int c = 0; c < p; ++c)
        node += a[static_cast<size_t>(q) * p + c] * b[static_cast<size_t>(q) * p + c];
      s += w[q] * node;
    }
    return s;
  };

  struct Side {
    int elem, face;
    double orient;
    bool present;
  };
  const std::array<Side, 2> sides = {
      Side{fb.conn.elem_left, fb.conn.face_left, 1.0, true},
      Side{fb.conn.elem_right, fb.conn.face_right, -1.0, !fb.is_boundary}};
  for (const Side& sd : sides) {
    if (!sd.present) continue;
    // own-oriented traces of U and fluxes on this side
    std::vector<double> u_own_l(static_cast<size_t>(l + 1) * p),
        fstar_own(static_cast<size_t>(l + 1) * p);
    for (int q = 0; q <= l; ++q) {
      const int qs = (sd.orient < 0.0 && fb.conn.reversed) ? l - q : q;
      for (int c = 0; c < p; ++c) {
        const size_t src = static_cast<size_t>(qs) * p + c;
        u_own_l[static_cast<size_t>(q) * p + c] =
            sd.orient > 0.0 ? fs.u_l[src] : fs.u_r[src];
        fstar_own[static_cast<size_t>(q) * p + c] = sd.orient * fs.fstar[src];
      }
    }
    const std::vector<double>& fn_own_l = sd.orient > 0.0 ? fs.fn_own_l_l : fs.fn_own_r_l;
    const std::vector<double>& fn_own_m = sd.orient > 0.0 ? fs.fn_own_l_m : fs.fn_own_r_m;
    const Field2& u = state.u[sd.elem];
    std::vector<double> u_own_m(static_cast<size_t>(m + 1) * p, 0.0);
    {
      const std::vector<double> tr = face_trace(u, sd.face);
      for (int q = 0; q <= m; ++q)
        for (int s = 0; s <= cfg.n; ++s) {
          const double w = disc.interp_nm()(q, s);
          if (w == 0.0) continue;
          for (int c = 0; c < p; ++c)
            u_own_m[static_cast<size_t>(q) * p + c] += w * tr[static_cast<size_t>(s) * p + c];
        }
    }

    switch (cfg.form) {
      case DGForm::W:
      case DGForm::S2:
        out.surf_total += dot_m(u_own_m, fn_own_m, rm.weights) - 2.0 * dot_l(u_own_l, fstar_own);
        break;
      case DGForm::S1: {
        if (cfg.s1_product == S1ProductGrid::L || m == l) {
          std::vector<double> h(fstar_own.size());
          for (size_t q = 0; q < h.size(); ++q) h[q] = fstar_own[q] - fn_own_l[q];
          out.surf_total += -2.0 * dot_l(u_own_l, h) - dot_m(u_own_m, fn_own_m, rm.weights);
        } else {
          std::vector<double> fstar_m(static_cast<size_t>(m + 1) * p, 0.0);
          for (int q = 0; q <= m; ++q)
            for (int s = 0; s <= l; ++s) {
              const double w = disc.interp_lm()(q, s);
              if (w == 0.0) continue;
              for (int c = 0; c < p; ++c)
                fstar_m[static_cast<size_t>(q) * p + c] +=
                    w * fstar_own[static_cast<size_t>(s) * p + c];
            }
          std::vector<double> h(fstar_m.size());
          for (size_t q = 0; q < h.size(); ++q) h[q] = fstar_m[q] - fn_own_m[q];
          out.surf_total += -2.0 * dot_m(u_own_m, h, tau) - dot_m(u_own_m, fn_own_m, rm.weights);
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

inline EnergyReport energy_budget(const Discretization& disc, const SolutionField& state) {
  const Mesh& mesh = disc.mesh();
  const SchemeConfig& cfg = disc.config();
  const int p = disc.state_dim();
  const int n = cfg.n, m = cfg.m;
  EnergyReport rep;
  rep.time = state.time;
  rep.energy = total_energy(state, mesh);
  rep.dEdt = energy_rate(state, disc.rhs(state), mesh);
  rep.gamma_hat = field_gamma_hat(mesh, disc.contravariant());

  double dissip = 0.0, pbt = 0.0, surf_total = 0.0, pointwise = -1e300;
  for (const FaceBlock& fb : disc.faces()) {
    const FaceState fs = disc.face_state(fb, state);
    const detail::FaceEnergy fe = detail::face_energy_terms(disc, fb, fs, state);
    dissip += fe.dissip;
    pbt += fe.pbt;
    surf_total += fe.surf_total;
    pointwise = std::max(pointwise, fe.pointwise_max);
  }
  rep.dissip = dissip;
  rep.pbt = pbt;
  rep.upwind_pointwise_max = pointwise > -1e299 ? pointwise : 0.0;  // no interior faces
  rep.surface_alias = surf_total + dissip + pbt;

  // volume skew remainder 2 S_M = <F, grad U>_M - <div I^M F, U>_M per element
  const QuadratureRule& rm = disc.rule_m();
  const Matrix interp_nm = interpolation_matrix(lgl_rule(n).nodes, rm.nodes);
  const Matrix grad_nm = interp_nm.multiply(differentiation_matrix(n));
  const Matrix d_m = differentiation_matrix(m);
  double vol = 0.0, coeff_div = 0.0;
  for (size_t k = 0; k < mesh.elements.size(); ++k) {
    const Field2& u = state.u[k];
    const std::array<Field2, 2> f = disc.volume_flux(u, static_cast<int>(k));
    const Field2 um = apply_pair(interp_nm, interp_nm, u);
    const Field2 du_xi = apply_pair(grad_nm, interp_nm, u);
    const Field2 du_eta = apply_pair(interp_nm, grad_nm, u);
    Field2 div = apply_dir2(d_m, f[0], 0);
    const Field2 d2 = apply_dir2(d_m, f[1], 1);
    for (size_t q = 0; q < div.a.size(); ++q) div.a[q] += d2.a[q];
    double fgrad = 0.0, divu = 0.0;
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double w = rm.weights[i] * rm.weights[j];
        double s1 = 0.0, s2 = 0.0;
        for (int c = 0; c < p; ++c) {
          s1 += f[0].at(i, j, c) * du_xi.at(i, j, c) + f[1].at(i, j, c) * du_eta.at(i, j, c);
          s2 += div.at(i, j, c) * um.at(i, j, c);
        }
        fgrad += w * s1;
        divu += w * s2;
      }
    vol += fgrad - divu;

    // reported split: -<(div Atil) U, U>_M from the strategy's natural grid
    const DivergenceReport dr = coefficient_divergence(mesh.elements[k], disc.contravariant());
    const Matrix tq = interpolation_matrix(lgl_rule(dr.eval_order).nodes, rm.nodes);
    const Field2 div_atil_m = apply_pair(tq, tq, dr.nodal);
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double w = rm.weights[i] * rm.weights[j];
        std::vector<double> au(p, 0.0);
        block_apply(&div_atil_m.a[div_atil_m.idx(i, j, 0)], p, &um.a[um.idx(i, j, 0)], au.data());
        double s = 0.0;
        for (int c = 0; c < p; ++c) s += um.at(i, j, c) * au[c];
        coeff_div -= w * s;
      }
  }
  rep.volume_resid = vol;
  rep.coeff_div_term = coeff_div;
  rep.product_rule_term = vol - coeff_div;
  rep.eps_quotient = rep.energy > 0.0 ? rep.product_rule_term / (2.0 * rep.energy) : 0.0;
  rep.closure_residual =
      std::fabs(rep.dEdt - (-rep.dissip - rep.pbt + rep.surface_alias + rep.volume_resid));
  return rep;
}

// Sampled estimate of the product-rule growth-rate quotient over random states
// (an estimate, not the max over all states).
inline double eps_quotient_estimate(const Discretization& disc, int samples = 64,
                                    uint64_t seed = 2024) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    SolutionField state = make_initial_data(disc.mesh(), disc.config().n, disc.state_dim(),
                                            "nodal-random", seed + s);
    const EnergyReport rep = energy_budget(disc, state);
    worst = std::max(worst, std::fabs(rep.eps_quotient));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Table-style edge aliasing study

struct EdgeStudyRow {
  int n = 0;
  int two_n_minus_1 = 0;
  double dissipation = 0.0;
  double aliasing = 0.0;
  double sum = 0.0;
  bool unstable = false;
};

// Model edge contribution with [[U]] = alpha (1+xi)^{q/3}, <<U>> = beta (...),
// Atil.n = gamma (...): dissipation by the order-N quadrature the scheme sees,
// aliasing by the exact integral of (1+xi)^q - I^N((1+xi)^q).
inline std::vector<EdgeStudyRow> edge_aliasing_study(int q, const std::vector<int>& n_range,
                                                     double alpha, double beta, double gamma) {
  require(q % 3 == 0, "q must be divisible by 3");
  require(!n_range.empty(), "edge study needs at least one N");
  std::vector<EdgeStudyRow> rows;
  rows.reserve(n_range.size());
  for (int n : n_range) {
    const QuadratureRule rn = lgl_rule(n);
    double quad = 0.0;
    for (int i = 0; i <= n; ++i) quad += rn.weights[i] * std::pow(1.0 + rn.nodes[i], q);
    const int fine_order = exact_rule_order(q, n);
    const QuadratureRule fine = lgl_rule(fine_order);
    std::vector<double> v(fine.num_points());
    for (int i = 0; i < fine.num_points(); ++i) v[i] = std::pow(1.0 + fine.nodes[i], q);
    EdgeStudyRow row;
    row.n = n;
    row.two_n_minus_1 = 2 * n - 1;
    row.dissipation = -alpha * alpha * std::fabs(gamma) * quad;
    row.aliasing = alpha * beta * gamma * interpolation_error_integral(v, n);
    row.sum = row.dissipation + row.aliasing;
    row.unstable = row.sum > 0.0;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Scheme comparison experiment

struct SchemeTrace {
  std::string name;
  std::vector<EnergyReport> reports;
  double max_rate_rel = -1e300;  // max over steps of dEdt / E
  bool stable = true;            // dEdt <= 1e-8 E at every monitored step
};

struct ComparisonResult {
  std::vector<SchemeTrace> traces;
};

inline SchemeTrace run_energy_trace(const std::string& name, const Mesh& mesh,
                                    const ContravariantField& cf, const SchemeConfig& cfg,
                                    const SolutionField& initial, double t_end, double dt,
                                    const BoundaryCondition& bc = {}, int nthreads = 1) {
  const Discretization disc(mesh, cf, cfg, bc, nthreads);
  SchemeTrace trace;
  trace.name = name;
  SolutionField state = initial;
  integrate(state, t_end, dt, disc, [&](int, const SolutionField& s) {
    trace.reports.push_back(energy_budget(disc, s));
  });
  for (const EnergyReport& r : trace.reports) {
    const double rel = r.energy > 0.0 ? r.dEdt / r.energy : 0.0;
    trace.max_rate_rel = std::max(trace.max_rate_rel, rel);
    if (r.dEdt > 1e-8 * r.energy) trace.stable = false;
  }
  return trace;
}

// Runs standard, volume-only overintegrated (S1 and S2) and fully
// overintegrated schemes from identical initial data and reports the traces.
inline ComparisonResult scheme_comparison_experiment(const Mesh& mesh, const CoefficientField& sys,
                                                     int n, int m, double t_end, double dt,
                                                     const SolutionField& initial,
                                                     FluxStrategy strategy = FluxStrategy::P2N,
                                                     bool divfree = false, int nthreads = 1) {
  ComparisonResult res;
  const ContravariantField cf = build_contravariant(mesh, sys, strategy, divfree);
  SchemeConfig cfg;
  cfg.strategy = strategy;
  cfg.divfree = divfree;
  cfg.n = n;

  cfg.m = n;
  cfg.l = n;
  cfg.form = DGForm::W;
  res.traces.push_back(run_energy_trace("standard", mesh, cf, cfg, initial, t_end, dt, {}, nthreads));

  cfg.m = m;
  cfg.l = n;
  cfg.form = DGForm::S1;
  res.traces.push_back(
      run_energy_trace("volume-oi-s1", mesh, cf, cfg, initial, t_end, dt, {}, nthreads));

  cfg.form = DGForm::S2;
  res.traces.push_back(
      run_energy_trace("volume-oi-s2", mesh, cf, cfg, initial, t_end, dt, {}, nthreads));

  cfg.l = m;
  cfg.form = DGForm::W;
  res.traces.push_back(run_energy_trace("full-oi", mesh, cf, cfg, initial, t_end, dt, {}, nthreads));
  return res;
}

}  // namespace dg

#endif  // DG_ANALYSIS_HPP
