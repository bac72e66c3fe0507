// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Run as `ctest -R acceptance` or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dg/analysis.hpp"
#include "dg/csv.hpp"
#include "dg/initial.hpp"
#include "dg/meshes.hpp"
#include "dg/solver.hpp"
#include "dg/system.hpp"
#include "dg/verify.hpp"

using namespace dg;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::printf("criterion %2d [%s] %s: %s\n", id, pass ? "PASS" : "FAIL", label.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_table_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Ref {
    int n;
    double diss, alias, sum;
    bool unstable;
  };
  const std::vector<Ref> refs = {
      {3, -4.434e-02, 1.674e+01, 1.670e+01, true},
      {4, -3.092e-02, 3.327e+00, 3.296e+00, true},
      {5, -2.799e-02, 3.967e-01, 3.687e-01, true},
      {6, -2.762e-02, 2.560e-02, -2.018e-03, false},
      {7, -2.759e-02, 7.737e-04, -2.682e-02, false},
      {8, -2.759e-02, 8.237e-06, -2.759e-02, false},
      {9, -2.759e-02, 1.297e-08, -2.759e-02, false},
      {10, -2.759e-02, 0.0, -2.759e-02, false},
      {11, -2.759e-02, 0.0, -2.759e-02, false},
      {12, -2.759e-02, 0.0, -2.759e-02, false},
      {13, -2.759e-02, 0.0, -2.759e-02, false},
  };
  std::vector<int> ns;
  for (const Ref& r : refs) ns.push_back(r.n);
  const std::vector<EdgeStudyRow> rows = edge_aliasing_study(18, ns, 1e-3, 1.0, -1.0);
  bool pass = rows.size() == refs.size();
  double worst_rel = 0.0;
  for (size_t i = 0; pass && i < rows.size(); ++i) {
    const Ref& ref = refs[i];
    const EdgeStudyRow& got = rows[i];
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
    if (rel(got.dissipation, ref.diss) > 5e-3) pass = false;
    if (rel(got.sum, ref.sum) > 5e-3) pass = false;
    worst_rel = std::max({worst_rel, rel(got.dissipation, ref.diss), rel(got.sum, ref.sum)});
    if (ref.n >= 10) {
      if (std::fabs(got.aliasing) > 1e-12) pass = false;
    } else {
      if (rel(got.aliasing, ref.alias) > 5e-3) pass = false;
      worst_rel = std::max(worst_rel, rel(got.aliasing, ref.alias));
    }
    if (got.unstable != ref.unstable) pass = false;
    if ((ref.n <= 5) != got.unstable) pass = false;  // sum > 0 exactly for N in {3,4,5}
  }
  const double dt = seconds_since(t0);
  if (dt >= 1.0) pass = false;
  report(1, "edge-study table reproduction", pass,
         "11 rows, worst column deviation " + fmt(worst_rel) + ", runtime " + fmt(dt) + " s");
}

void criterion_2_quadrature() {
  const auto t0 = std::chrono::steady_clock::now();
  const VerifyCheck c = verify_quadrature_exactness(16, 200);
  const double dt = seconds_since(t0);
  report(2, "quadrature exactness to degree 2N-1", c.pass && dt < 1.0,
         "max relative error " + fmt(c.measured) + ", runtime " + fmt(dt) + " s");
}

void criterion_3_gauss_law() {
  const VerifyCheck c2 = verify_gauss_law({3, 5, 8}, 50);
  const VerifyCheck c3 = verify_gauss_law_3d({3, 5}, 10);
  report(3, "discrete Gauss law at orders N, 2N, 3N", c2.pass && c3.pass,
         "max relative residual 2-D " + fmt(c2.measured) + ", 3-D " + fmt(c3.measured));
}

void criterion_4_metric_free_stream() {
  const VerifyCheck hex = verify_metric_identity_hex(6);
  const VerifyCheck rhs = verify_free_stream(4);
  const VerifyCheck steps = verify_free_stream_steps(4, 100);
  report(4, "metric identity and free-stream preservation", hex.pass && rhs.pass && steps.pass,
         "hex residual " + fmt(hex.measured) + ", rhs " + fmt(rhs.measured) + ", 100-step drift " +
             fmt(steps.measured));
}

void criterion_5_full_oi_stability() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 4, m = 2 * n + 1;
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  const CoefficientField sys = make_system("rotation");
  const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, true);
  SchemeConfig cfg{n, m, m, FluxStrategy::P2N, DGForm::W};
  cfg.divfree = true;
  const Discretization disc(mesh, cf, cfg);
  const double dt = cfl_timestep(disc, 0.4);
  bool pass = true;
  double worst_rate = -1e300, worst_step = -1e300;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    SolutionField state = make_initial_data(mesh, n, 1, "nodal-random", seed);
    const double e0 = total_energy(state, mesh);
    const double rate = energy_rate(state, disc.rhs(state), mesh);
    worst_rate = std::max(worst_rate, rate / e0);
    if (rate > 1e-10 * e0) pass = false;
    double prev = e0;
    for (int s = 0; s < 200; ++s) {
      step_rk(state, dt, disc);
      const double e = total_energy(state, mesh);
      worst_step = std::max(worst_step, (e - prev) / prev);
      if (e > prev * (1.0 + 1e-10)) pass = false;
      prev = e;
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) pass = false;
  report(5, "full overintegration stability (100 random states)", pass,
         "max dEdt/E " + fmt(worst_rate) + ", max per-step growth " + fmt(worst_step) +
             ", runtime " + fmt(elapsed) + " s");
}

void criterion_6_standard_growth() {
  const int n = 3;
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  const CoefficientField sys = make_system("rough");
  const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, true);
  SchemeConfig std_cfg{n, n, n, FluxStrategy::P2N, DGForm::W};
  std_cfg.divfree = true;
  SchemeConfig oi_cfg{n, 2 * n + 1, 2 * n + 1, FluxStrategy::P2N, DGForm::W};
  oi_cfg.divfree = true;
  const Discretization dstd(mesh, cf, std_cfg);
  const Discretization doi(mesh, cf, oi_cfg);
  const double dt = cfl_timestep(dstd, 0.3);
  const SolutionField initial = make_initial_data(mesh, n, 1, "smooth-random", 1);

  double quot0 = 0.0, max_rate = -1e300, max_oi_rel = -1e300;
  {
    SolutionField s = initial;
    integrate(s, 60 * dt, dt, dstd, [&](int step, const SolutionField& cur) {
      const EnergyReport rep = energy_budget(dstd, cur);
      if (step == 0) quot0 = rep.eps_quotient;
      max_rate = std::max(max_rate, rep.dEdt);
    });
  }
  {
    SolutionField s = initial;
    integrate(s, 60 * dt, dt, doi, [&](int, const SolutionField& cur) {
      const EnergyReport rep = energy_budget(doi, cur);
      max_oi_rel = std::max(max_oi_rel, rep.dEdt / rep.energy);
    });
  }
  const bool pass = std::fabs(quot0) > 1e-3 && max_rate > 0.0 && max_oi_rel <= 1e-10;
  // golden values (seed 1): quotient ~ 1.25e-01, standard max dEdt ~ 4.5e-01
  report(6, "standard-scheme growth term exists, full OI removes it", pass,
         "quotient " + fmt(quot0) + ", standard max dEdt " + fmt(max_rate) +
             ", full-OI max dEdt/E " + fmt(max_oi_rel));
}

void criterion_7_volume_oi_surface_aliasing() {
  bool pass = true;
  std::string detail;
  {
    const int n = 3;
    const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
    const CoefficientField sys = make_system("rough");
    const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, true);
    SchemeConfig cfg{n, 8, n, FluxStrategy::P2N, DGForm::S2};
    cfg.divfree = true;
    const Discretization disc(mesh, cf, cfg);
    const SolutionField state =
        make_initial_data(mesh, n, 1, "smooth-plus-jumps", 7, {{"jump_amplitude", 1e-3}});
    const EnergyReport rep = energy_budget(disc, state);
    if (!(std::fabs(rep.surface_alias) > 1e-8)) pass = false;
    if (!(rep.closure_residual <= 1e-9 * std::max(1.0, std::fabs(rep.dEdt)))) pass = false;
    detail = "underresolved alias " + fmt(rep.surface_alias) + " vs dissip " + fmt(rep.dissip) +
             ", closure " + fmt(rep.closure_residual);
  }
  {
    const int n = 8;
    const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
    const CoefficientField sys = make_system("rotation");
    const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, true);
    SchemeConfig cfg{n, 12, n, FluxStrategy::P2N, DGForm::S2};
    cfg.divfree = true;
    const Discretization disc(mesh, cf, cfg);
    SolutionField state = make_initial_data(mesh, n, 1, "smooth-random", 1);
    const double dt = cfl_timestep(disc, 0.3);
    integrate(state, 30 * dt, dt, disc, [](int, const SolutionField&) {});
    const EnergyReport rep = energy_budget(disc, state);
    if (!(rep.dissip > 0.0 && std::fabs(rep.surface_alias) < 0.01 * rep.dissip)) pass = false;
    detail += "; resolved ratio " + fmt(std::fabs(rep.surface_alias) / rep.dissip);
  }
  report(7, "volume-only OI surface aliasing", pass, detail);
}

void criterion_8_s1_conservation() {
  const int n = 3, m = 8;
  const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
  const CoefficientField sys = make_system("rough");
  const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, false);
  const SolutionField initial = make_initial_data(mesh, n, 1, "nodal-random", 4242);
  const QuadratureRule rn = lgl_rule(n);
  auto conserved = [&](const SolutionField& s) {
    double total = 0.0;
    for (size_t k = 0; k < mesh.elements.size(); ++k) {
      const CurvedElement& e = mesh.elements[k];
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          total += rn.weights[i] * rn.weights[j] * e.jac[e.node_index2(i, j)] * s.u[k].at(i, j, 0);
    }
    return total;
  };
  double w_change = 0.0, s2_change = 0.0, s1_change = 0.0;
  for (DGForm form : {DGForm::W, DGForm::S2, DGForm::S1}) {
    SchemeConfig cfg{n, m, n, FluxStrategy::P2N, form};
    const Discretization disc(mesh, cf, cfg);
    SolutionField state = initial;
    const double before = conserved(state);
    step_rk(state, 5e-3, disc);
    const double change = std::fabs(conserved(state) - before);
    if (form == DGForm::W) w_change = change;
    if (form == DGForm::S2) s2_change = change;
    if (form == DGForm::S1) s1_change = change;
  }
  const bool pass = w_change <= 1e-11 && s2_change <= 1e-11 && s1_change > 1e-9;
  report(8, "form S1 conservation violation for M > N", pass,
         "per-step change W " + fmt(w_change) + ", S2 " + fmt(s2_change) + ", S1 " +
             fmt(s1_change));
}

void criterion_9_pointwise_dissipation() {
  double worst = -1e300;
  for (const char* sysname : {"rotation", "wave", "rough"}) {
    const CoefficientField sys = make_system(sysname);
    for (int n : {3, 5}) {
      const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
      for (FluxStrategy strat : {FluxStrategy::PN, FluxStrategy::P2N, FluxStrategy::P3N}) {
        const ContravariantField cf = build_contravariant(mesh, sys, strat);
        // the collapsed P^N flux only appears in the standard scheme; the
        // pointwise identity needs the flux trace to factor as Atil.n U at
        // the surface quadrature nodes
        for (auto [m, l] : {std::pair{n, n}, std::pair{2 * n + 2, n}, std::pair{2 * n + 2, 2 * n + 2}}) {
          if (strat == FluxStrategy::PN && (m != n || l != n)) continue;
          SchemeConfig cfg{n, m, l, strat, DGForm::W};
          const Discretization disc(mesh, cf, cfg);
          const SolutionField state =
              make_initial_data(mesh, n, sys.p, "nodal-random", 77 + n);
          const EnergyReport rep = energy_budget(disc, state);
          worst = std::max(worst, rep.upwind_pointwise_max);
        }
      }
    }
  }
  report(9, "pointwise upwind interface dissipation", worst <= 1e-12,
         "max over fixtures and face nodes " + fmt(worst));
}

void criterion_10_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const CoefficientField sys = make_system("constant", {{"a1", 1.0}, {"a2", 0.0}});
  const double t_end = 0.5;
  std::vector<double> errors;
  for (int n : {4, 6, 8}) {
    const Mesh mesh = build_mesh(builtin_mesh_spec("periodic-2x2"), n);
    const ContravariantField cf = build_contravariant(mesh, sys, FluxStrategy::P2N, true);
    SchemeConfig cfg{n, n, n, FluxStrategy::P2N, DGForm::W};
    cfg.divfree = true;
    const Discretization disc(mesh, cf, cfg);
    SolutionField state = make_initial_data(mesh, n, 1, "sine-x");
    const double dt = cfl_timestep(disc, 0.1);
    integrate(state, t_end, dt, disc, [](int, const SolutionField&) {});
    // broken L2 error against the translated exact profile on a finer grid
    const int fine = 2 * n + 2;
    const Matrix up = interpolation_matrix(lgl_rule(n).nodes, lgl_rule(fine).nodes);
    const QuadratureRule rf = lgl_rule(fine);
    const double pi = std::acos(-1.0);
    double err2 = 0.0;
    for (size_t k = 0; k < mesh.elements.size(); ++k) {
      const CurvedElement& e = mesh.elements[k];
      Field2 coords(n, 2), jac(n, 1);
      for (size_t node = 0; node < e.jac.size(); ++node) {
        coords.a[node * 2] = e.coords[node * 2];
        coords.a[node * 2 + 1] = e.coords[node * 2 + 1];
        jac.a[node] = e.jac[node];
      }
      const Field2 cf_fine = apply_pair(up, up, coords);
      const Field2 j_fine = apply_pair(up, up, jac);
      const Field2 u_fine = apply_pair(up, up, state.u[k]);
      for (int j = 0; j <= fine; ++j)
        for (int i = 0; i <= fine; ++i) {
          const double x = cf_fine.at(i, j, 0);
          const double diff = u_fine.at(i, j) - std::sin(pi * (x - t_end));
          err2 += rf.weights[i] * rf.weights[j] * j_fine.at(i, j) * diff * diff;
        }
    }
    errors.push_back(std::sqrt(err2));
  }
  // golden values from the pinned fixture (10% regression band)
  const std::vector<double> golden = {1.401e-02, 2.375e-04, 2.475e-06};
  bool pass = true;
  std::string detail = "errors";
  for (size_t i = 0; i < errors.size(); ++i) {
    detail += " " + fmt(errors[i]);
    if (golden[i] > 0.0 && std::fabs(errors[i] - golden[i]) > 0.1 * golden[i]) pass = false;
  }
  if (!(errors[0] > errors[1] && errors[1] > errors[2])) pass = false;
  if (!(errors[0] / errors[1] > 5.0 && errors[1] / errors[2] > 5.0)) pass = false;
  const double elapsed = seconds_since(t0);
  if (elapsed >= 10.0) pass = false;
  detail += ", ratios " + fmt(errors[0] / errors[1]) + " and " + fmt(errors[1] / errors[2]) +
            ", runtime " + fmt(elapsed) + " s";
  report(10, "spectral convergence of periodic advection", pass, detail);
}

}  // namespace

int main() {
  criterion_1_table_reproduction();
  criterion_2_quadrature();
  criterion_3_gauss_law();
  criterion_4_metric_free_stream();
  criterion_5_full_oi_stability();
  criterion_6_standard_growth();
  criterion_7_volume_oi_surface_aliasing();
  criterion_8_s1_conservation();
  criterion_9_pointwise_dissipation();
  criterion_10_convergence();
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
