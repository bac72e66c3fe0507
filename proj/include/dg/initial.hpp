#ifndef DG_INITIAL_HPP
#define DG_INITIAL_HPP

#include <cmath>
#include <map>
#include <string>

#include "dg/linalg.hpp"
#include "dg/meshes.hpp"
#include "dg/solver.hpp"

namespace dg {

// Seeded initial states. "smooth-random" is a low-order trigonometric series
// sampled in physical space (continuous across faces); "nodal-random" fills
// every nodal value independently (rough, discontinuous); "sine-x" is the
// advection benchmark profile; "constant" fills component 0.
inline SolutionField make_initial_data(const Mesh& mesh, int n, int p, const std::string& name,
                                       uint64_t seed = 0,
                                       const std::map<std::string, double>& params = {}) {
  auto get = [&params](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  SolutionField state = make_state(mesh, n, p);
  const double pi = std::acos(-1.0);
  if (name == "sine-x" || name == "constant") {
    const double amp = get("amplitude", 1.0);
    for (size_t k = 0; k < mesh.elements.size(); ++k) {
      const CurvedElement& e = mesh.elements[k];
      for (size_t node = 0; node < e.jac.size(); ++node) {
        const double x = e.coords[node * 2 + 0];
        state.u[k].a[node * p + 0] = name == "constant" ? amp : amp * std::sin(pi * x);
      }
    }
    return state;
  }
  if (name == "smooth-random") {
    DetRng rng(seed);
    const int modes = static_cast<int>(get("modes", 2.0));
    std::vector<double> cs, ph_x, ph_y, kx, ky;
    for (int c = 0; c < p; ++c)
      for (int a = 0; a <= modes; ++a)
        for (int b = 0; b <= modes; ++b) {
          cs.push_back(rng.uniform(-1.0, 1.0));
          ph_x.push_back(rng.uniform(0.0, 2.0 * pi));
          ph_y.push_back(rng.uniform(0.0, 2.0 * pi));
          kx.push_back(a);
          ky.push_back(b);
        }
    size_t idx = 0;
    for (int c = 0; c < p; ++c) {
      const size_t base = idx;
      for (size_t k = 0; k < mesh.elements.size(); ++k) {
        const CurvedElement& e = mesh.elements[k];
        for (size_t node = 0; node < e.jac.size(); ++node) {
          const double x = e.coords[node * 2 + 0], y = e.coords[node * 2 + 1];
          double v = 0.0;
          size_t t = base;
          for (int a = 0; a <= modes; ++a)
            for (int b = 0; b <= modes; ++b, ++t)
              v += cs[t] * std::cos(pi * kx[t] * x + ph_x[t]) * std::cos(pi * ky[t] * y + ph_y[t]);
          state.u[k].a[node * p + c] = v;
        }
      }
      idx = base + static_cast<size_t>(modes + 1) * (modes + 1);
    }
    return state;
  }
  if (name == "nodal-random") {
    DetRng rng(seed);
    for (size_t k = 0; k < mesh.elements.size(); ++k)
      for (double& v : state.u[k].a) v = rng.uniform(-1.0, 1.0);
    return state;
  }
  if (name == "smooth-plus-jumps") {
    // a resolved background field with O(jump_amplitude) interface jumps, the
    // regime where surface aliasing can outweigh the upwind dissipation
    const double eps = get("jump_amplitude", 1e-3);
    SolutionField smooth = make_initial_data(mesh, n, p, "smooth-random", seed, params);
    const SolutionField rough = make_initial_data(mesh, n, p, "nodal-random", seed + 1000);
    for (size_t k = 0; k < smooth.u.size(); ++k)
      for (size_t q = 0; q < smooth.u[k].a.size(); ++q) smooth.u[k].a[q] += eps * rough.u[k].a[q];
    return smooth;
  }
  throw config_error("unknown initial condition: " + name +
                     " (available: sine-x, constant, smooth-random, nodal-random, smooth-plus-jumps)");
}

}  // namespace dg

#endif  // DG_INITIAL_HPP
