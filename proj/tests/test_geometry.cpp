#include <catch2/catch.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dg/geometry.hpp"
#include "dg/linalg.hpp"
#include "dg/meshes.hpp"

using namespace dg;

namespace {

MappingSpec identity_quad() {
  return affine_quad({{{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}, {1.0, 1.0}}});
}

}  // namespace

TEST_CASE("identity map has unit metric terms") {
  const CurvedElement e = build_element(identity_quad(), 4);
  for (int j = 0; j < e.points(); ++j)
    for (int i = 0; i < e.points(); ++i) {
      const size_t node = e.node_index2(i, j);
      CHECK(e.jac[node] == Approx(1.0).margin(1e-13));
      CHECK(e.ja[node * 4 + 0] == Approx(1.0).margin(1e-13));   // (J a^1)_x
      CHECK(e.ja[node * 4 + 1] == Approx(0.0).margin(1e-13));
      CHECK(e.ja[node * 4 + 2] == Approx(0.0).margin(1e-13));   // (J a^2)_x
      CHECK(e.ja[node * 4 + 3] == Approx(1.0).margin(1e-13));
    }
  CHECK(metric_identity_residual(e) <= 1e-14);
}

TEST_CASE("affine scaling x=2xi, y=3eta") {
  const MappingSpec spec =
      affine_quad({{{-2.0, -3.0}, {2.0, -3.0}, {-2.0, 3.0}, {2.0, 3.0}}});
  const CurvedElement e = build_element(spec, 3);
  for (size_t node = 0; node < e.jac.size(); ++node) {
    CHECK(e.jac[node] == Approx(6.0).margin(1e-12));
    CHECK(e.ja[node * 4 + 0] == Approx(3.0).margin(1e-12));
    CHECK(e.ja[node * 4 + 1] == Approx(0.0).margin(1e-12));
    CHECK(e.ja[node * 4 + 2] == Approx(0.0).margin(1e-12));
    CHECK(e.ja[node * 4 + 3] == Approx(2.0).margin(1e-12));
  }
}

TEST_CASE("perturbed trilinear hex satisfies the identity with cross-product metrics") {
  const CurvedElement e = build_element(perturbed_trilinear_hex_spec(), 4, MetricForm::cross);
  CHECK(metric_identity_residual(e) <= 1e-12);
}

TEST_CASE("curved hex: curl form holds, cross form fails on a trig perturbation") {
  for (int n : {4, 6}) {
    const CurvedElement curl = build_element(curved_hex_spec(n), n, MetricForm::curl);
    CHECK(metric_identity_residual(curl) <= 1e-11);
  }
  const int n = 5;
  const CurvedElement curl_trig = build_element(curved_hex_spec(n, 0.1, true), n, MetricForm::curl);
  CHECK(metric_identity_residual(curl_trig) <= 1e-11);
  const CurvedElement cross_trig =
      build_element(curved_hex_spec(n, 0.1, true), n, MetricForm::cross);
  CHECK(metric_identity_residual(cross_trig) > 1e-3);
}

TEST_CASE("tangled mapping reports the offending node") {
  // fold the quad so the Jacobian changes sign
  const MappingSpec bad =
      affine_quad({{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});  // NW and NE swapped
  CHECK_THROWS_AS(build_element(bad, 3), numerical_error);
  try {
    build_element(bad, 3);
  } catch (const numerical_error& err) {
    CHECK(std::string(err.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("face traces extract the tensor field restriction") {
  const CurvedElement e = build_element(identity_quad(), 5);
  Field2 f(5, 1);
  const QuadratureRule r = lgl_rule(5);
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 6; ++i) f.at(i, j) = r.nodes[i];  // field = xi
  const std::vector<double> east = face_trace(f, 1);
  for (double v : east) CHECK(v == Approx(1.0).margin(1e-14));
  Field2 c(5, 1);
  for (auto& v : c.a) v = 7.5;
  for (double v : face_trace(c, 3)) CHECK(v == Approx(7.5).margin(1e-14));
}

TEST_CASE("face trace of a random polynomial equals the interpolant on the face") {
  DetRng rng(5);
  const int n = 6;
  const QuadratureRule r = lgl_rule(n);
  Field2 f(n, 1);
  // random bi-degree-N polynomial via nodal values (its own interpolant)
  for (auto& v : f.a) v = rng.uniform(-1.0, 1.0);
  for (int face = 0; face < 4; ++face) {
    const std::vector<double> tr = face_trace(f, face);
    // evaluate the tensor interpolant directly at the face nodes
    const std::vector<double> bw = barycentric_weights(r.nodes);
    for (int q = 0; q <= n; ++q) {
      const double xi = face_axis(face) == 0 ? (face_side(face) == 0 ? -1.0 : 1.0) : r.nodes[q];
      const double eta = face_axis(face) == 0 ? r.nodes[q] : (face_side(face) == 0 ? -1.0 : 1.0);
      double val = 0.0;
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
          // Lagrange basis by direct product form
          double li = 1.0, lj = 1.0;
          for (int k = 0; k <= n; ++k) {
            if (k != i) li *= (xi - r.nodes[k]) / (r.nodes[i] - r.nodes[k]);
            if (k != j) lj *= (eta - r.nodes[k]) / (r.nodes[j] - r.nodes[k]);
          }
          val += f.at(i, j) * li * lj;
        }
      CHECK(tr[q] == Approx(val).margin(1e-13));
    }
  }
}

TEST_CASE("built-in meshes are watertight with antiparallel normals") {
  for (const char* name : {"curved-quad", "periodic-2x2"}) {
    const MeshSpec spec = builtin_mesh_spec(name);
    const Mesh mesh = build_mesh(spec, 5);
    for (const FaceConnection& conn : mesh.interior) {
      CHECK(connection_mismatch(mesh, conn) <= 1e-12);
      const ElementFace& fl = mesh.elements[conn.elem_left].faces[conn.face_left];
      const ElementFace& fr = mesh.elements[conn.elem_right].faces[conn.face_right];
      const int np = static_cast<int>(fl.surf_jac.size());
      for (int q = 0; q < np; ++q) {
        const int qr = conn.reversed ? np - 1 - q : q;
        CHECK(fl.surf_jac[q] == Approx(fr.surf_jac[qr]).margin(1e-12));
        CHECK(fl.normal[q * 2 + 0] + fr.normal[qr * 2 + 0] == Approx(0.0).margin(1e-12));
        CHECK(fl.normal[q * 2 + 1] + fr.normal[qr * 2 + 1] == Approx(0.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("2-D metric identity and free-stream seed on curved meshes") {
  for (const char* name : {"curved-quad", "periodic-2x2"}) {
    const Mesh mesh = build_mesh(builtin_mesh_spec(name), 6);
    for (const CurvedElement& e : mesh.elements) {
      CHECK(metric_identity_residual(e) <= 1e-11);
      // constant W contracted with the metric divergence
      const Matrix d = differentiation_matrix(e.order);
      const double w[2] = {0.7, -1.3};
      Field2 f1(e.order, 1), f2(e.order, 1);
      for (int j = 0; j < e.points(); ++j)
        for (int i = 0; i < e.points(); ++i) {
          const size_t node = e.node_index2(i, j);
          f1.at(i, j) = e.ja[node * 4 + 0] * w[0] + e.ja[node * 4 + 1] * w[1];
          f2.at(i, j) = e.ja[node * 4 + 2] * w[0] + e.ja[node * 4 + 3] * w[1];
        }
      const Field2 d1 = apply_dir2(d, f1, 0);
      const Field2 d2 = apply_dir2(d, f2, 1);
      for (size_t q = 0; q < d1.a.size(); ++q)
        CHECK(d1.a[q] + d2.a[q] == Approx(0.0).margin(1e-11));
    }
  }
}

TEST_CASE("geometry order above the solution order is rejected") {
  const MeshSpec spec = builtin_mesh_spec("curved-quad", {{"ngeo", 4.0}});
  CHECK_THROWS_AS(build_mesh(spec, 3), config_error);
}

TEST_CASE("isoparametric case N_geo = N builds and keeps the identity") {
  const Mesh mesh = build_mesh(builtin_mesh_spec("curved-quad", {{"ngeo", 4.0}}), 4);
  CHECK(metric_identity_residual(mesh.elements[0]) <= 1e-11);
}

TEST_CASE("mesh file round trip") {
  const MeshSpec spec = builtin_mesh_spec("periodic-2x2");
  const std::string path = std::filesystem::temp_directory_path() / "dg_roundtrip.mesh";
  write_mesh_file(spec, path);
  const MeshSpec back = parse_mesh_file(path);
  REQUIRE(back.mappings.size() == spec.mappings.size());
  REQUIRE(back.interior.size() == spec.interior.size());
  REQUIRE(back.boundary.size() == spec.boundary.size());
  for (size_t k = 0; k < spec.mappings.size(); ++k) {
    CHECK(back.mappings[k].geo_order == spec.mappings[k].geo_order);
    for (int f = 0; f < 4; ++f)
      for (size_t q = 0; q < spec.mappings[k].curves[f].size(); ++q)
        CHECK(back.mappings[k].curves[f][q] == spec.mappings[k].curves[f][q]);
  }
  const Mesh mesh = build_mesh(back, 4);
  CHECK(mesh.elements.size() == 4);
  std::filesystem::remove(path);
}

TEST_CASE("mesh parser reports the offending line") {
  std::istringstream bad("dgmesh 1\ndim 3\n");
  try {
    parse_mesh_stream(bad);
    FAIL("expected a parse error");
  } catch (const config_error& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
}
