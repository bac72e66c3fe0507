#ifndef DG_MESHES_HPP
#define DG_MESHES_HPP

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dg/geometry.hpp"

namespace dg {

// Mapping data plus connectivity, independent of the solution order. Elements
// are instantiated at a given N by build_mesh.
struct MeshSpec {
  int dim = 2;
  std::vector<MappingSpec> mappings;
  std::vector<FaceConnection> interior;
  std::vector<BoundaryFace> boundary;
};

inline Mesh build_mesh(const MeshSpec& spec, int n, MetricForm form = MetricForm::curl) {
  Mesh mesh;
  mesh.dim = spec.dim;
  mesh.elements.reserve(spec.mappings.size());
  for (size_t k = 0; k < spec.mappings.size(); ++k)
    mesh.elements.push_back(build_element(spec.mappings[k], n, form, static_cast<int>(k)));
  mesh.interior = spec.interior;
  mesh.boundary = spec.boundary;
  for (const FaceConnection& conn : mesh.interior) {
    const double gap = connection_mismatch(mesh, conn);
    if (gap > 1e-10)
      throw config_error("mesh is not watertight: connection between element " +
                         std::to_string(conn.elem_left) + " and element " +
                         std::to_string(conn.elem_right) + " has gap " + std::to_string(gap));
  }
  return mesh;
}

// Built-in (a): unit quad with a curved top face sampled from a sinusoid, so
// the face curve is the degree-N_geo polynomial through those samples.
inline MeshSpec curved_quad_spec(double amplitude = 0.08, int geo_order = 4) {
  const double pi = std::acos(-1.0);
  const std::vector<double> gnodes = lgl_rule(geo_order).nodes;
  std::array<std::vector<double>, 4> curves;
  for (int f = 0; f < 4; ++f) curves[f].assign(static_cast<size_t>(geo_order + 1) * 2, 0.0);
  for (int q = 0; q <= geo_order; ++q) {
    const double s = 0.5 * (gnodes[q] + 1.0);
    curves[0][q * 2 + 0] = 0.0;  // west
    curves[0][q * 2 + 1] = s;
    curves[1][q * 2 + 0] = 1.0;  // east
    curves[1][q * 2 + 1] = s;
    curves[2][q * 2 + 0] = s;  // south
    curves[2][q * 2 + 1] = 0.0;
    curves[3][q * 2 + 0] = s;  // north, curved
    curves[3][q * 2 + 1] = 1.0 + amplitude * std::sin(pi * s);
  }
  MeshSpec spec;
  spec.dim = 2;
  spec.mappings.push_back(transfinite_quad(geo_order, curves));
  for (int f = 0; f < 4; ++f) spec.boundary.push_back({0, f, "exterior"});
  return spec;
}

// Built-in (b): 2x2 fully periodic mesh of [0,2]^2 under the bi-quadratic
// perturbation x = u + k P, y = v - 0.8 k P with P = u(2-u) v(2-v). Interior
// faces are curved, the outer boundary stays straight so the periodic pairing
// is exact. kappa = 0 gives the Cartesian mesh.
inline MeshSpec periodic_quad_spec(double kappa = 0.1, int geo_order = 2) {
  auto phys = [kappa](double u, double v) {
    const double p = u * (2.0 - u) * v * (2.0 - v);
    return std::array<double, 2>{u + kappa * p, v - 0.8 * kappa * p};
  };
  const std::vector<double> gnodes = lgl_rule(geo_order).nodes;
  MeshSpec spec;
  spec.dim = 2;
  for (int ey = 0; ey < 2; ++ey)
    for (int ex = 0; ex < 2; ++ex) {
      std::array<std::vector<double>, 4> curves;
      for (int f = 0; f < 4; ++f) curves[f].assign(static_cast<size_t>(geo_order + 1) * 2, 0.0);
      for (int q = 0; q <= geo_order; ++q) {
        const double t = 0.5 * (gnodes[q] + 1.0);
        const std::array<double, 2> w = phys(ex, ey + t);
        const std::array<double, 2> e = phys(ex + 1.0, ey + t);
        const std::array<double, 2> s = phys(ex + t, ey);
        const std::array<double, 2> n = phys(ex + t, ey + 1.0);
        curves[0][q * 2] = w[0]; curves[0][q * 2 + 1] = w[1];
        curves[1][q * 2] = e[0]; curves[1][q * 2 + 1] = e[1];
        curves[2][q * 2] = s[0]; curves[2][q * 2 + 1] = s[1];
        curves[3][q * 2] = n[0]; curves[3][q * 2 + 1] = n[1];
      }
      spec.mappings.push_back(transfinite_quad(geo_order, curves));
    }
  auto id = [](int ex, int ey) { return ex + 2 * ey; };
  // interior vertical and horizontal faces
  spec.interior.push_back({id(0, 0), 1, id(1, 0), 0, false, {0.0, 0.0}});
  spec.interior.push_back({id(0, 1), 1, id(1, 1), 0, false, {0.0, 0.0}});
  spec.interior.push_back({id(0, 0), 3, id(0, 1), 2, false, {0.0, 0.0}});
  spec.interior.push_back({id(1, 0), 3, id(1, 1), 2, false, {0.0, 0.0}});
  // periodic wraps
  spec.interior.push_back({id(1, 0), 1, id(0, 0), 0, false, {-2.0, 0.0}});
  spec.interior.push_back({id(1, 1), 1, id(0, 1), 0, false, {-2.0, 0.0}});
  spec.interior.push_back({id(0, 1), 3, id(0, 0), 2, false, {0.0, -2.0}});
  spec.interior.push_back({id(1, 1), 3, id(1, 0), 2, false, {0.0, -2.0}});
  return spec;
}

// Built-in (c): single curved hex on [0,1]^3. Polynomial face bumps by
// default; the trig variant samples a non-polynomial perturbation for the
// cross-product metric comparison. Returned as a MappingSpec since the 3-D
// element is only used standalone.
inline MappingSpec curved_hex_spec(int geo_order, double kappa = 0.12, bool trig = false) {
  const double pi = std::acos(-1.0);
  return analytic_map(3, geo_order, [kappa, trig, pi](double xi, double eta, double zeta) {
    const double u = 0.5 * (xi + 1.0), v = 0.5 * (eta + 1.0), w = 0.5 * (zeta + 1.0);
    if (trig)
      return std::array<double, 3>{u + kappa * std::sin(pi * v) * std::sin(pi * w),
                                   v + kappa * std::sin(pi * w) * std::sin(pi * u),
                                   w + kappa * std::sin(pi * u) * std::sin(pi * v)};
    return std::array<double, 3>{u + kappa * v * (1.0 - v) * w * (1.0 - w) * 4.0,
                                 v + kappa * u * (1.0 - u) * w * (1.0 - w) * 4.0,
                                 w + kappa * u * (1.0 - u) * v * (1.0 - v) * 4.0};
  });
}

// Straight-sided hex through 8 trilinear corners with one vertex perturbed.
inline MappingSpec perturbed_trilinear_hex_spec(double delta = 0.15) {
  return analytic_map(3, 1, [delta](double xi, double eta, double zeta) {
    const double u = 0.5 * (xi + 1.0), v = 0.5 * (eta + 1.0), w = 0.5 * (zeta + 1.0);
    // corner (1,1,1) moved by delta in each coordinate; trilinear blend
    const double b = u * v * w;
    return std::array<double, 3>{u + delta * b, v + delta * b, w + 0.5 * delta * b};
  });
}

inline MeshSpec builtin_mesh_spec(const std::string& name,
                                  const std::map<std::string, double>& params = {}) {
  auto get = [&params](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "curved-quad")
    return curved_quad_spec(get("amplitude", 0.08), static_cast<int>(get("ngeo", 4)));
  if (name == "periodic-2x2")
    return periodic_quad_spec(get("kappa", 0.1), static_cast<int>(get("ngeo", 2)));
  // the third built-in, the curved hex, is the 3-D metric-identity fixture and
  // is exercised through the verify battery rather than the solver path
  throw config_error("unknown built-in mesh: " + name +
                     " (available: curved-quad, periodic-2x2)");
}

// ---------------------------------------------------------------------------
// Mesh file format (see docs/mesh_format.md)

inline void write_mesh_file(const MeshSpec& spec, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open mesh file for writing: " + path);
  out << "dgmesh 1\n";
  out << "dim " << spec.dim << "\n";
  out << "elements " << spec.mappings.size() << "\n";
  char buf[64];
  for (size_t k = 0; k < spec.mappings.size(); ++k) {
    const MappingSpec& m = spec.mappings[k];
    require(m.kind != MappingSpec::Kind::analytic, "analytic mappings are not serializable");
    out << "element " << k << " ngeo " << m.geo_order << "\n";
    for (int f = 0; f < 4; ++f) {
      out << "face " << f << "\n";
      for (int q = 0; q <= m.geo_order; ++q) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", m.curves[f][q * 2], m.curves[f][q * 2 + 1]);
        out << buf << "\n";
      }
    }
  }
  out << "connections " << spec.interior.size() << "\n";
  for (const FaceConnection& c : spec.interior) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", c.shift[0], c.shift[1]);
    out << "conn " << c.elem_left << " " << c.face_left << " " << c.elem_right << " "
        << c.face_right << " " << (c.reversed ? 1 : 0) << " " << buf << "\n";
  }
  out << "boundary " << spec.boundary.size() << "\n";
  for (const BoundaryFace& b : spec.boundary)
    out << "bface " << b.elem << " " << b.face << " " << b.tag << "\n";
  out << "end\n";
}

namespace detail {

struct LineReader {
  std::istream& in;
  int lineno = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++lineno;
      const size_t pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      bool blank = true;
      for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
      if (!blank) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw config_error("mesh file line " + std::to_string(lineno) + ": " + msg);
  }
};

}  // namespace detail

inline MeshSpec parse_mesh_stream(std::istream& in) {
  detail::LineReader r{in, 0, {}};
  auto expect_tokens = [&r](const std::string& head) -> std::istringstream {
    if (!r.next()) r.fail("unexpected end of file, expected '" + head + "'");
    std::istringstream ss(r.line);
    std::string word;
    ss >> word;
    if (word != head) r.fail("expected '" + head + "', found '" + word + "'");
    return ss;
  };

  MeshSpec spec;
  {
    auto ss = expect_tokens("dgmesh");
    int version = 0;
    ss >> version;
    if (version != 1) r.fail("unsupported mesh format version");
  }
  {
    auto ss = expect_tokens("dim");
    ss >> spec.dim;
    if (spec.dim != 2) r.fail("only 2-D mesh files are supported");
  }
  size_t nelem = 0;
  {
    auto ss = expect_tokens("elements");
    ss >> nelem;
  }
  for (size_t k = 0; k < nelem; ++k) {
    auto ss = expect_tokens("element");
    size_t id = 0;
    std::string ngeo_kw;
    int geo = 0;
    ss >> id >> ngeo_kw >> geo;
    if (id != k || ngeo_kw != "ngeo" || geo < 1) r.fail("malformed element header");
    std::array<std::vector<double>, 4> curves;
    for (int f = 0; f < 4; ++f) {
      auto fs = expect_tokens("face");
      int fid = -1;
      fs >> fid;
      if (fid != f) r.fail("faces must appear in order 0..3");
      curves[f].assign(static_cast<size_t>(geo + 1) * 2, 0.0);
      for (int q = 0; q <= geo; ++q) {
        if (!r.next()) r.fail("missing face node line");
        std::istringstream ns(r.line);
        if (!(ns >> curves[f][q * 2] >> curves[f][q * 2 + 1])) r.fail("malformed face node line");
      }
    }
    spec.mappings.push_back(transfinite_quad(geo, curves));
  }
  size_t nconn = 0;
  {
    auto ss = expect_tokens("connections");
    ss >> nconn;
  }
  for (size_t c = 0; c < nconn; ++c) {
    auto ss = expect_tokens("conn");
    FaceConnection conn;
    int rev = 0;
    ss >> conn.elem_left >> conn.face_left >> conn.elem_right >> conn.face_right >> rev >>
        conn.shift[0] >> conn.shift[1];
    if (ss.fail()) r.fail("malformed connection line");
    conn.reversed = rev != 0;
    spec.interior.push_back(conn);
  }
  size_t nbnd = 0;
  {
    auto ss = expect_tokens("boundary");
    ss >> nbnd;
  }
  for (size_t b = 0; b < nbnd; ++b) {
    auto ss = expect_tokens("bface");
    BoundaryFace bf;
    ss >> bf.elem >> bf.face >> bf.tag;
    if (ss.fail()) r.fail("malformed boundary line");
    spec.boundary.push_back(bf);
  }
  expect_tokens("end");
  return spec;
}

inline MeshSpec parse_mesh_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open mesh file: " + path);
  return parse_mesh_stream(in);
}

}  // namespace dg

#endif  // DG_MESHES_HPP
