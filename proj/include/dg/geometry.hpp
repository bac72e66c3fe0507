#ifndef DG_GEOMETRY_HPP
#define DG_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dg/linalg.hpp"
#include "dg/operators.hpp"
#include "dg/quadrature.hpp"
#include "dg/tensor.hpp"

namespace dg {

// How the volume-weighted contravariant vectors are formed. The curl form
// satisfies the discrete metric identity for any mapping; the pointwise cross
// product does not once products of derivatives leave P^N.
enum class MetricForm { curl, cross };

// Element mapping description. Faces are nodal samples at LGL points of the
// geometry order; the interior is filled by transfinite interpolation. The
// analytic kind samples a closed-form map directly on the geometry grid.
struct MappingSpec {
  int dimension = 2;
  enum class Kind { affine, transfinite, analytic } kind = Kind::transfinite;
  int geo_order = 1;
  // transfinite (2-D): face curves west, east, south, north; each (geo_order+1)*2
  std::array<std::vector<double>, 4> curves;
  // analytic: reference coords in [-1,1]^d to physical coords
  std::function<std::array<double, 3>(double, double, double)> map;
};

// Face ids in 2-D: 0 west (xi=-1), 1 east (xi=+1), 2 south (eta=-1), 3 north (eta=+1).
inline int face_axis(int face) { return face / 2; }
inline int face_side(int face) { return face % 2; }  // 0 -> -1 end, 1 -> +1 end

struct ElementFace {
  std::vector<double> coords;    // (N+1)*2 physical coords along the face
  std::vector<double> ja_normal; // (N+1)*2 outward-oriented J a^axis at face nodes
  std::vector<double> surf_jac;  // (N+1)
  std::vector<double> normal;    // (N+1)*2 unit outward physical normal
};

struct CurvedElement {
  int id = 0;
  int dim = 2;
  int order = 0;
  std::vector<double> coords;  // (N+1)^d * d
  std::vector<double> jac;     // (N+1)^d
  std::vector<double> ja;      // (N+1)^d * d*d; [node*(d*d) + i*d + m] = (J a^i)_m
  std::array<ElementFace, 4> faces;  // 2-D only

  int points() const { return order + 1; }
  size_t node_index2(int i, int j) const { return static_cast<size_t>(j) * points() + i; }
};

namespace detail {

inline std::vector<double> upsample_curve(const std::vector<double>& curve, int geo_order, int n) {
  // curve holds (geo_order+1) points * 2 comps; interpolate each comp to the N-grid
  const Matrix t = interpolation_matrix(lgl_rule(geo_order).nodes, lgl_rule(n).nodes);
  std::vector<double> out(static_cast<size_t>(n + 1) * 2, 0.0);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> comp(geo_order + 1);
    for (int q = 0; q <= geo_order; ++q) comp[q] = curve[q * 2 + c];
    const std::vector<double> fine = t.apply(comp);
    for (int q = 0; q <= n; ++q) out[q * 2 + c] = fine[q];
  }
  return out;
}

}  // namespace detail

// Straight-sided quad through four corners (SW, SE, NW, NE), as a transfinite
// spec with linear face curves.
inline MappingSpec affine_quad(const std::array<std::array<double, 2>, 4>& corners) {
  MappingSpec spec;
  spec.dimension = 2;
  spec.kind = MappingSpec::Kind::affine;
  spec.geo_order = 1;
  const auto& sw = corners[0];
  const auto& se = corners[1];
  const auto& nw = corners[2];
  const auto& ne = corners[3];
  spec.curves[0] = {sw[0], sw[1], nw[0], nw[1]};  // west: eta from -1 to 1
  spec.curves[1] = {se[0], se[1], ne[0], ne[1]};  // east
  spec.curves[2] = {sw[0], sw[1], se[0], se[1]};  // south: xi from -1 to 1
  spec.curves[3] = {nw[0], nw[1], ne[0], ne[1]};  // north
  return spec;
}

inline MappingSpec transfinite_quad(int geo_order, std::array<std::vector<double>, 4> curves) {
  MappingSpec spec;
  spec.dimension = 2;
  spec.kind = MappingSpec::Kind::transfinite;
  spec.geo_order = geo_order;
  spec.curves = std::move(curves);
  for (const auto& c : spec.curves)
    require(static_cast<int>(c.size()) == (geo_order + 1) * 2,
            "face curve must hold geo_order+1 points");
  return spec;
}

inline MappingSpec analytic_map(int dimension, int geo_order,
                                std::function<std::array<double, 3>(double, double, double)> map) {
  MappingSpec spec;
  spec.dimension = dimension;
  spec.kind = MappingSpec::Kind::analytic;
  spec.geo_order = geo_order;
  spec.map = std::move(map);
  return spec;
}

namespace detail {

// Sample the mapping at the order-N tensor grid (2-D).
inline Field2 map_coordinates2(const MappingSpec& spec, int n) {
  const std::vector<double> nodes = lgl_rule(n).nodes;
  Field2 x(n, 2);
  if (spec.kind == MappingSpec::Kind::analytic) {
    // sample on the geometry grid, then lift to the N-grid so the mapping
    // stays a polynomial of the geometry degree
    const std::vector<double> gnodes = lgl_rule(spec.geo_order).nodes;
    Field2 xg(spec.geo_order, 2);
    for (int j = 0; j <= spec.geo_order; ++j)
      for (int i = 0; i <= spec.geo_order; ++i) {
        const std::array<double, 3> p = spec.map(gnodes[i], gnodes[j], 0.0);
        xg.at(i, j, 0) = p[0];
        xg.at(i, j, 1) = p[1];
      }
    const Matrix t = interpolation_matrix(gnodes, nodes);
    return apply_pair(t, t, xg);
  }
  std::array<std::vector<double>, 4> c;
  for (int f = 0; f < 4; ++f) c[f] = upsample_curve(spec.curves[f], spec.geo_order, n);
  auto cw = [&](int q, int comp) { return c[0][q * 2 + comp]; };
  auto ce = [&](int q, int comp) { return c[1][q * 2 + comp]; };
  auto cs = [&](int q, int comp) { return c[2][q * 2 + comp]; };
  auto cn = [&](int q, int comp) { return c[3][q * 2 + comp]; };
  for (int comp = 0; comp < 2; ++comp) {
    const double sw = cs(0, comp), se = cs(n, comp), nw = cn(0, comp), ne = cn(n, comp);
    require(std::fabs(sw - cw(0, comp)) < 1e-12 && std::fabs(se - ce(0, comp)) < 1e-12 &&
                std::fabs(nw - cw(n, comp)) < 1e-12 && std::fabs(ne - ce(n, comp)) < 1e-12,
            "face curves must agree at the corners");
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const double xi = nodes[i], eta = nodes[j];
        const double v = 0.5 * (1.0 - xi) * cw(j, comp) + 0.5 * (1.0 + xi) * ce(j, comp) +
                         0.5 * (1.0 - eta) * cs(i, comp) + 0.5 * (1.0 + eta) * cn(i, comp) -
                         0.25 * ((1.0 - xi) * (1.0 - eta) * sw + (1.0 + xi) * (1.0 - eta) * se +
                                 (1.0 - xi) * (1.0 + eta) * nw + (1.0 + xi) * (1.0 + eta) * ne);
        x.at(i, j, comp) = v;
      }
  }
  return x;
}

inline Field3 map_coordinates3(const MappingSpec& spec, int n) {
  require(spec.kind == MappingSpec::Kind::analytic, "3-D elements use analytic-sample mappings");
  const std::vector<double> gnodes = lgl_rule(spec.geo_order).nodes;
  Field3 xg(spec.geo_order, 3);
  for (int k = 0; k <= spec.geo_order; ++k)
    for (int j = 0; j <= spec.geo_order; ++j)
      for (int i = 0; i <= spec.geo_order; ++i) {
        const std::array<double, 3> p = spec.map(gnodes[i], gnodes[j], gnodes[k]);
        for (int c = 0; c < 3; ++c) xg.at(i, j, k, c) = p[c];
      }
  if (spec.geo_order == n) return xg;
  // lift to the N grid one direction at a time
  const Matrix t = interpolation_matrix(gnodes, lgl_rule(n).nodes);
  const int g = spec.geo_order;
  std::vector<double> buf1(static_cast<size_t>(n + 1) * (g + 1) * (g + 1) * 3, 0.0);
  for (int k = 0; k <= g; ++k)
    for (int j = 0; j <= g; ++j)
      for (int q = 0; q <= n; ++q)
        for (int i = 0; i <= g; ++i)
          for (int c = 0; c < 3; ++c)
            buf1[((static_cast<size_t>(k) * (g + 1) + j) * (n + 1) + q) * 3 + c] +=
                t(q, i) * xg.at(i, j, k, c);
  std::vector<double> buf2(static_cast<size_t>(n + 1) * (n + 1) * (g + 1) * 3, 0.0);
  for (int k = 0; k <= g; ++k)
    for (int r = 0; r <= n; ++r)
      for (int q = 0; q <= n; ++q)
        for (int j = 0; j <= g; ++j)
          for (int c = 0; c < 3; ++c)
            buf2[((static_cast<size_t>(k) * (n + 1) + r) * (n + 1) + q) * 3 + c] +=
                t(r, j) * buf1[((static_cast<size_t>(k) * (g + 1) + j) * (n + 1) + q) * 3 + c];
  Field3 out(n, 3);
  for (int s = 0; s <= n; ++s)
    for (int r = 0; r <= n; ++r)
      for (int q = 0; q <= n; ++q)
        for (int k = 0; k <= g; ++k)
          for (int c = 0; c < 3; ++c)
            out.at(q, r, s, c) +=
                t(s, k) * buf2[((static_cast<size_t>(k) * (n + 1) + r) * (n + 1) + q) * 3 + c];
  return out;
}

}  // namespace detail

// Builds the element: covariant vectors by differentiating the degree-N
// interpolant of X, contravariant vectors by the dimension-appropriate formula,
// Jacobian by the cross/triple product. Throws if J <= 0 anywhere.
inline CurvedElement build_element(const MappingSpec& spec, int n,
                                   MetricForm form = MetricForm::curl, int id = 0) {
  require(n >= 1, "element order must be >= 1");
  require(spec.geo_order <= n, "geometry degree must satisfy N_geo <= N");
  CurvedElement e;
  e.id = id;
  e.dim = spec.dimension;
  e.order = n;
  const Matrix d = differentiation_matrix(n);

  if (spec.dimension == 2) {
    const Field2 x = detail::map_coordinates2(spec, n);
    const Field2 dxi = apply_dir2(d, x, 0);
    const Field2 deta = apply_dir2(d, x, 1);
    const int np = n + 1;
    e.coords = x.a;
    e.jac.assign(static_cast<size_t>(np) * np, 0.0);
    e.ja.assign(static_cast<size_t>(np) * np * 4, 0.0);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const size_t node = e.node_index2(i, j);
        const double xxi = dxi.at(i, j, 0), yxi = dxi.at(i, j, 1);
        const double xeta = deta.at(i, j, 0), yeta = deta.at(i, j, 1);
        const double jac = xxi * yeta - xeta * yxi;
        if (!(jac > 0.0))
          throw numerical_error("nonpositive Jacobian " + std::to_string(jac) + " at node (" +
                                std::to_string(i) + "," + std::to_string(j) + ") of element " +
                                std::to_string(id));
        e.jac[node] = jac;
        // rotation form: J a^1 = (y_eta, -x_eta), J a^2 = (-y_xi, x_xi)
        e.ja[node * 4 + 0 * 2 + 0] = yeta;
        e.ja[node * 4 + 0 * 2 + 1] = -xeta;
        e.ja[node * 4 + 1 * 2 + 0] = -yxi;
        e.ja[node * 4 + 1 * 2 + 1] = xxi;
      }
    for (int f = 0; f < 4; ++f) {
      ElementFace& face = e.faces[f];
      const int axis = face_axis(f);
      const double sign = face_side(f) == 0 ? -1.0 : 1.0;
      face.coords.assign(static_cast<size_t>(np) * 2, 0.0);
      face.ja_normal.assign(static_cast<size_t>(np) * 2, 0.0);
      face.surf_jac.assign(np, 0.0);
      face.normal.assign(static_cast<size_t>(np) * 2, 0.0);
      for (int q = 0; q < np; ++q) {
        const int i = axis == 0 ? (face_side(f) == 0 ? 0 : n) : q;
        const int j = axis == 0 ? q : (face_side(f) == 0 ? 0 : n);
        const size_t node = e.node_index2(i, j);
        face.coords[q * 2 + 0] = e.coords[node * 2 + 0];
        face.coords[q * 2 + 1] = e.coords[node * 2 + 1];
        const double jx = sign * e.ja[node * 4 + axis * 2 + 0];
        const double jy = sign * e.ja[node * 4 + axis * 2 + 1];
        const double s = std::hypot(jx, jy);
        face.ja_normal[q * 2 + 0] = jx;
        face.ja_normal[q * 2 + 1] = jy;
        face.surf_jac[q] = s;
        face.normal[q * 2 + 0] = jx / s;
        face.normal[q * 2 + 1] = jy / s;
      }
    }
    return e;
  }

  require(spec.dimension == 3, "elements are 2-D quads or 3-D hexes");
  const Field3 x = detail::map_coordinates3(spec, n);
  std::array<Field3, 3> dx;  // dx[j] = d X / d xi^j, each with 3 components
  for (int j = 0; j < 3; ++j) dx[j] = apply_dir3(d, x, j);
  const int np = n + 1;
  const size_t nn = static_cast<size_t>(np) * np * np;
  e.coords = x.a;
  e.jac.assign(nn, 0.0);
  e.ja.assign(nn * 9, 0.0);
  for (size_t node = 0; node < nn; ++node) {
    std::array<std::array<double, 3>, 3> a{};  // a[j][m] = covariant vector j, comp m
    for (int j = 0; j < 3; ++j)
      for (int m = 0; m < 3; ++m) a[j][m] = dx[j].a[node * 3 + m];
    const double jac = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (!(jac > 0.0))
      throw numerical_error("nonpositive Jacobian at node " + std::to_string(node) +
                            " of element " + std::to_string(id));
    e.jac[node] = jac;
  }
  if (form == MetricForm::cross) {
    for (size_t node = 0; node < nn; ++node)
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        for (int m = 0; m < 3; ++m) {
          const int m1 = (m + 1) % 3, m2 = (m + 2) % 3;
          e.ja[node * 9 + i * 3 + m] =
              dx[j].a[node * 3 + m1] * dx[k].a[node * 3 + m2] -
              dx[j].a[node * 3 + m2] * dx[k].a[node * 3 + m1];
        }
      }
  } else {
    // curl form: (J a^i)_n = -[curl_xi (X_l grad_xi X_m)]_i with (n,m,l) cyclic
    for (int ncomp = 0; ncomp < 3; ++ncomp) {
      const int m = (ncomp + 1) % 3, l = (ncomp + 2) % 3;
      Field3 v(n, 3);
      for (size_t node = 0; node < nn; ++node)
        for (int j = 0; j < 3; ++j)
          v.a[node * 3 + j] = x.a[node * 3 + l] * dx[j].a[node * 3 + m];
      std::array<Field3, 3> dv;
      for (int j = 0; j < 3; ++j) dv[j] = apply_dir3(d, v, j);
      for (size_t node = 0; node < nn; ++node)
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          const double curl_i = dv[j].a[node * 3 + k] - dv[k].a[node * 3 + j];
          e.ja[node * 9 + i * 3 + ncomp] = -curl_i;
        }
    }
  }
  return e;
}

// Max over nodes and components of the discrete divergence of I^N(J a^i),
// normalized by the metric magnitude.
inline double metric_identity_residual(const CurvedElement& e) {
  const Matrix d = differentiation_matrix(e.order);
  const int dim = e.dim;
  double scale = 1.0;
  for (double v : e.ja) scale = std::max(scale, std::fabs(v));
  double worst = 0.0;
  if (dim == 2) {
    const int np = e.points();
    for (int m = 0; m < 2; ++m) {
      Field2 f1(e.order, 1), f2(e.order, 1);
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const size_t node = e.node_index2(i, j);
          f1.at(i, j) = e.ja[node * 4 + 0 * 2 + m];
          f2.at(i, j) = e.ja[node * 4 + 1 * 2 + m];
        }
      const Field2 d1 = apply_dir2(d, f1, 0);
      const Field2 d2 = apply_dir2(d, f2, 1);
      for (size_t q = 0; q < d1.a.size(); ++q) worst = std::max(worst, std::fabs(d1.a[q] + d2.a[q]));
    }
    return worst / scale;
  }
  const int np = e.points();
  const size_t nn = static_cast<size_t>(np) * np * np;
  for (int m = 0; m < 3; ++m) {
    std::array<Field3, 3> f;
    for (int i = 0; i < 3; ++i) {
      f[i] = Field3(e.order, 1);
      for (size_t node = 0; node < nn; ++node) f[i].a[node] = e.ja[node * 9 + i * 3 + m];
    }
    Field3 div(e.order, 1);
    for (int i = 0; i < 3; ++i) {
      const Field3 di = apply_dir3(d, f[i], i);
      for (size_t node = 0; node < nn; ++node) div.a[node] += di.a[node];
    }
    for (size_t node = 0; node < nn; ++node) worst = std::max(worst, std::fabs(div.a[node]));
  }
  return worst / scale;
}

// Restriction of a tensor-product nodal field to a face grid (2-D edges).
inline std::vector<double> face_trace(const Field2& field, int face) {
  const int np = field.points();
  std::vector<double> out(static_cast<size_t>(np) * field.ncomp, 0.0);
  const int axis = face_axis(face);
  for (int q = 0; q < np; ++q) {
    const int i = axis == 0 ? (face_side(face) == 0 ? 0 : np - 1) : q;
    const int j = axis == 0 ? q : (face_side(face) == 0 ? 0 : np - 1);
    for (int c = 0; c < field.ncomp; ++c) out[q * field.ncomp + c] = field.at(i, j, c);
  }
  return out;
}

// 3-D face ids: 0/1 xi=-1/+1, 2/3 eta, 4/5 zeta; trace grid is (N+1)^2 with the
// two remaining directions in ascending axis order.
inline std::vector<double> face_trace(const Field3& field, int face) {
  const int np = field.points();
  const int axis = face / 2;
  const int fixed = (face % 2 == 0) ? 0 : np - 1;
  std::vector<double> out(static_cast<size_t>(np) * np * field.ncomp, 0.0);
  for (int b = 0; b < np; ++b)
    for (int a = 0; a < np; ++a) {
      int i, j, k;
      if (axis == 0) { i = fixed; j = a; k = b; }
      else if (axis == 1) { i = a; j = fixed; k = b; }
      else { i = a; j = b; k = fixed; }
      for (int c = 0; c < field.ncomp; ++c)
        out[(static_cast<size_t>(b) * np + a) * field.ncomp + c] = field.at(i, j, k, c);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Meshes

struct FaceConnection {
  int elem_left = 0, face_left = 0;
  int elem_right = 0, face_right = 0;
  bool reversed = false;               // right trace runs opposite to left
  std::array<double, 2> shift{0.0, 0.0};  // x_right = x_left + shift (periodic wraps)
};

struct BoundaryFace {
  int elem = 0, face = 0;
  std::string tag = "exterior";
};

struct Mesh {
  int dim = 2;
  std::vector<CurvedElement> elements;
  std::vector<FaceConnection> interior;
  std::vector<BoundaryFace> boundary;
};

// Largest gap between the paired physical traces of a connection, after
// removing the declared periodic shift.
inline double connection_mismatch(const Mesh& mesh, const FaceConnection& conn) {
  const auto& fl = mesh.elements[conn.elem_left].faces[conn.face_left];
  const auto& fr = mesh.elements[conn.elem_right].faces[conn.face_right];
  const int np = static_cast<int>(fl.surf_jac.size());
  double worst = 0.0;
  for (int q = 0; q < np; ++q) {
    const int qr = conn.reversed ? np - 1 - q : q;
    const double dx = fr.coords[qr * 2 + 0] - fl.coords[q * 2 + 0] - conn.shift[0];
    const double dy = fr.coords[qr * 2 + 1] - fl.coords[q * 2 + 1] - conn.shift[1];
    worst = std::max(worst, std::hypot(dx, dy));
  }
  return worst;
}

}  // namespace dg

#endif  // DG_GEOMETRY_HPP
