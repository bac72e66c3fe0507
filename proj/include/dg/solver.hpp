#ifndef DG_SOLVER_HPP
#define DG_SOLVER_HPP

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "dg/geometry.hpp"
#include "dg/linalg.hpp"
#include "dg/meshes.hpp"
#include "dg/operators.hpp"
#include "dg/system.hpp"
#include "dg/tensor.hpp"

namespace dg {

enum class DGForm { W, S1, S2 };
enum class FluxType { upwind, central };
// Grid on which [S1] forms the surface product before interpolating to P^N.
enum class S1ProductGrid { M, L };

inline DGForm parse_form(const std::string& s) {
  if (s == "W") return DGForm::W;
  if (s == "S1") return DGForm::S1;
  if (s == "S2") return DGForm::S2;
  throw config_error("form must be W, S1, or S2");
}

inline std::string form_name(DGForm f) {
  switch (f) {
    case DGForm::W: return "W";
    case DGForm::S1: return "S1";
    default: return "S2";
  }
}

enum class SchemeKind { standard, full_oi, volume_oi };

// Quadrature selection (N, M, L) plus the flux strategy and form.
struct SchemeConfig {
  int n = 4;
  int m = 4;
  int l = 4;
  FluxStrategy strategy = FluxStrategy::P2N;
  DGForm form = DGForm::W;
  FluxType flux = FluxType::upwind;
  bool divfree = false;  // build Atil from the interpolated stream potential
  S1ProductGrid s1_product = S1ProductGrid::M;

  void validate() const {
    require(n >= 1, "N must be >= 1");
    require(m >= n, "M must be >= N");
    require(l == n || l == m, "surface order must equal N or M");
  }

  SchemeKind kind() const {
    if (m == n) return SchemeKind::standard;
    return l == m ? SchemeKind::full_oi : SchemeKind::volume_oi;
  }

  // quadrature is exact for the volume inner product <div F, U>_M
  bool volume_exact() const {
    switch (strategy) {
      case FluxStrategy::PN: return true;                 // collapsed flux: degree 2N-1 <= 2M-1
      case FluxStrategy::P2N: return 2 * m - 1 >= 3 * n;  // M > 3N/2
      default: return 2 * m - 1 >= 4 * n;                 // M > 2N
    }
  }

  // interpolation I^M(Atil U) = Atil U, the step that lets the product rule hold
  bool product_rule_exact() const {
    switch (strategy) {
      case FluxStrategy::PN: return m == n;  // the collapsed flux has no product structure
      case FluxStrategy::P2N: return m >= 2 * n;
      default: return m >= 3 * n;
    }
  }
};

struct SolutionField {
  double time = 0.0;
  int p = 1;
  std::vector<Field2> u;  // one per element, ncomp = p
};

inline SolutionField make_state(const Mesh& mesh, int n, int p) {
  SolutionField s;
  s.p = p;
  s.u.assign(mesh.elements.size(), Field2(n, p));
  return s;
}

// External state per boundary tag; missing tags mean g = 0.
struct BoundaryCondition {
  std::map<std::string, std::function<void(const double* x, double t, double* g)>> tags;

  void evaluate(const std::string& tag, const double* x, double t, double* g, int p) const {
    auto it = tags.find(tag);
    if (it == tags.end()) {
      for (int c = 0; c < p; ++c) g[c] = 0.0;
      return;
    }
    it->second(x, t, g);
  }
};

// Upwind flux Atil.n <<U>> - 1/2 |Atil.n| [[U]], equivalently A+ U_L + A- U_R.
// The central variant drops the |Atil.n| dissipation.
inline void numerical_flux(const CharacteristicSplit& split, const double* ul, const double* ur,
                           FluxType flux, double* out) {
  const int p = split.p;
  for (int c = 0; c < p; ++c) out[c] = 0.0;
  std::vector<double> avg(p), jump(p);
  for (int c = 0; c < p; ++c) {
    avg[c] = 0.5 * (ul[c] + ur[c]);
    jump[c] = ur[c] - ul[c];
  }
  block_apply(split.an.data(), p, avg.data(), out);
  if (flux == FluxType::upwind) block_apply(split.absn.data(), p, jump.data(), out, -0.5);
}

namespace detail {

inline void parallel_for(int nitems, int nthreads, const std::function<void(int)>& fn) {
  if (nthreads <= 1 || nitems <= 1) {
    for (int i = 0; i < nitems; ++i) fn(i);
    return;
  }
  const int nw = std::min(nthreads, nitems);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([=, &fn]() {
      for (int i = w; i < nitems; i += nw) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

}  // namespace detail

// One face of the mesh with everything the flux computation needs at the
// surface quadrature nodes, oriented along the left element's outward normal.
struct FaceBlock {
  bool is_boundary = false;
  FaceConnection conn;  // boundary faces use elem_left/face_left only
  std::string tag;
  std::vector<CharacteristicSplit> split;  // (L+1) splits of the shared Atil.n
  std::vector<double> coords;              // (L+1)*2 physical coords
};

// Current traces and fluxes on one face. fn_*_own are the elements' own
// outward normal fluxes (right side indexed in its own face ordering).
struct FaceState {
  std::vector<double> u_l, u_r;          // (L+1)*p, right side reindexed to match left
  std::vector<double> fstar;             // (L+1)*p along the left normal
  std::vector<double> fn_own_l_l;        // (L+1)*p at the L grid
  std::vector<double> fn_own_r_l;
  std::vector<double> fn_own_l_m;        // (M+1)*p at the M grid
  std::vector<double> fn_own_r_m;
  std::vector<double> g;                 // boundary external state at L nodes
};

class Discretization {
 public:
  Discretization(const Mesh& mesh, const ContravariantField& contrav, SchemeConfig config,
                 BoundaryCondition bc = {}, int nthreads = 1)
      : mesh_(&mesh), contrav_(&contrav), config_(config), bc_(std::move(bc)),
        nthreads_(nthreads) {
    config_.validate();
    require(contrav.strategy == config_.strategy,
            "contravariant field was built for a different flux strategy");
    require(contrav.elems.size() == mesh.elements.size() &&
                (mesh.elements.empty() || mesh.elements[0].order == config_.n),
            "mesh, coefficients and scheme orders are inconsistent");
    p_ = contrav.p;
    const int n = config_.n, m = config_.m, l = config_.l;
    rule_n_ = lgl_rule(n);
    rule_m_ = m == n ? rule_n_ : lgl_rule(m);
    rule_l_ = l == n ? rule_n_ : rule_m_;
    d_n_ = differentiation_matrix(n);
    d_m_ = m == n ? d_n_ : differentiation_matrix(m);
    interp_nm_ = interpolation_matrix(rule_n_.nodes, rule_m_.nodes);
    interp_nl_ = interpolation_matrix(rule_n_.nodes, rule_l_.nodes);
    interp_lm_ = interpolation_matrix(rule_l_.nodes, rule_m_.nodes);
    interp_mn_ = interpolation_matrix(rule_m_.nodes, rule_n_.nodes);
    grad_nm_ = interp_nm_.multiply(d_n_);
    interp_nm_t_ = interp_nm_.transposed();
    grad_nm_t_ = grad_nm_.transposed();
    // effective weights for the S1 product formed on the M grid:
    // sum_s w^N_s I^{M->N}(s,q)
    tau_.assign(m + 1, 0.0);
    for (int q = 0; q <= m; ++q)
      for (int s = 0; s <= n; ++s) tau_[q] += rule_n_.weights[s] * interp_mn_(s, q);

    build_element_data();
    build_face_blocks();
  }

  const Mesh& mesh() const { return *mesh_; }
  const ContravariantField& contravariant() const { return *contrav_; }
  const SchemeConfig& config() const { return config_; }
  int state_dim() const { return p_; }
  const std::vector<FaceBlock>& faces() const { return face_blocks_; }
  const QuadratureRule& rule_n() const { return rule_n_; }
  const QuadratureRule& rule_m() const { return rule_m_; }
  const QuadratureRule& rule_l() const { return rule_l_; }
  const std::vector<double>& tau() const { return tau_; }
  const Matrix& interp_nl() const { return interp_nl_; }
  const Matrix& interp_nm() const { return interp_nm_; }
  const Matrix& interp_lm() const { return interp_lm_; }
  const Matrix& interp_mn() const { return interp_mn_; }

  // Volume-weighted contravariant flux components sampled on the M grid.
  std::array<Field2, 2> volume_flux(const Field2& u, int elem) const {
    const ElementData& ed = elem_data_[elem];
    std::array<Field2, 2> f;
    if (config_.strategy == FluxStrategy::PN) {
      for (int dir = 0; dir < 2; ++dir) {
        Field2 fn(config_.n, p_);
        const Field2& atil = contrav_->elems[elem].atil[dir];
        for (int j = 0; j <= config_.n; ++j)
          for (int i = 0; i <= config_.n; ++i)
            block_apply(&atil.a[atil.idx(i, j, 0)], p_, &u.a[u.idx(i, j, 0)],
                        &fn.at(i, j, 0));
        f[dir] = config_.m == config_.n ? fn : apply_pair(interp_nm_, interp_nm_, fn);
      }
      return f;
    }
    const Field2 um = config_.m == config_.n ? u : apply_pair(interp_nm_, interp_nm_, u);
    for (int dir = 0; dir < 2; ++dir) {
      f[dir] = Field2(config_.m, p_);
      const Field2& atil = ed.atil_m[dir];
      for (int j = 0; j <= config_.m; ++j)
        for (int i = 0; i <= config_.m; ++i)
          block_apply(&atil.a[atil.idx(i, j, 0)], p_, &um.a[um.idx(i, j, 0)],
                      &f[dir].at(i, j, 0));
    }
    return f;
  }

  // Traces, upwind flux and own-normal fluxes for one face at the current state.
  FaceState face_state(const FaceBlock& fb, const SolutionField& state) const {
    FaceState fs;
    const int l = config_.l;
    const int npl = l + 1;
    fs.u_l = trace_at(state.u[fb.conn.elem_left], fb.conn.face_left, interp_nl_);
    own_flux_traces(fb.conn.elem_left, fb.conn.face_left, state.u[fb.conn.elem_left],
                    fs.fn_own_l_l, fs.fn_own_l_m);

    if (fb.is_boundary) {
      fs.g.assign(static_cast<size_t>(npl) * p_, 0.0);
      for (int q = 0; q < npl; ++q)
        bc_.evaluate(fb.tag, &fb.coords[q * 2], state.time, &fs.g[q * p_], p_);
      fs.u_r = fs.g;
    } else {
      std::vector<double> ur_own =
          trace_at(state.u[fb.conn.elem_right], fb.conn.face_right, interp_nl_);
      fs.u_r.assign(static_cast<size_t>(npl) * p_, 0.0);
      for (int q = 0; q < npl; ++q) {
        const int qr = fb.conn.reversed ? l - q : q;
        for (int c = 0; c < p_; ++c) fs.u_r[q * p_ + c] = ur_own[qr * p_ + c];
      }
      own_flux_traces(fb.conn.elem_right, fb.conn.face_right, state.u[fb.conn.elem_right],
                      fs.fn_own_r_l, fs.fn_own_r_m);
    }

    fs.fstar.assign(static_cast<size_t>(npl) * p_, 0.0);
    for (int q = 0; q < npl; ++q)
      numerical_flux(fb.split[q], &fs.u_l[q * p_], &fs.u_r[q * p_], config_.flux,
                     &fs.fstar[q * p_]);
    return fs;
  }

  // Semi-discrete time derivative: J U_t solved pointwise at the N-grid nodes.
  std::vector<Field2> rhs(const SolutionField& state) const {
    const int n = config_.n;
    const int nel = static_cast<int>(mesh_->elements.size());
    require(static_cast<int>(state.u.size()) == nel && state.p == p_ &&
                (nel == 0 || state.u[0].order == n),
            "state does not match the discretization's mesh and orders");
    std::vector<Field2> out(nel, Field2(n, p_));

    detail::parallel_for(nel, nthreads_, [&](int k) {
      out[k] = volume_term(state.u[k], k);
    });

    const int nfb = static_cast<int>(face_blocks_.size());
    std::vector<FaceState> fstates(nfb);
    detail::parallel_for(nfb, nthreads_, [&](int b) {
      fstates[b] = face_state(face_blocks_[b], state);
    });
    for (int b = 0; b < nfb; ++b) scatter_surface(face_blocks_[b], fstates[b], out);

    detail::parallel_for(nel, nthreads_, [&](int k) {
      const CurvedElement& e = mesh_->elements[k];
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
          const double mass = rule_n_.weights[i] * rule_n_.weights[j] * e.jac[e.node_index2(i, j)];
          for (int c = 0; c < p_; ++c) out[k].at(i, j, c) /= mass;
        }
    });
    return out;
  }

  // Contravariant wave-speed bound per unit reference time, for CFL steps.
  double max_reference_speed() const {
    double lam = 0.0;
    for (size_t k = 0; k < mesh_->elements.size(); ++k) {
      const CurvedElement& e = mesh_->elements[k];
      const ElementCoefficients& ec = contrav_->elems[k];
      for (int j = 0; j <= config_.n; ++j)
        for (int i = 0; i <= config_.n; ++i) {
          const size_t node = e.node_index2(i, j);
          double speed = 0.0;
          for (int dir = 0; dir < 2; ++dir)
            speed += symmetric_spectral_radius(&ec.atil[dir].a[ec.atil[dir].idx(i, j, 0)], p_);
          lam = std::max(lam, speed / e.jac[node]);
        }
    }
    return lam;
  }

 private:
  struct ElementData {
    std::array<Field2, 2> atil_m;  // coefficients on the M grid (P2N / P3N)
    std::array<std::vector<double>, 4> an_own_n;  // (N+1)*p*p outward Atil.n per face
    std::array<std::vector<double>, 4> an_own_l;  // (L+1)*p*p
    std::array<std::vector<double>, 4> an_own_m;  // (M+1)*p*p
  };

  std::vector<double> trace_at(const Field2& u, int face, const Matrix& interp) const {
    const std::vector<double> tr = face_trace(u, face);
    const int nq = interp.rows();
    std::vector<double> out(static_cast<size_t>(nq) * p_, 0.0);
    for (int q = 0; q < nq; ++q)
      for (int s = 0; s <= config_.n; ++s) {
        const double w = interp(q, s);
        if (w == 0.0) continue;
        for (int c = 0; c < p_; ++c) out[q * p_ + c] += w * tr[s * p_ + c];
      }
    return out;
  }

  void apply_an(const std::vector<double>& an, const std::vector<double>& u, int nq,
                std::vector<double>& out) const {
    for (int q = 0; q < nq; ++q)
      block_apply(&an[static_cast<size_t>(q) * p_ * p_], p_, &u[static_cast<size_t>(q) * p_],
                  &out[static_cast<size_t>(q) * p_]);
  }

  // Outward normal flux traces at the L and M face grids. For the PN strategy
  // the flux is the P^N interpolant of the nodal product, so its trace is
  // interpolated from the N-grid values; the coefficient-based strategies form
  // the product at the target nodes.
  void own_flux_traces(int elem, int face, const Field2& u, std::vector<double>& fn_l,
                       std::vector<double>& fn_m) const {
    const int npl = config_.l + 1, npm = config_.m + 1, npn = config_.n + 1;
    fn_l.assign(static_cast<size_t>(npl) * p_, 0.0);
    fn_m.assign(static_cast<size_t>(npm) * p_, 0.0);
    const ElementData& ed = elem_data_[elem];
    if (config_.strategy == FluxStrategy::PN) {
      const std::vector<double> u_n = face_trace(u, face);
      std::vector<double> fn_n(static_cast<size_t>(npn) * p_, 0.0);
      apply_an(ed.an_own_n[face], u_n, npn, fn_n);
      auto raise = [&](const Matrix& interp, std::vector<double>& out) {
        for (int q = 0; q < interp.rows(); ++q)
          for (int s = 0; s < npn; ++s) {
            const double w = interp(q, s);
            if (w == 0.0) continue;
            for (int c = 0; c < p_; ++c)
              out[static_cast<size_t>(q) * p_ + c] += w * fn_n[static_cast<size_t>(s) * p_ + c];
          }
      };
      raise(interp_nl_, fn_l);
      raise(interp_nm_, fn_m);
      return;
    }
    const std::vector<double> u_l = trace_at(u, face, interp_nl_);
    const std::vector<double> u_m = trace_at(u, face, interp_nm_);
    apply_an(ed.an_own_l[face], u_l, npl, fn_l);
    apply_an(ed.an_own_m[face], u_m, npm, fn_m);
  }

  // Own-normal coefficient matrices at face quadrature nodes. For the P3N
  // strategy the product of the two interpolated factors is formed at the
  // target nodes; otherwise the P^N matrices are interpolated directly.
  std::vector<double> face_an(int elem, int face, const Matrix& interp) const {
    const CurvedElement& e = mesh_->elements[elem];
    const ElementCoefficients& ec = contrav_->elems[elem];
    const int nq = interp.rows();
    std::vector<double> out(static_cast<size_t>(nq) * p_ * p_, 0.0);
    auto interp_trace = [&](const std::vector<double>& tr, int ncomp) {
      std::vector<double> r(static_cast<size_t>(nq) * ncomp, 0.0);
      for (int q = 0; q < nq; ++q)
        for (int s = 0; s <= config_.n; ++s) {
          const double w = interp(q, s);
          if (w == 0.0) continue;
          for (int c = 0; c < ncomp; ++c) r[q * ncomp + c] += w * tr[s * ncomp + c];
        }
      return r;
    };
    if (config_.strategy == FluxStrategy::P3N) {
      const ElementFace& ef = e.faces[face];
      const std::vector<double> jan = interp_trace(ef.ja_normal, 2);
      const std::vector<double> a1 = interp_trace(face_trace(ec.a_nodal[0], face), p_ * p_);
      const std::vector<double> a2 = interp_trace(face_trace(ec.a_nodal[1], face), p_ * p_);
      for (int q = 0; q < nq; ++q)
        for (int c = 0; c < p_ * p_; ++c)
          out[q * p_ * p_ + c] =
              jan[q * 2 + 0] * a1[q * p_ * p_ + c] + jan[q * 2 + 1] * a2[q * p_ * p_ + c];
      return out;
    }
    const int axis = face_axis(face);
    const double sign = face_side(face) == 0 ? -1.0 : 1.0;
    out = interp_trace(face_trace(ec.atil[axis], face), p_ * p_);
    for (double& v : out) v *= sign;
    return out;
  }

  void build_element_data() {
    const int nel = static_cast<int>(mesh_->elements.size());
    elem_data_.assign(nel, ElementData{});
    for (int k = 0; k < nel; ++k) {
      ElementData& ed = elem_data_[k];
      const ElementCoefficients& ec = contrav_->elems[k];
      if (config_.strategy != FluxStrategy::PN) {
        if (config_.strategy == FluxStrategy::P2N) {
          for (int dir = 0; dir < 2; ++dir)
            ed.atil_m[dir] = config_.m == config_.n
                                 ? ec.atil[dir]
                                 : apply_pair(interp_nm_, interp_nm_, ec.atil[dir]);
        } else {
          const CurvedElement& e = mesh_->elements[k];
          Field2 ja(config_.n, 4);
          for (size_t node = 0; node < e.jac.size(); ++node)
            for (int c = 0; c < 4; ++c) ja.a[node * 4 + c] = e.ja[node * 4 + c];
          const Field2 ja_m =
              config_.m == config_.n ? ja : apply_pair(interp_nm_, interp_nm_, ja);
          std::array<Field2, 2> a_m;
          for (int dir = 0; dir < 2; ++dir)
            a_m[dir] = config_.m == config_.n
                           ? ec.a_nodal[dir]
                           : apply_pair(interp_nm_, interp_nm_, ec.a_nodal[dir]);
          for (int dir = 0; dir < 2; ++dir) {
            ed.atil_m[dir] = Field2(config_.m, p_ * p_);
            for (int j = 0; j <= config_.m; ++j)
              for (int i = 0; i <= config_.m; ++i)
                for (int c = 0; c < p_ * p_; ++c)
                  ed.atil_m[dir].at(i, j, c) = ja_m.at(i, j, dir * 2 + 0) * a_m[0].at(i, j, c) +
                                               ja_m.at(i, j, dir * 2 + 1) * a_m[1].at(i, j, c);
          }
        }
      }
      for (int face = 0; face < 4; ++face) {
        ed.an_own_n[face] = face_an(k, face, Matrix::identity(config_.n + 1));
        ed.an_own_l[face] = face_an(k, face, interp_nl_);
        ed.an_own_m[face] = face_an(k, face, interp_nm_);
      }
    }
  }

  void build_face_blocks() {
    face_blocks_.clear();
    for (const FaceConnection& conn : mesh_->interior) {
      FaceBlock fb;
      fb.is_boundary = false;
      fb.conn = conn;
      fill_shared(fb);
      face_blocks_.push_back(std::move(fb));
    }
    for (const BoundaryFace& bf : mesh_->boundary) {
      FaceBlock fb;
      fb.is_boundary = true;
      fb.tag = bf.tag;
      fb.conn.elem_left = bf.elem;
      fb.conn.face_left = bf.face;
      fill_shared(fb);
      face_blocks_.push_back(std::move(fb));
    }
  }

  void fill_shared(FaceBlock& fb) {
    const int l = config_.l;
    const std::vector<double> an = elem_data_[fb.conn.elem_left].an_own_l[fb.conn.face_left];
    fb.split.clear();
    fb.split.reserve(l + 1);
    for (int q = 0; q <= l; ++q) {
      std::vector<double> blk(an.begin() + static_cast<size_t>(q) * p_ * p_,
                              an.begin() + static_cast<size_t>(q + 1) * p_ * p_);
      // symmetrize round-off before the eigensolver
      for (int i = 0; i < p_; ++i)
        for (int j = 0; j < i; ++j) {
          const double s = 0.5 * (blk[i * p_ + j] + blk[j * p_ + i]);
          blk[i * p_ + j] = s;
          blk[j * p_ + i] = s;
        }
      fb.split.push_back(normal_split(blk, p_));
    }
    const CurvedElement& e = mesh_->elements[fb.conn.elem_left];
    const ElementFace& ef = e.faces[fb.conn.face_left];
    fb.coords.assign(static_cast<size_t>(l + 1) * 2, 0.0);
    for (int q = 0; q <= l; ++q)
      for (int s = 0; s <= config_.n; ++s) {
        const double w = interp_nl_(q, s);
        fb.coords[q * 2 + 0] += w * ef.coords[s * 2 + 0];
        fb.coords[q * 2 + 1] += w * ef.coords[s * 2 + 1];
      }
  }

  Field2 volume_term(const Field2& u, int elem) const {
    const int m = config_.m;
    const std::array<Field2, 2> f = volume_flux(u, elem);
    if (config_.form == DGForm::W) {
      // + <F, grad phi>_M
      std::array<Field2, 2> wf;
      for (int dir = 0; dir < 2; ++dir) {
        wf[dir] = f[dir];
        for (int j = 0; j <= m; ++j)
          for (int i = 0; i <= m; ++i) {
            const double w = rule_m_.weights[i] * rule_m_.weights[j];
            for (int c = 0; c < p_; ++c) wf[dir].at(i, j, c) *= w;
          }
      }
      Field2 out = apply_pair(grad_nm_t_, interp_nm_t_, wf[0]);
      const Field2 second = apply_pair(interp_nm_t_, grad_nm_t_, wf[1]);
      for (size_t q = 0; q < out.a.size(); ++q) out.a[q] += second.a[q];
      return out;
    }
    // - <div_M F, phi>_M for the strong forms
    Field2 div = apply_dir2(d_m_, f[0], 0);
    const Field2 d2 = apply_dir2(d_m_, f[1], 1);
    for (size_t q = 0; q < div.a.size(); ++q) div.a[q] += d2.a[q];
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double w = rule_m_.weights[i] * rule_m_.weights[j];
        for (int c = 0; c < p_; ++c) div.at(i, j, c) *= w;
      }
    Field2 out = apply_pair(interp_nm_t_, interp_nm_t_, div);
    for (double& v : out.a) v = -v;
    return out;
  }

  // Adds sum_q w_q h(q,c) phi_ab(q) into the face-adjacent row of the output.
  void lift_face(Field2& out, int face, const std::vector<double>& h, const Matrix& interp,
                 const std::vector<double>& weights, double scale) const {
    const int n = config_.n;
    const int nq = interp.rows();
    const int axis = face_axis(face);
    const int edge = face_side(face) == 0 ? 0 : n;
    for (int b = 0; b <= n; ++b) {
      for (int c = 0; c < p_; ++c) {
        double s = 0.0;
        for (int q = 0; q < nq; ++q) s += weights[q] * h[static_cast<size_t>(q) * p_ + c] * interp(q, b);
        if (axis == 0)
          out.at(edge, b, c) += scale * s;
        else
          out.at(b, edge, c) += scale * s;
      }
    }
  }

  void scatter_surface(const FaceBlock& fb, const FaceState& fs, std::vector<Field2>& out) const {
    const int l = config_.l, m = config_.m;
    const int npl = l + 1, npm = m + 1;
    struct Side {
      int elem, face;
      double orient;  // +1 left, -1 right (fstar is along the left normal)
      bool present;
    };
    const std::array<Side, 2> sides = {
        Side{fb.conn.elem_left, fb.conn.face_left, 1.0, true},
        Side{fb.conn.elem_right, fb.conn.face_right, -1.0, !fb.is_boundary}};

    for (const Side& sd : sides) {
      if (!sd.present) continue;
      // fstar in this element's own face ordering and outward orientation
      std::vector<double> fstar_own(static_cast<size_t>(npl) * p_, 0.0);
      for (int q = 0; q < npl; ++q) {
        const int qs = (sd.orient < 0.0 && fb.conn.reversed) ? l - q : q;
        for (int c = 0; c < p_; ++c)
          fstar_own[q * p_ + c] = sd.orient * fs.fstar[static_cast<size_t>(qs) * p_ + c];
      }
      const std::vector<double>& fn_own_l = sd.orient > 0.0 ? fs.fn_own_l_l : fs.fn_own_r_l;
      const std::vector<double>& fn_own_m = sd.orient > 0.0 ? fs.fn_own_l_m : fs.fn_own_r_m;

      Field2& target = out[sd.elem];
      switch (config_.form) {
        case DGForm::W:
          lift_face(target, sd.face, fstar_own, interp_nl_, rule_l_.weights, -1.0);
          break;
        case DGForm::S2: {
          lift_face(target, sd.face, fstar_own, interp_nl_, rule_l_.weights, -1.0);
          lift_face(target, sd.face, fn_own_m, interp_nm_, rule_m_.weights, 1.0);
          break;
        }
        case DGForm::S1: {
          if (config_.s1_product == S1ProductGrid::L || m == l) {
            std::vector<double> h(static_cast<size_t>(npl) * p_, 0.0);
            for (size_t q = 0; q < h.size(); ++q) h[q] = fstar_own[q] - fn_own_l[q];
            lift_face(target, sd.face, h, interp_nl_, rule_l_.weights, -1.0);
          } else {
            // product formed on the M grid, then interpolated to P^N: the
            // N-quadrature of that interpolant is the tau-weighted M-grid sum
            std::vector<double> h(static_cast<size_t>(npm) * p_, 0.0);
            for (int q = 0; q < npm; ++q)
              for (int s = 0; s < npl; ++s) {
                const double w = interp_lm_(q, s);
                if (w == 0.0) continue;
                for (int c = 0; c < p_; ++c) h[q * p_ + c] += w * fstar_own[s * p_ + c];
              }
            for (size_t q = 0; q < h.size(); ++q) h[q] -= fn_own_m[q];
            lift_face(target, sd.face, h, interp_nm_, tau_, -1.0);
          }
          break;
        }
      }
    }
  }

  const Mesh* mesh_;
  const ContravariantField* contrav_;
  SchemeConfig config_;
  BoundaryCondition bc_;
  int nthreads_ = 1;
  int p_ = 1;
  QuadratureRule rule_n_, rule_m_, rule_l_;
  Matrix d_n_, d_m_;
  Matrix interp_nm_, interp_nl_, interp_lm_, interp_mn_;
  Matrix interp_nm_t_, grad_nm_, grad_nm_t_;
  std::vector<double> tau_;
  std::vector<ElementData> elem_data_;
  std::vector<FaceBlock> face_blocks_;
};

// ---------------------------------------------------------------------------
// Explicit low-storage five-stage fourth-order Runge-Kutta

struct RKCoefficients {
  static constexpr std::array<double, 5> a = {
      0.0, -567301805773.0 / 1357537059087.0, -2404267990393.0 / 2016746695238.0,
      -3550918686646.0 / 2091501179385.0, -1275806237668.0 / 842570457699.0};
  static constexpr std::array<double, 5> b = {
      1432997174477.0 / 9575080441755.0, 5161836677717.0 / 13612068292357.0,
      1720146321549.0 / 2090206949498.0, 3134564353537.0 / 4481467310338.0,
      2277821191437.0 / 14882151754819.0};
  static constexpr std::array<double, 5> c = {
      0.0, 1432997174477.0 / 9575080441755.0, 2526269341429.0 / 6820363962896.0,
      2006345519317.0 / 3224310063776.0, 2802321613138.0 / 2924317926251.0};
};

template <typename RhsOp>
void step_rk(SolutionField& state, double dt, const RhsOp& rhs_op) {
  require(dt > 0.0, "dt must be positive");
  const double t0 = state.time;
  std::vector<Field2> g;
  for (int s = 0; s < 5; ++s) {
    state.time = t0 + RKCoefficients::c[s] * dt;
    const std::vector<Field2> k = rhs_op(state);
    if (g.empty()) {
      g = k;
    } else {
      for (size_t e = 0; e < g.size(); ++e)
        for (size_t q = 0; q < g[e].a.size(); ++q)
          g[e].a[q] = RKCoefficients::a[s] * g[e].a[q] + k[e].a[q];
    }
    for (size_t e = 0; e < g.size(); ++e)
      for (size_t q = 0; q < g[e].a.size(); ++q) state.u[e].a[q] += RKCoefficients::b[s] * dt * g[e].a[q];
  }
  state.time = t0 + dt;
  for (const Field2& u : state.u)
    for (double v : u.a)
      if (!std::isfinite(v))
        throw numerical_error("non-finite solution value after step to t = " +
                              std::to_string(state.time));
}

inline void step_rk(SolutionField& state, double dt, const Discretization& disc) {
  step_rk(state, dt, [&disc](const SolutionField& s) { return disc.rhs(s); });
}

// dt = CFL * dx_ref / (lambda (2N+1)) with the contravariant speed bound.
inline double cfl_timestep(const Discretization& disc, double cfl) {
  const double lam = std::max(disc.max_reference_speed(), 1e-14);
  return cfl * 2.0 / (lam * (2.0 * disc.config().n + 1.0));
}

struct IntegrationResult {
  int steps = 0;
  double final_time = 0.0;
};

// Fixed-dt integration with per-step monitors; the monitor sees the state
// before the first step and after every step.
template <typename Monitor>
IntegrationResult integrate(SolutionField& state, double t_end, double dt,
                            const Discretization& disc, Monitor&& monitor) {
  require(t_end >= state.time, "T must be >= start time");
  IntegrationResult res;
  monitor(0, state);
  int step = 0;
  while (state.time < t_end - 1e-14) {
    const double h = std::min(dt, t_end - state.time);
    step_rk(state, h, disc);
    ++step;
    monitor(step, state);
  }
  res.steps = step;
  res.final_time = state.time;
  return res;
}

}  // namespace dg

#endif  // DG_SOLVER_HPP
