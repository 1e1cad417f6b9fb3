#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/jet.hpp"
#include "hlab/solutions.hpp"
#include "hlab/tensor.hpp"

namespace hlab {

// at(i, j, k) = grad_i R_{jk} - grad_j R_{ik}; antisymmetric in (i, j) with
// vanishing cyclic sum.
inline Tensor<Jet> compute_P(const SpatialGeometry& G) {
  Tensor<Jet> dric = covariant_derivative(G.ric, G.gamma);
  const int n = G.dim;
  Tensor<Jet> p(Range::Spatial, n, {Var::Down, Var::Down, Var::Down}, zero_like(dric(0, 0, 0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) p(i, j, k) = dric(i, j, k) - dric(j, i, k);
  return p;
}

// at(i, j) = Lap R_{ij} - (1/2) grad_i grad_j R + 2 R_{kijl} R^{kl}
//          - R_{ik} R^k_j, the time-independent part of the matrix Harnack
// quadratic form; shorthand contractions resolved through the metric.
inline Tensor<Jet> compute_M(const SpatialGeometry& G) {
  const int n = G.dim;
  Tensor<Jet> lap_ric = rough_laplacian(G.ric, G.g_inv, G.gamma);
  Tensor<Jet> scalar(Range::Spatial, n, {}, G.R);
  Tensor<Jet> hess_R = covariant_derivative(covariant_derivative(scalar, G.gamma), G.gamma);
  Tensor<Jet> ric_up = flip_slot(G.ric_mixed, 0, G.g_inv);
  Tensor<Jet> m(Range::Spatial, n, {Var::Down, Var::Down}, zero_like(lap_ric(0, 0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet val = lap_ric(i, j) - 0.5 * hess_R(i, j);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) val += 2.0 * G.rm_low(k, i, j, l) * ric_up(k, l);
        val -= G.ric(i, k) * G.ric_mixed(j, k);
      }
      m(i, j) = val;
    }
  return m;
}

namespace detail {

inline void require_positive_time(bool with_time_term, double t) {
  if (with_time_term && !(t > 0.0))
    throw ConfigError("the 1/t term requires a positive time, got t = " + std::to_string(t));
}

}  // namespace detail

// Point values of M, optionally with the + (1/2t) R_{ij} term.
inline Tensor<double> compute_M(const SpatialGeometry& G, bool with_time_term, double t) {
  detail::require_positive_time(with_time_term, t);
  Tensor<double> m = values_of(compute_M(G));
  if (with_time_term) {
    Tensor<double> ric = values_of(G.ric);
    for (int i = 0; i < G.dim; ++i)
      for (int j = 0; j < G.dim; ++j) m(i, j) += ric(i, j) / (2.0 * t);
  }
  return m;
}

struct HarnackData {
  Tensor<double> U;       // antisymmetric, Down Down
  Tensor<double> W;       // Down
  std::vector<double> V;  // optional vector, upper components
  double t = 0.0;         // required positive when 1/t terms are used
};

inline void require_antisymmetric(const Tensor<double>& u) {
  for (int i = 0; i < u.extent(); ++i)
    for (int j = 0; j < u.extent(); ++j)
      if (u(i, j) + u(j, i) != 0.0) throw ShapeError("U must be exactly antisymmetric");
}

// Z = M_{ij} W^i W^j - 2 P_{ijk} U^{ij} W^k + R_{ijkl} U^{ij} U^{lk}, all
// shorthand contractions through the metric; the time flag adds
// (1/2t) R_{ij} W^i W^j.
inline double harnack_Z(const SpatialGeometry& G, const HarnackData& d, bool with_time_term) {
  const int n = G.dim;
  require_antisymmetric(d.U);
  detail::require_positive_time(with_time_term, d.t);
  Tensor<double> g_inv = values_of(G.g_inv);
  std::vector<double> w_up(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w_up[i] += g_inv(i, j) * d.W(j);
  Tensor<double> u_up(Range::Spatial, n, {Var::Up, Var::Up}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) u_up(i, j) += g_inv(i, a) * g_inv(j, b) * d.U(a, b);

  Tensor<double> m = values_of(compute_M(G));
  Tensor<double> p = values_of(compute_P(G));
  Tensor<double> rm_low = values_of(G.rm_low);
  Tensor<double> ric = values_of(G.ric);

  double z = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      z += m(i, j) * w_up[i] * w_up[j];
      if (with_time_term) z += ric(i, j) * w_up[i] * w_up[j] / (2.0 * d.t);
      for (int k = 0; k < n; ++k) {
        z -= 2.0 * p(i, j, k) * u_up(i, j) * w_up[k];
        for (int l = 0; l < n; ++l) z += rm_low(i, j, k, l) * u_up(i, j) * u_up(l, k);
      }
    }
  return z;
}

// dR/dt + [R/t] + 2 grad_i R V^i + 2 R_{ij} V^i V^j for a vector V.
inline double trace_harnack(const SpatialGeometry& G, std::span<const double> v_up,
                            bool with_time_term, double t) {
  const int n = G.dim;
  if (static_cast<int>(v_up.size()) != n) throw ShapeError("vector has wrong dimension");
  detail::require_positive_time(with_time_term, t);
  Tensor<Jet> scalar(Range::Spatial, n, {}, G.R);
  Tensor<Jet> dR = covariant_derivative(scalar, G.gamma);
  double out = G.R.derivative(0).value();
  if (with_time_term) out += G.R.value() / t;
  for (int i = 0; i < n; ++i) {
    out += 2.0 * dR(i).value() * v_up[i];
    for (int j = 0; j < n; ++j) out += 2.0 * G.ric(i, j).value() * v_up[i] * v_up[j];
  }
  return out;
}

// An element U + W of the two-forms-plus-one-forms algebra.  The lowered
// representation stores U_{ij} and W_i; the mixed representation stores the
// space-time endomorphism blocks a_i^j = g^{jp} U_{ip} and a_i^0 = W_i.
enum class AlgebraRep { Lowered, Mixed };

struct LieAlgebraElement {
  Tensor<double> two_form;
  Tensor<double> one_form;
  AlgebraRep rep = AlgebraRep::Lowered;
};

inline LieAlgebraElement zero_element(int n, AlgebraRep rep = AlgebraRep::Lowered) {
  Var second = rep == AlgebraRep::Lowered ? Var::Down : Var::Up;
  return LieAlgebraElement{Tensor<double>(Range::Spatial, n, {Var::Down, second}, 0.0),
                           Tensor<double>(Range::Spatial, n, {Var::Down}, 0.0), rep};
}

inline LieAlgebraElement to_mixed(const LieAlgebraElement& e, const Tensor<double>& g_inv) {
  if (e.rep == AlgebraRep::Mixed) return e;
  const int n = e.two_form.dim();
  LieAlgebraElement out = zero_element(n, AlgebraRep::Mixed);
  out.one_form = e.one_form;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p) out.two_form(i, j) += g_inv(j, p) * e.two_form(i, p);
  return out;
}

inline LieAlgebraElement to_lowered(const LieAlgebraElement& e, const Tensor<double>& g) {
  if (e.rep == AlgebraRep::Lowered) return e;
  const int n = e.two_form.dim();
  LieAlgebraElement out = zero_element(n, AlgebraRep::Lowered);
  out.one_form = e.one_form;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) out.two_form(i, j) += e.two_form(i, m) * g(m, j);
  return out;
}

// Mixed representation must satisfy g^{ik} a_k^j = -g^{jk} a_k^i.
inline void require_mixed_invariant(const LieAlgebraElement& e, const Tensor<double>& g_inv) {
  const int n = e.two_form.dim();
  double scale = std::max(1.0, max_abs(e.two_form));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += g_inv(i, k) * e.two_form(k, j) + g_inv(j, k) * e.two_form(k, i);
      if (std::abs(s) > 1e-10 * scale)
        throw ShapeError("mixed element violates the raised-antisymmetry condition");
    }
}

// Three equivalent realizations of the bracket and inner product: directly on
// the summands, through antisymmetric space-time 2-forms with the degenerate
// metric, and through mixed-index space-time endomorphisms.
enum class AlgebraMode { Direct, Spacetime, Mixed };

namespace detail {

inline std::vector<std::vector<double>> spacetime_two_form(const LieAlgebraElement& e) {
  const int n = e.two_form.dim();
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i + 1][j + 1] = e.two_form(i, j);
    a[i + 1][0] = e.one_form(i);
    a[0][i + 1] = -e.one_form(i);
  }
  return a;
}

inline std::vector<std::vector<double>> mixed_endomorphism(const LieAlgebraElement& e,
                                                           const Tensor<double>& g_inv) {
  const int n = e.two_form.dim();
  std::vector<std::vector<double>> m(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    m[i + 1][0] = e.one_form(i);
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p) m[i + 1][j + 1] += g_inv(j, p) * e.two_form(i, p);
  }
  return m;
}

inline LieAlgebraElement lowered_bracket(const LieAlgebraElement& a, const LieAlgebraElement& b,
                                         const Tensor<double>& g, const Tensor<double>& g_inv,
                                         AlgebraMode mode) {
  const int n = a.two_form.dim();
  LieAlgebraElement out = zero_element(n);
  switch (mode) {
    case AlgebraMode::Direct: {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              out.two_form(i, j) += a.two_form(i, k) * g_inv(k, l) * b.two_form(l, j) -
                                    b.two_form(i, k) * g_inv(k, l) * a.two_form(l, j);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            out.one_form(i) += a.two_form(i, k) * g_inv(k, l) * b.one_form(l) -
                               b.two_form(i, k) * g_inv(k, l) * a.one_form(l);
      }
      return out;
    }
    case AlgebraMode::Spacetime: {
      auto alpha = spacetime_two_form(a);
      auto beta = spacetime_two_form(b);
      std::vector<std::vector<double>> res(n + 1, std::vector<double>(n + 1, 0.0));
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          for (int k = 1; k <= n; ++k)
            for (int l = 1; l <= n; ++l)
              res[i][j] +=
                  g_inv(k - 1, l - 1) * (alpha[i][k] * beta[l][j] - beta[i][k] * alpha[l][j]);
      for (int i = 0; i < n; ++i) {
        out.one_form(i) = res[i + 1][0];
        for (int j = 0; j < n; ++j) out.two_form(i, j) = res[i + 1][j + 1];
      }
      return out;
    }
    case AlgebraMode::Mixed: {
      auto s = mixed_endomorphism(a, g_inv);
      auto u = mixed_endomorphism(b, g_inv);
      std::vector<std::vector<double>> res(n + 1, std::vector<double>(n + 1, 0.0));
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n; ++k) res[i][j] += s[i][k] * u[k][j] - u[i][k] * s[k][j];
      for (int i = 0; i < n; ++i) {
        out.one_form(i) = res[i + 1][0];
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m) out.two_form(i, j) += res[i + 1][m + 1] * g(m, j);
      }
      return out;
    }
  }
  throw ShapeError("unknown algebra mode");
}

inline double lowered_inner(const LieAlgebraElement& a, const LieAlgebraElement& b,
                            const Tensor<double>& g_inv, AlgebraMode mode) {
  const int n = a.two_form.dim();
  switch (mode) {
    case AlgebraMode::Direct: {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              s += g_inv(i, k) * g_inv(j, l) * a.two_form(i, j) * b.two_form(k, l);
      return s;
    }
    case AlgebraMode::Spacetime: {
      auto alpha = spacetime_two_form(a);
      auto beta = spacetime_two_form(b);
      double s = 0.0;
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          for (int k = 1; k <= n; ++k)
            for (int l = 1; l <= n; ++l)
              s += g_inv(i - 1, k - 1) * g_inv(j - 1, l - 1) * alpha[i][j] * beta[k][l];
      return s;
    }
    case AlgebraMode::Mixed: {
      auto s_m = mixed_endomorphism(a, g_inv);
      auto u_m = mixed_endomorphism(b, g_inv);
      double s = 0.0;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) s -= s_m[i][j] * u_m[j][i];
      return s;
    }
  }
  throw ShapeError("unknown algebra mode");
}

}  // namespace detail

inline std::pair<LieAlgebraElement, double> bracket_and_inner(const LieAlgebraElement& a,
                                                              const LieAlgebraElement& b,
                                                              const Tensor<double>& g,
                                                              const Tensor<double>& g_inv,
                                                              AlgebraMode mode) {
  if (a.rep != b.rep) throw ShapeError("representation mismatch");
  if (a.two_form.dim() != b.two_form.dim()) throw ShapeError("dimension mismatch");
  if (a.rep == AlgebraRep::Mixed) {
    require_mixed_invariant(a, g_inv);
    require_mixed_invariant(b, g_inv);
  }
  LieAlgebraElement la = to_lowered(a, g);
  LieAlgebraElement lb = to_lowered(b, g);
  LieAlgebraElement br = detail::lowered_bracket(la, lb, g, g_inv, mode);
  double inner = detail::lowered_inner(la, lb, g_inv, mode);
  if (a.rep == AlgebraRep::Mixed) br = to_mixed(br, g_inv);
  return {br, inner};
}

// Pointwise basis of the algebra: an orthonormalized set of 2-forms followed
// by the coordinate 1-forms.  Coordinates of an element are inner products
// against the 2-form part and raw components on the 1-form part; structure
// constants are the coordinates of pairwise brackets.
class SharpBasis {
 public:
  SharpBasis(const Tensor<double>& g, const Tensor<double>& g_inv,
             AlgebraMode mode = AlgebraMode::Direct)
      : g_(g), g_inv_(g_inv), n_(g.dim()), n2_(n_ * (n_ - 1) / 2) {
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        LieAlgebraElement e = zero_element(n_);
        e.two_form(a, b) = 1.0;
        e.two_form(b, a) = -1.0;
        for (int prev = 0; prev < static_cast<int>(basis_.size()); ++prev) {
          double c = detail::lowered_inner(e, basis_[prev], g_inv_, AlgebraMode::Direct);
          for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) e.two_form(i, j) -= c * basis_[prev].two_form(i, j);
        }
        double norm = std::sqrt(detail::lowered_inner(e, e, g_inv_, AlgebraMode::Direct));
        if (norm < 1e-12) throw SingularMetricError("degenerate metric while building the basis");
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) e.two_form(i, j) /= norm;
        basis_.push_back(e);
      }
    for (int k = 0; k < n_; ++k) {
      LieAlgebraElement e = zero_element(n_);
      e.one_form(k) = 1.0;
      basis_.push_back(e);
    }
    rebuild_structure_constants(mode);
  }

  int dim() const { return n2_ + n_; }
  int two_form_count() const { return n2_; }
  const LieAlgebraElement& element(int a) const { return basis_[a]; }

  // Replaces the 2-form block by an orthogonal recombination and rebuilds the
  // structure constants.
  void rotate_two_form_block(const std::vector<std::vector<double>>& o, AlgebraMode mode) {
    std::vector<LieAlgebraElement> next = basis_;
    for (int a = 0; a < n2_; ++a) {
      LieAlgebraElement e = zero_element(n_);
      for (int b = 0; b < n2_; ++b)
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) e.two_form(i, j) += o[a][b] * basis_[b].two_form(i, j);
      next[a] = e;
    }
    basis_ = next;
    rebuild_structure_constants(mode);
  }

  std::vector<double> coords(const LieAlgebraElement& e) const {
    std::vector<double> co(static_cast<std::size_t>(dim()), 0.0);
    for (int a = 0; a < n2_; ++a)
      co[a] = detail::lowered_inner(e, basis_[a], g_inv_, AlgebraMode::Direct);
    for (int k = 0; k < n_; ++k) co[n2_ + k] = e.one_form(k);
    return co;
  }

  LieAlgebraElement assemble(std::span<const double> co) const {
    LieAlgebraElement e = zero_element(n_);
    for (int a = 0; a < dim(); ++a)
      for (int i = 0; i < n_; ++i) {
        e.one_form(i) += co[a] * basis_[a].one_form(i);
        for (int j = 0; j < n_; ++j) e.two_form(i, j) += co[a] * basis_[a].two_form(i, j);
      }
    return e;
  }

  double c(int alpha, int gamma, int delta) const {
    const int N = dim();
    return c_[(static_cast<std::size_t>(alpha) * N + gamma) * N + delta];
  }

 private:
  void rebuild_structure_constants(AlgebraMode mode) {
    const int N = dim();
    c_.assign(static_cast<std::size_t>(N) * N * N, 0.0);
    for (int gm = 0; gm < N; ++gm)
      for (int dl = 0; dl < N; ++dl) {
        LieAlgebraElement br = detail::lowered_bracket(basis_[gm], basis_[dl], g_, g_inv_, mode);
        std::vector<double> co = coords(br);
        for (int al = 0; al < N; ++al)
          c_[(static_cast<std::size_t>(al) * N + gm) * N + dl] = co[al];
      }
  }

  Tensor<double> g_, g_inv_;
  int n_, n2_;
  std::vector<LieAlgebraElement> basis_;
  std::vector<double> c_;
};

// (Q^#)_{ab} = c_a^{gd} c_b^{mn} Q_{gm} Q_{dn} for a symmetric matrix Q in
// basis coordinates.
inline std::vector<double> sharp_square(const SharpBasis& basis, const std::vector<double>& q) {
  const int N = basis.dim();
  if (static_cast<int>(q.size()) != N * N) throw ShapeError("quadratic form has wrong size");
  double scale = 1.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b)
      if (std::abs(q[a * N + b] - q[b * N + a]) > 1e-12 * scale)
        throw ShapeError("sharp square requires a symmetric form");
  std::vector<double> out(static_cast<std::size_t>(N) * N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      double s = 0.0;
      for (int gm = 0; gm < N; ++gm)
        for (int dl = 0; dl < N; ++dl) {
          double cl = basis.c(a, gm, dl);
          if (cl == 0.0) continue;
          for (int mu = 0; mu < N; ++mu)
            for (int nu = 0; nu < N; ++nu)
              s += cl * basis.c(b, mu, nu) * q[gm * N + mu] * q[dl * N + nu];
        }
      out[a * N + b] = s;
    }
  return out;
}

// Volume 2-form of an oriented 2-D metric as a jet field.
inline Tensor<Jet> volume_two_form(const SpatialGeometry& G) {
  if (G.dim != 2) throw ShapeError("volume 2-form helper is specific to two dimensions");
  Jet det = G.g(0, 0) * G.g(1, 1) - G.g(0, 1) * G.g(1, 0);
  Jet root = sqrt(det);
  Tensor<Jet> vol(Range::Spatial, 2, {Var::Down, Var::Down}, zero_like(root));
  vol(0, 1) = root;
  vol(1, 0) = -root;
  return vol;
}

// For U = (1/2)(V (x) W - W (x) V), substituting grad V := Ric and
// grad W := 0 into the product-rule expansion of grad U and comparing against
// (1/2)(R_{ij} W_k - R_{ik} W_j); pure point algebra.
inline double hamilton_substitution_residual(const Tensor<double>& ric, std::span<const double> v,
                                             std::span<const double> w) {
  const int n = ric.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double lhs = 0.5 * (ric(i, j) * w[k] + v[j] * 0.0 - 0.0 * v[k] - w[j] * ric(i, k));
        double rhs = 0.5 * (ric(i, j) * w[k] - ric(i, k) * w[j]);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  return worst;
}

// Residuals of the soliton U/W relations for W = U contracted with V = df
// using the sign W_i = -U_{ij} g^{jk} V_k.
struct SolitonUWResiduals {
  double parallel_u;             // grad U
  double w_gradient;             // grad_i W_j + R_i^p U_{jp}
  double w_time_evolution;       // d/dt W_i - Lap W_i + U_{ij} R_{jk} V_k
  double hamilton_substitution;  // the (1/2)(R_{ij} W_k - R_{ik} W_j) identity
};

inline SolitonUWResiduals soliton_uw_checks(const SpatialGeometry& G, const Tensor<Jet>& u_field,
                                            double parallel_tolerance = 1e-8) {
  if (!G.has_potential) throw ConfigError("soliton U/W checks require a potential");
  const int n = G.dim;
  SolitonUWResiduals out{};
  out.parallel_u = max_abs_value(covariant_derivative(u_field, G.gamma));
  if (out.parallel_u > parallel_tolerance)
    throw ConfigError("U field is not parallel at the sample point");

  Tensor<Jet> w(Range::Spatial, n, {Var::Down}, zero_like(u_field(0, 0)));
  for (int i = 0; i < n; ++i) {
    Jet s = zero_like(u_field(0, 0));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s -= u_field(i, j) * G.g_inv(j, k) * G.df(k);
    w(i) = s;
  }

  Tensor<Jet> dw = covariant_derivative(w, G.gamma);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet r = dw(i, j);
      for (int p = 0; p < n; ++p) r += G.ric_mixed(i, p) * u_field(j, p);
      worst = std::max(worst, std::abs(r.value()));
    }
  out.w_gradient = worst;

  Tensor<Jet> dt_w = time_derivative(w);
  Tensor<Jet> lap_w = rough_laplacian(w, G.g_inv, G.gamma);
  worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Jet r = dt_w(i) - lap_w(i);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r += u_field(i, j) * G.ric_mixed(k, j) * G.grad_f(k);
    worst = std::max(worst, std::abs(r.value()));
  }
  out.w_time_evolution = worst;

  std::vector<double> v_low(static_cast<std::size_t>(n), 0.0);
  std::vector<double> w_low(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    v_low[i] = G.df(i).value();
    w_low[i] = w(i).value();
  }
  out.hamilton_substitution = hamilton_substitution_residual(values_of(G.ric), v_low, w_low);
  return out;
}

}  // namespace hlab
