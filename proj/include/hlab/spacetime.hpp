#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/harnack.hpp"
#include "hlab/jet.hpp"
#include "hlab/solutions.hpp"
#include "hlab/tensor.hpp"

namespace hlab {

// Connection over indices 0..n (0 is time) attached to a catalog solution.
// The spatial block is the Levi-Civita connection of g(t + tau); the mixed
// block carries -Ric, plus the potential Hessian on modified flows; the
// time-time block is the raised gradient of the flow speed scalar.  All
// jets are based at (x, t + tau), so jet variable 0 differentiates in t.
struct SpacetimeConnection {
  const JetLayout* layout;
  int dim;
  double t;
  std::vector<double> x;
  double tau;
  bool modified;
  SpatialGeometry base;
  Tensor<Jet> gamma;     // at(k, i, j), symmetric in (i, j), upper row 0 zero
  Tensor<Jet> g_st;      // spatial block g(t + tau), time row and column zero
  Tensor<Jet> g_inv_st;  // spatial block g^{-1}(t + tau), time row and column zero
};

namespace detail {

constexpr int kConnectionMinOrder = 3;
constexpr int kCurvatureMinOrder = 4;
constexpr int kResidualMinOrder = 5;

inline void require_order(const JetLayout& layout, int min_order, const std::string& what) {
  if (layout.order() < min_order)
    throw OrderExceededError(what + " needs jet order >= " + std::to_string(min_order) +
                             ", layout has order " + std::to_string(layout.order()));
}

}  // namespace detail

inline SpacetimeConnection build_spacetime_connection(const FlowSolution& s, double t,
                                                      std::span<const double> x, double tau,
                                                      int order = 5) {
  if (tau < 0.0) throw ConfigError("time offset must be nonnegative");
  const bool modified = uses_potential_in_flow(s.mode());
  if (modified && !s.has_potential())
    throw ConfigError(s.name() + ": modified flow requires a potential");
  SpatialGeometry base = geometry_at(s, t + tau, x, order);
  detail::require_order(*base.layout, detail::kConnectionMinOrder, "space-time connection");
  const JetLayout* layout = base.layout;
  const int n = base.dim;
  const Jet zero = Jet::constant(*layout, 0.0);

  Tensor<Jet> gamma(Range::Spacetime, n, {Var::Up, Var::Down, Var::Down}, zero);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gamma(k + 1, i + 1, j + 1) = base.gamma(k, i, j);

  Tensor<Jet> hess_up = flip_slot(base.hess_f, 1, base.g_inv);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Jet v = -base.ric_mixed(i, k);
      if (modified) v += hess_up(i, k);
      gamma(k + 1, i + 1, 0) = v;
      gamma(k + 1, 0, i + 1) = v;
    }

  Jet speed = -0.5 * base.R;
  if (modified) {
    Jet grad_sq = zero;
    for (int i = 0; i < n; ++i) grad_sq += base.grad_f(i) * base.df(i);
    speed += base.f.derivative(0) - 0.5 * grad_sq;
  }
  Tensor<Jet> speed_scalar(Range::Spatial, n, {}, speed);
  Tensor<Jet> grad_speed = flip_slot(covariant_derivative(speed_scalar, base.gamma), 0, base.g_inv);
  for (int k = 0; k < n; ++k) gamma(k + 1, 0, 0) = grad_speed(k);

  Tensor<Jet> g_st(Range::Spacetime, n, {Var::Down, Var::Down}, zero);
  Tensor<Jet> g_inv_st(Range::Spacetime, n, {Var::Up, Var::Up}, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g_st(i + 1, j + 1) = base.g(i, j);
      g_inv_st(i + 1, j + 1) = base.g_inv(i, j);
    }

  return SpacetimeConnection{layout,
                             n,
                             t,
                             std::vector<double>(x.begin(), x.end()),
                             tau,
                             modified,
                             std::move(base),
                             std::move(gamma),
                             std::move(g_st),
                             std::move(g_inv_st)};
}

enum class CurvatureMethod { Direct, ClosedForm };

struct SpacetimeCurvature {
  Tensor<Jet> rm;  // at(i, j, k, l) over 0..n, last slot Up
  CurvatureMethod method;
};

namespace detail {

enum class TimeBlockForm { Evolution, Laplacian };

// The two printed forms of the time-time curvature block, as a mixed
// spatial tensor at(i, l): the flow-derivative form built on d/dt R_i^l and
// the Laplacian form built on Lap R_i^l.
inline Tensor<Jet> time_block_closed_form(const SpatialGeometry& G, bool modified,
                                          TimeBlockForm form) {
  const int n = G.dim;
  const Jet zero = zero_like(G.R);
  Tensor<Jet> dricm = covariant_derivative(G.ric_mixed, G.gamma);
  Tensor<Jet> dric = covariant_derivative(G.ric, G.gamma);
  Tensor<Jet> dric_up = flip_slot(dric, 0, G.g_inv);
  Tensor<Jet> scalar(Range::Spatial, n, {}, G.R);
  Tensor<Jet> hess_R_up =
      flip_slot(covariant_derivative(covariant_derivative(scalar, G.gamma), G.gamma), 1, G.g_inv);
  Tensor<Jet> out(Range::Spatial, n, {Var::Down, Var::Up}, zero);
  Tensor<Jet> p_tensor = modified ? compute_P(G) : Tensor<Jet>(Range::Spatial, n, {}, zero);
  Tensor<Jet> hess_up = flip_slot(G.hess_f, 1, G.g_inv);
  Tensor<Jet> lap_ricm = form == TimeBlockForm::Laplacian
                             ? rough_laplacian(G.ric_mixed, G.g_inv, G.gamma)
                             : Tensor<Jet>(Range::Spatial, n, {}, zero);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      Jet ric_sq = zero;
      for (int m = 0; m < n; ++m) ric_sq += G.ric_mixed(i, m) * G.ric_mixed(m, l);
      Jet v = -0.5 * hess_R_up(i, l) - ric_sq;
      if (form == TimeBlockForm::Laplacian) {
        v += lap_ricm(i, l);
        Jet quad = zero;
        for (int m = 0; m < n; ++m)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              quad += G.g_inv(l, m) * G.rm(p, i, m, q) * G.ric_mixed(q, p);
        v += 2.0 * quad;
        if (modified)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              v -= G.g_inv(q, l) * (p_tensor(i, p, q) + p_tensor(q, p, i)) * G.grad_f(p);
      } else {
        v += G.ric_mixed(i, l).derivative(0);
        if (modified)
          for (int p = 0; p < n; ++p) {
            v -= G.grad_f(p) * dricm(p, i, l);
            v -= (dricm(i, p, l) - dricm(p, i, l)) * G.grad_f(p);
            v -= (dric_up(l, i, p) - dricm(p, i, l)) * G.grad_f(p);
            v += G.ric_mixed(i, p) * hess_up(p, l) - G.ric_mixed(p, l) * hess_up(i, p);
          }
      }
      if (modified)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) v += G.rm(i, p, q, l) * G.grad_f(p) * G.grad_f(q);
      out(i, l) = v;
    }
  return out;
}

}  // namespace detail

inline SpacetimeCurvature spacetime_curvature(const SpacetimeConnection& c,
                                              CurvatureMethod method) {
  detail::require_order(*c.layout, detail::kCurvatureMinOrder, "space-time curvature");
  if (method == CurvatureMethod::Direct)
    return SpacetimeCurvature{curvature_from_connection(c.gamma), method};

  const SpatialGeometry& G = c.base;
  const int n = c.dim;
  const Jet zero = Jet::constant(*c.layout, 0.0);
  Tensor<Jet> rm(Range::Spacetime, n, {Var::Down, Var::Down, Var::Down, Var::Up}, zero);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) rm(i + 1, j + 1, k + 1, l + 1) = G.rm(i, j, k, l);

  Tensor<Jet> dricm = covariant_derivative(G.ric_mixed, G.gamma);
  Tensor<Jet> dric_up = flip_slot(covariant_derivative(G.ric, G.gamma), 0, G.g_inv);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        Jet v = dricm(j, i, l) - dricm(i, j, l);
        if (c.modified)
          for (int p = 0; p < n; ++p) v += G.rm(i, j, p, l) * G.grad_f(p);
        rm(i + 1, j + 1, 0, l + 1) = v;
      }

  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Jet v = dricm(k, i, l) - dric_up(l, i, k);
        if (c.modified)
          for (int p = 0; p < n; ++p) v += G.rm(i, p, k, l) * G.grad_f(p);
        rm(i + 1, 0, k + 1, l + 1) = v;
      }

  Tensor<Jet> time_block =
      detail::time_block_closed_form(G, c.modified, detail::TimeBlockForm::Laplacian);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) rm(i + 1, 0, 0, l + 1) = time_block(i, l);

  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k)
      for (int l = 0; l <= n; ++l) rm(0, j, k, l) = -rm(j, 0, k, l);

  return SpacetimeCurvature{std::move(rm), method};
}

// Largest value gap between the flow-derivative and Laplacian forms of the
// time-time curvature block.
inline double curvature_time_block_display_gap(const SpacetimeConnection& c) {
  Tensor<Jet> evolution =
      detail::time_block_closed_form(c.base, c.modified, detail::TimeBlockForm::Evolution);
  Tensor<Jet> laplacian =
      detail::time_block_closed_form(c.base, c.modified, detail::TimeBlockForm::Laplacian);
  return max_abs_value(evolution - laplacian);
}

struct SpacetimeRicciReport {
  Tensor<Jet> ric;         // trace of the direct curvature over 0..n
  Tensor<Jet> ric_closed;  // closed-form assembly, Laplacian form in the corner
  Jet scalar;              // degenerate trace of ric
  double closed_form_gap;
  double parabolic_gap;  // corner entry vs the flow-derivative scalar form
  double scalar_gap;     // |scalar - R|
  double symmetry_gap;
};

inline SpacetimeRicciReport spacetime_ricci(const SpacetimeConnection& c) {
  SpacetimeCurvature curv = spacetime_curvature(c, CurvatureMethod::Direct);
  Tensor<Jet> ric = ricci_from_curvature(curv.rm);
  Jet scalar = scalar_from_ricci(ric, c.g_inv_st);

  const SpatialGeometry& G = c.base;
  const int n = c.dim;
  const Jet zero = Jet::constant(*c.layout, 0.0);
  Tensor<Jet> ric_closed(Range::Spacetime, n, {Var::Down, Var::Down}, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ric_closed(i + 1, j + 1) = G.ric(i, j);

  Tensor<Jet> scalar_tensor(Range::Spatial, n, {}, G.R);
  Tensor<Jet> dR = covariant_derivative(scalar_tensor, G.gamma);
  for (int j = 0; j < n; ++j) {
    Jet v = 0.5 * dR(j);
    if (c.modified)
      for (int p = 0; p < n; ++p) v += G.ric(j, p) * G.grad_f(p);
    ric_closed(0, j + 1) = v;
    ric_closed(j + 1, 0) = v;
  }

  Jet lap_R = rough_laplacian(scalar_tensor, G.g_inv, G.gamma)();
  Jet ric_sq = zero;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ric_sq += G.ric_mixed(i, j) * G.ric_mixed(j, i);
  Jet corner = 0.5 * lap_R + ric_sq;
  if (c.modified) {
    for (int p = 0; p < n; ++p) corner += dR(p) * G.grad_f(p);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) corner += G.ric(p, q) * G.grad_f(p) * G.grad_f(q);
  }
  ric_closed(0, 0) = corner;

  double parabolic = 0.5 * G.R.derivative(0).value();
  if (c.modified) {
    for (int p = 0; p < n; ++p) parabolic += 0.5 * dR(p).value() * G.grad_f(p).value();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        parabolic += G.ric(p, q).value() * G.grad_f(p).value() * G.grad_f(q).value();
  }

  SpacetimeRicciReport out{std::move(ric), std::move(ric_closed), scalar, 0.0, 0.0, 0.0, 0.0};
  out.closed_form_gap = max_abs(values_of(out.ric) - values_of(out.ric_closed));
  out.parabolic_gap = std::abs(out.ric(0, 0).value() - parabolic);
  out.scalar_gap = std::abs(scalar.value() - G.R.value());
  out.symmetry_gap = max_symmetry_defect(values_of(out.ric), 0, 1);
  return out;
}

struct CompatibilityTorsionRecord {
  double metric_compatibility;  // max |grad of the degenerate inverse metric|
  double torsion;
};

inline CompatibilityTorsionRecord compatibility_and_torsion(const SpacetimeConnection& c) {
  double compat = max_abs_value(covariant_derivative(c.g_inv_st, c.gamma));
  double torsion = 0.0;
  const int e = c.dim + 1;
  for (int k = 0; k < e; ++k)
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j)
        torsion = std::max(torsion, std::abs((c.gamma(k, i, j) - c.gamma(k, j, i)).value()));
  return {compat, torsion};
}

struct DegenerateFlowResiduals {
  double metric_evolution;
  double connection_evolution;     // all index combinations
  double connection_mixed_time;    // exactly one lower connection index is time
  double connection_double_time;   // both lower connection indices are time
};

inline DegenerateFlowResiduals degenerate_flow_residual(const SpacetimeConnection& c) {
  detail::require_order(*c.layout, detail::kResidualMinOrder, "degenerate flow residual");
  const int n = c.dim;
  const int e = n + 1;
  SpacetimeCurvature curv = spacetime_curvature(c, CurvatureMethod::Direct);
  Tensor<Jet> flow_tensor = ricci_from_curvature(curv.rm);
  if (c.modified) {
    Tensor<Jet> fs(Range::Spacetime, n, {}, c.base.f);
    flow_tensor =
        flow_tensor - covariant_derivative(covariant_derivative(fs, c.gamma), c.gamma);
  }

  DegenerateFlowResiduals out{};
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      double rhs = 0.0;
      for (int k = 0; k < e; ++k)
        for (int l = 0; l < e; ++l)
          rhs += 2.0 * c.g_inv_st(i, k).value() * c.g_inv_st(j, l).value() *
                 flow_tensor(k, l).value();
      out.metric_evolution = std::max(
          out.metric_evolution, std::abs(c.g_inv_st(i, j).derivative(0).value() - rhs));
    }

  Tensor<Jet> dA = covariant_derivative(flow_tensor, c.gamma);
  for (int k = 0; k < e; ++k)
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j) {
        double rhs = 0.0;
        for (int l = 0; l < e; ++l)
          rhs += c.g_inv_st(k, l).value() *
                 (dA(i, j, l).value() + dA(j, i, l).value() - dA(l, i, j).value());
        double r = std::abs(c.gamma(k, i, j).derivative(0).value() + rhs);
        out.connection_evolution = std::max(out.connection_evolution, r);
        const int zeros = (i == 0 ? 1 : 0) + (j == 0 ? 1 : 0);
        if (zeros == 1) out.connection_mixed_time = std::max(out.connection_mixed_time, r);
        if (zeros == 2) out.connection_double_time = std::max(out.connection_double_time, r);
      }
  return out;
}

struct HarnackCurvatureComparison {
  double quadratic_form;  // curvature applied twice to the embedded pair
  double harnack_z;
  double difference;
};

// Embeds T = U + W with the mixed spatial block g^{jp} U_{ip}, time column
// W_i, zero time row, and applies the curvature as a quadratic form.
inline HarnackCurvatureComparison harnack_equals_curvature(
    const SpacetimeConnection& c, const HarnackData& d,
    CurvatureMethod method = CurvatureMethod::Direct) {
  if (c.modified)
    throw ConfigError("curvature and Harnack comparison requires the unmodified connection");
  if (d.U.dim() != c.dim || d.W.dim() != c.dim)
    throw ShapeError("Harnack data dimension does not match the connection");
  require_antisymmetric(d.U);
  const int n = c.dim;
  SpacetimeCurvature curv = spacetime_curvature(c, method);
  Tensor<double> rmv = values_of(curv.rm);
  Tensor<double> g_inv_v = values_of(c.base.g_inv);

  std::vector<std::vector<double>> T(static_cast<std::size_t>(n + 1),
                                     std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int p = 0; p < n; ++p) v += g_inv_v(j, p) * d.U(i, p);
      T[i + 1][j + 1] = v;
    }
    T[i + 1][0] = d.W(i);
  }

  double q = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int p = 1; p <= n; ++p)
      for (int l = 1; l <= n; ++l)
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n; ++k)
            q += g_inv_v(i - 1, p - 1) * rmv(p, j, k, l) * T[i][j] * T[l][k];

  double z = harnack_Z(c.base, d, false);
  return {q, z, q - z};
}

struct BianchiResiduals {
  double scalar_chain;    // largest pairwise gap among the four scalar expressions
  double scalar_half_dt;  // value of the leading expression
  double second_bianchi;  // cyclic covariant-derivative sum over all indices
  double ricci_derivative_spatial;    // middle-time curvature vs Ricci derivatives
  double ricci_derivative_time;       // same, second lower index time
  double ricci_derivative_row_time;   // same, first lower index time
  double ricci_derivative_corner;     // same, both lower indices time
  double ricci_derivative_null_rows;  // right-hand sides that must vanish outright
  double exchange_spatial;            // derivative exchange of the flow tensor
  double exchange_mixed;              // one derivative direction is time
  double exchange_time_component;     // exchanged component index is time
  double exchange_time_corner;        // time component and a time direction
  double potential_commutation;       // third-derivative commutator vs curvature
};

inline BianchiResiduals bianchi_identity_residuals(const SpacetimeConnection& c) {
  detail::require_order(*c.layout, detail::kResidualMinOrder, "curvature derivative identities");
  const int n = c.dim;
  const int e = n + 1;
  const SpatialGeometry& G = c.base;
  SpacetimeCurvature curv = spacetime_curvature(c, CurvatureMethod::Direct);
  const Tensor<Jet>& rm = curv.rm;
  Tensor<Jet> ric = ricci_from_curvature(rm);
  Tensor<Jet> ricm = flip_slot(ric, 1, c.g_inv_st);
  Tensor<Jet> dric = covariant_derivative(ric, c.gamma);
  Tensor<Jet> dricm = covariant_derivative(ricm, c.gamma);
  Tensor<Jet> raised_dric = flip_slot(dric, 0, c.g_inv_st);

  BianchiResiduals out{};

  Jet scalar_st = scalar_from_ricci(ric, c.g_inv_st);
  Tensor<Jet> scalar_tensor(Range::Spatial, n, {}, G.R);
  double q[4];
  q[0] = 0.5 * G.R.derivative(0).value();
  q[1] = 0.5 * scalar_st.derivative(0).value();
  q[2] = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      q[2] += G.g_inv(i, j).value() * dric(i + 1, j + 1, 0).value();
  double ric_sq = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ric_sq += G.ric_mixed(i, j).value() * G.ric_mixed(j, i).value();
  q[3] = 0.5 * rough_laplacian(scalar_tensor, G.g_inv, G.gamma)().value() + ric_sq;
  out.scalar_half_dt = q[0];
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      out.scalar_chain = std::max(out.scalar_chain, std::abs(q[a] - q[b]));

  Tensor<Jet> drm = covariant_derivative(rm, c.gamma);
  for (int m = 0; m < e; ++m)
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j)
        for (int k = 0; k < e; ++k)
          for (int l = 0; l < e; ++l) {
            double cyc = drm(m, i, j, k, l).value() + drm(i, j, m, k, l).value() +
                         drm(j, m, i, k, l).value();
            out.second_bianchi = std::max(out.second_bianchi, std::abs(cyc));
          }

  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j)
      for (int k = 1; k < e; ++k) {
        Jet rhs = dricm(j, i, k) - raised_dric(k, i, j);
        if (c.modified)
          for (int p = 1; p < e; ++p) rhs += rm(i, p, j, k) * G.grad_f(p - 1);
        double r = std::abs(rm(i, 0, j, k).value() - rhs.value());
        if (i > 0 && j > 0)
          out.ricci_derivative_spatial = std::max(out.ricci_derivative_spatial, r);
        else if (i > 0)
          out.ricci_derivative_time = std::max(out.ricci_derivative_time, r);
        else if (j > 0)
          out.ricci_derivative_row_time = std::max(out.ricci_derivative_row_time, r);
        else
          out.ricci_derivative_corner = std::max(out.ricci_derivative_corner, r);
        if (i == 0)
          out.ricci_derivative_null_rows =
              std::max(out.ricci_derivative_null_rows, std::abs(rhs.value()));
      }

  Tensor<Jet> fs(Range::Spacetime, n, {}, G.f);
  Tensor<Jet> omega = covariant_derivative(fs, c.gamma);
  Tensor<Jet> hess_st = covariant_derivative(omega, c.gamma);
  Tensor<Jet> flow_tensor = c.modified ? ric - hess_st : ric;
  Tensor<Jet> dA = covariant_derivative(flow_tensor, c.gamma);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j)
      for (int k = 0; k < e; ++k) {
        Jet curvature_term = Jet::constant(*c.layout, 0.0);
        for (int p = 0; p < e; ++p) curvature_term += c.g_st(p, i) * rm(k, j, 0, p);
        double r = std::abs((dA(j, k, i) - dA(k, j, i) - curvature_term).value());
        const int zeros = (j == 0 ? 1 : 0) + (k == 0 ? 1 : 0);
        if (i > 0 && zeros == 0)
          out.exchange_spatial = std::max(out.exchange_spatial, r);
        else if (i > 0)
          out.exchange_mixed = std::max(out.exchange_mixed, r);
        else if (zeros == 0)
          out.exchange_time_component = std::max(out.exchange_time_component, r);
        else
          out.exchange_time_corner = std::max(out.exchange_time_corner, r);
      }

  Tensor<Jet> third = covariant_derivative(hess_st, c.gamma);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j)
      for (int k = 0; k < e; ++k) {
        Jet rhs = Jet::constant(*c.layout, 0.0);
        for (int p = 0; p < e; ++p) rhs -= rm(i, j, k, p) * omega(p);
        out.potential_commutation = std::max(
            out.potential_commutation,
            std::abs((third(i, j, k) - third(j, i, k) - rhs).value()));
      }

  return out;
}

struct TFieldComparison {
  double u_gradient;  // spatial transport block vs the plain two-form derivative
  double w_gradient;  // time-column block vs the one-form derivative plus Ricci action
  double u_heat;      // evolution block vs the two-form heat operator
  double w_heat;      // evolution block vs the one-form heat operator with the gradient source
};

// Realizes U + W as a space-time two-form (time column W), transports it
// with the connection, and compares every block against the corresponding
// spatial expression.
inline TFieldComparison spacetime_T_derivatives(const SpacetimeConnection& c,
                                                const Tensor<Jet>& u_field,
                                                const Tensor<Jet>& w_field) {
  if (c.modified)
    throw ConfigError("two-form transport comparison requires the unmodified connection");
  const int n = c.dim;
  if (u_field.dim() != n || u_field.rank() != 2 || u_field.range() != Range::Spatial)
    throw ShapeError("two-form field must be a spatial rank-2 tensor of the same dimension");
  if (w_field.dim() != n || w_field.rank() != 1 || w_field.range() != Range::Spatial)
    throw ShapeError("one-form field must be a spatial rank-1 tensor of the same dimension");
  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(u_field(i, j).value()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs((u_field(i, j) + u_field(j, i)).value()) > 1e-9 * scale)
        throw ShapeError("two-form field must be antisymmetric");

  const SpatialGeometry& G = c.base;
  const Jet zero = Jet::constant(*c.layout, 0.0);
  Tensor<Jet> beta(Range::Spacetime, n, {Var::Down, Var::Down}, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) beta(i + 1, j + 1) = u_field(i, j);
    beta(i + 1, 0) = w_field(i);
    beta(0, i + 1) = -w_field(i);
  }

  Tensor<Jet> dbeta = covariant_derivative(beta, c.gamma);
  Tensor<Jet> du = covariant_derivative(u_field, G.gamma);
  Tensor<Jet> dw = covariant_derivative(w_field, G.gamma);

  TFieldComparison out{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        out.u_gradient =
            std::max(out.u_gradient,
                     std::abs((dbeta(i + 1, j + 1, k + 1) - du(i, j, k)).value()));
      Jet expected = dw(i, j);
      for (int p = 0; p < n; ++p) expected += G.ric_mixed(i, p) * u_field(j, p);
      out.w_gradient =
          std::max(out.w_gradient, std::abs((dbeta(i + 1, j + 1, 0) - expected).value()));
    }

  Tensor<Jet> lap_beta = rough_laplacian(beta, c.g_inv_st, c.gamma);
  Tensor<Jet> lap_u = rough_laplacian(u_field, G.g_inv, G.gamma);
  Tensor<Jet> lap_w = rough_laplacian(w_field, G.g_inv, G.gamma);
  Tensor<Jet> scalar_tensor(Range::Spatial, n, {}, G.R);
  Tensor<Jet> grad_R = flip_slot(covariant_derivative(scalar_tensor, G.gamma), 0, G.g_inv);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double lhs = dbeta(0, j + 1, k + 1).value() - lap_beta(j + 1, k + 1).value();
      double rhs = u_field(j, k).derivative(0).value() - lap_u(j, k).value();
      out.u_heat = std::max(out.u_heat, std::abs(lhs - rhs));
    }
    double lhs = dbeta(0, j + 1, 0).value() - lap_beta(j + 1, 0).value();
    double rhs = w_field(j).derivative(0).value() - lap_w(j).value();
    for (int p = 0; p < n; ++p) rhs -= 0.5 * grad_R(p).value() * u_field(j, p).value();
    out.w_heat = std::max(out.w_heat, std::abs(lhs - rhs));
  }
  return out;
}

}  // namespace hlab
