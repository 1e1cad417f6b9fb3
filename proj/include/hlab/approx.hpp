#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/harnack.hpp"
#include "hlab/jet.hpp"
#include "hlab/solutions.hpp"
#include "hlab/spacetime.hpp"
#include "hlab/tensor.hpp"

namespace hlab {

// Two-parameter nondegenerate space-time metric sample: spatial block g(x,t),
// zero mixed block, and time-time entry B = R + eps/(2(t+delta)).  The sample
// is positive-definite exactly where B > 0.
struct ApproxMetric {
  const JetLayout* layout;
  int dim;
  double t;
  std::vector<double> x;
  double eps;
  double delta;
  SpatialGeometry base;
  Jet B;
  Tensor<Jet> g_st;      // (n+1) x (n+1), Down Down
  Tensor<Jet> g_inv_st;  // blockwise inverse, Up Up
};

namespace detail {

constexpr int kApproxConnectionMinOrder = 3;
constexpr int kApproxCurvatureMinOrder = 4;

inline void require_family_params(double eps, double delta) {
  if (!(eps > 0.0)) throw ConfigError("metric family parameter eps must be positive");
  if (!(delta > 0.0)) throw ConfigError("metric family parameter delta must be positive");
}

inline void require_plain_flow(const FlowSolution& s) {
  if (uses_potential_in_flow(s.mode()))
    throw ConfigError(s.name() + ": the nondegenerate metric family needs a plain-flow solution");
}

}  // namespace detail

inline ApproxMetric approx_metric(const FlowSolution& s, double eps, double delta, double t,
                                  std::span<const double> x, int order = 5) {
  detail::require_family_params(eps, delta);
  detail::require_plain_flow(s);
  SpatialGeometry base = geometry_at(s, t, x, order);
  detail::require_order(*base.layout, detail::kApproxConnectionMinOrder,
                        "nondegenerate space-time metric");
  const JetLayout* layout = base.layout;
  const int n = base.dim;
  Jet tj;
  (void)detail::chart_jets(n, t, x, *layout, &tj);
  Jet B = base.R + eps * recip(2.0 * (tj + delta));
  if (!(B.value() > 0.0))
    throw DefinitenessError("time-time entry R + eps/(2(t+delta)) is not positive at the sample");

  const Jet zero = Jet::constant(*layout, 0.0);
  Tensor<Jet> g_st(Range::Spacetime, n, {Var::Down, Var::Down}, zero);
  Tensor<Jet> g_inv_st(Range::Spacetime, n, {Var::Up, Var::Up}, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g_st(i + 1, j + 1) = base.g(i, j);
      g_inv_st(i + 1, j + 1) = base.g_inv(i, j);
    }
  g_st(0, 0) = B;
  g_inv_st(0, 0) = recip(B);

  return ApproxMetric{layout,
                      n,
                      t,
                      std::vector<double>(x.begin(), x.end()),
                      eps,
                      delta,
                      std::move(base),
                      std::move(B),
                      std::move(g_st),
                      std::move(g_inv_st)};
}

// Residuals of the six closed-form connection components of the family:
//   1) spatial block equals the spatial Christoffel symbols,
//   2) Gamma^0_{ij} = R_ij / B,
//   3) Gamma^k_{i0} = -R_i^k,
//   4) Gamma^k_{00} = -grad^k R / 2,
//   5) Gamma^0_{i0} = d_i R / (2B),
//   6) Gamma^0_{00} = d_t R / (2B) - eps / (4 (t+delta)^2 B).
struct ApproxConnectionRecord {
  std::array<double, 6> item;
  double max_residual;
  double metric_compatibility;
  double torsion;
};

// Residuals of the three closed-form curvature blocks, plus the magnitude of
// the purely-spatial block's 1/B correction term for rate tests.
struct ApproxCurvatureRecord {
  std::array<double, 3> item;
  double max_residual;
  double correction_max;
};

namespace detail {

struct ApproxClosedForms {
  Tensor<double> gamma;   // spatial Christoffel values
  Tensor<double> ric;     // Down Down
  Tensor<double> ric_up;  // at(i,k) = R_i^k
  Tensor<double> dric;    // at(p,i,j) = grad_p R_ij
  std::vector<double> dR;       // coordinate spatial derivatives of R
  std::vector<double> grad_R;   // raised
  Tensor<double> hess_R;        // grad grad R, Down Down
  double R = 0.0;
  double dtR = 0.0;
  double Bv = 0.0;
};

inline ApproxClosedForms closed_form_inputs(const ApproxMetric& m) {
  const SpatialGeometry& G = m.base;
  const int n = m.dim;
  ApproxClosedForms c{values_of(G.gamma),
                      values_of(G.ric),
                      values_of(G.ric_mixed),
                      Tensor<double>(Range::Spatial, n, {Var::Down, Var::Down, Var::Down}, 0.0),
                      std::vector<double>(static_cast<std::size_t>(n), 0.0),
                      std::vector<double>(static_cast<std::size_t>(n), 0.0),
                      Tensor<double>(Range::Spatial, n, {Var::Down, Var::Down}, 0.0)};
  Tensor<Jet> r_scalar(Range::Spatial, n, {}, G.R);
  Tensor<Jet> dR = covariant_derivative(r_scalar, G.gamma);
  c.dric = values_of(covariant_derivative(G.ric, G.gamma));
  c.hess_R = values_of(covariant_derivative(dR, G.gamma));
  Tensor<double> g_inv = values_of(G.g_inv);
  for (int i = 0; i < n; ++i) {
    c.dR[i] = dR(i).value();
    for (int p = 0; p < n; ++p) c.grad_R[i] += g_inv(i, p) * dR(p).value();
  }
  c.R = G.R.value();
  c.dtR = G.R.derivative(0).value();
  c.Bv = m.B.value();
  return c;
}

inline ApproxConnectionRecord connection_residuals(const ApproxMetric& m,
                                                   const Tensor<Jet>& gamma_eps) {
  const int n = m.dim;
  ApproxClosedForms c = closed_form_inputs(m);
  const double td = m.t + m.delta;
  ApproxConnectionRecord rec{};
  auto bump = [&](int which, double computed, double closed) {
    double r = std::abs(computed - closed);
    rec.item[static_cast<std::size_t>(which)] =
        std::max(rec.item[static_cast<std::size_t>(which)], r);
  };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) bump(0, gamma_eps(k + 1, i + 1, j + 1).value(), c.gamma(k, i, j));
      bump(2, gamma_eps(k + 1, i + 1, 0).value(), -c.ric_up(i, k));
      bump(2, gamma_eps(k + 1, 0, i + 1).value(), -c.ric_up(i, k));
    }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) bump(1, gamma_eps(0, i + 1, j + 1).value(), c.ric(i, j) / c.Bv);
    bump(4, gamma_eps(0, i + 1, 0).value(), c.dR[static_cast<std::size_t>(i)] / (2.0 * c.Bv));
    bump(4, gamma_eps(0, 0, i + 1).value(), c.dR[static_cast<std::size_t>(i)] / (2.0 * c.Bv));
  }
  for (int k = 0; k < n; ++k)
    bump(3, gamma_eps(k + 1, 0, 0).value(), -0.5 * c.grad_R[static_cast<std::size_t>(k)]);
  bump(5, gamma_eps(0, 0, 0).value(),
       c.dtR / (2.0 * c.Bv) - m.eps / (4.0 * td * td * c.Bv));

  rec.max_residual = 0.0;
  for (double v : rec.item) rec.max_residual = std::max(rec.max_residual, v);
  rec.metric_compatibility = max_abs_value(covariant_derivative(m.g_st, gamma_eps));
  rec.torsion = 0.0;
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        rec.torsion = std::max(
            rec.torsion, std::abs((gamma_eps(k, i, j) - gamma_eps(k, j, i)).value()));
  return rec;
}

inline ApproxCurvatureRecord curvature_residuals(const ApproxMetric& m,
                                                 const Tensor<Jet>& rm_eps) {
  const int n = m.dim;
  ApproxClosedForms c = closed_form_inputs(m);
  Tensor<double> rm = values_of(m.base.rm);
  const double td = m.t + m.delta;
  ApproxCurvatureRecord rec{};
  auto bump = [&](int which, double computed, double closed) {
    double r = std::abs(computed - closed);
    rec.item[static_cast<std::size_t>(which)] =
        std::max(rec.item[static_cast<std::size_t>(which)], r);
  };
  Tensor<double> g_inv = values_of(m.base.g_inv);
  Tensor<double> ricm_dt(Range::Spatial, n, {Var::Down, Var::Up}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) ricm_dt(i, l) = m.base.ric_mixed(i, l).derivative(0).value();

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double corr = (c.ric_up(i, l) * c.ric(j, k) - c.ric_up(j, l) * c.ric(i, k)) / c.Bv;
          rec.correction_max = std::max(rec.correction_max, std::abs(corr));
          bump(0, rm_eps(i + 1, j + 1, k + 1, l + 1).value(), rm(i, j, k, l) - corr);
        }

  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double grad_k_ric = 0.0;
        double grad_up_ric = 0.0;
        for (int p = 0; p < n; ++p) {
          grad_k_ric += g_inv(l, p) * c.dric(k, j, p);
          grad_up_ric += g_inv(l, p) * c.dric(p, j, k);
        }
        double closed = -grad_k_ric + grad_up_ric -
                        0.5 *
                            (c.ric(j, k) * c.grad_R[static_cast<std::size_t>(l)] -
                             c.ric_up(j, l) * c.dR[static_cast<std::size_t>(k)]) /
                            c.Bv;
        bump(1, rm_eps(0, j + 1, k + 1, l + 1).value(), closed);
      }

  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double hess_up = 0.0;
      double ric_sq = 0.0;
      for (int p = 0; p < n; ++p) {
        hess_up += g_inv(l, p) * c.hess_R(i, p);
        ric_sq += c.ric_up(i, p) * c.ric_up(p, l);
      }
      double closed = ricm_dt(i, l) - 0.5 * hess_up - ric_sq -
                      ((0.5 * c.dtR - m.eps / (4.0 * td * td)) * c.ric_up(i, l) -
                       0.25 * c.dR[static_cast<std::size_t>(i)] *
                           c.grad_R[static_cast<std::size_t>(l)]) /
                          c.Bv;
      bump(2, rm_eps(i + 1, 0, 0, l + 1).value(), closed);
    }

  rec.max_residual = 0.0;
  for (double v : rec.item) rec.max_residual = std::max(rec.max_residual, v);
  return rec;
}

inline double quadratic_form_values(const ApproxMetric& m, const Tensor<double>& rm_low,
                                    const HarnackData& d) {
  const int n = m.dim;
  const double Bv = m.B.value();
  Tensor<double> g_inv = values_of(m.base.g_inv);
  std::vector<std::vector<double>> low(static_cast<std::size_t>(n + 1),
                                       std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) low[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] = d.U(i, j);
    low[static_cast<std::size_t>(i + 1)][0] = 0.5 * Bv * d.W(i);
    low[0][static_cast<std::size_t>(i + 1)] = -0.5 * Bv * d.W(i);
  }
  std::vector<std::vector<double>> ginv(static_cast<std::size_t>(n + 1),
                                        std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  ginv[0][0] = 1.0 / Bv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ginv[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] = g_inv(i, j);
  std::vector<std::vector<double>> up(static_cast<std::size_t>(n + 1),
                                      std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      double s = 0.0;
      for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q)
          s += ginv[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] *
               ginv[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] *
               low[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
      up[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
    }
  double q = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l)
          q += rm_low(i, j, k, l) * up[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               up[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
  return q;
}

inline void require_harnack_shape(const ApproxMetric& m, const HarnackData& d) {
  if (d.U.dim() != m.dim || d.W.dim() != m.dim)
    throw ShapeError("Harnack data dimension does not match the metric sample");
  require_antisymmetric(d.U);
}

}  // namespace detail

inline ApproxConnectionRecord approx_connection_check(const FlowSolution& s, double eps,
                                                      double delta, double t,
                                                      std::span<const double> x, int order = 5) {
  ApproxMetric m = approx_metric(s, eps, delta, t, x, order);
  Tensor<Jet> gamma_eps = christoffel(m.g_st, m.g_inv_st);
  return detail::connection_residuals(m, gamma_eps);
}

inline ApproxCurvatureRecord approx_curvature_check(const FlowSolution& s, double eps, double delta,
                                                    double t, std::span<const double> x,
                                                    int order = 5) {
  ApproxMetric m = approx_metric(s, eps, delta, t, x, order);
  detail::require_order(*m.layout, detail::kApproxCurvatureMinOrder,
                        "nondegenerate space-time curvature");
  Tensor<Jet> rm_eps = curvature_from_connection(christoffel(m.g_st, m.g_inv_st));
  return detail::curvature_residuals(m, rm_eps);
}

// Curvature of the metric sample applied as a quadratic form to U + W with the
// lowered embedding alpha_{i0} = (B/2) W_i; converges to the Harnack quantity
// plus R_ij W^i W^j / (2(t+delta)) as eps grows.
inline double approx_quadratic_form(const ApproxMetric& m, const HarnackData& d) {
  detail::require_harnack_shape(m, d);
  detail::require_order(*m.layout, detail::kApproxCurvatureMinOrder,
                        "nondegenerate space-time curvature");
  Tensor<Jet> rm_eps = curvature_from_connection(christoffel(m.g_st, m.g_inv_st));
  Tensor<double> rm_low = values_of(lower_curvature(rm_eps, m.g_st));
  return detail::quadratic_form_values(m, rm_low, d);
}

struct SweepEntry {
  double eps;
  double delta;
  double conn_err;            // max gap to the degenerate connection, all components
  double curv_form_err;       // worst closed-form residual at this pair
  double gamma000;            // time-time-time connection value
  double target_gap;          // |Q - (Z + R_ij W^i W^j / (2t))|
  double target_gap_shifted;  // |Q - (Z + R_ij W^i W^j / (2(t+delta)))|
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::vector<double> conn_ratios;   // successive conn_err ratios
  std::vector<double> gap_ratios;    // successive shifted-gap ratios
  double footnote_constant;          // max eps * |gamma000 + 1/(2(t+delta))|
};

inline SweepResult limit_sweep(const FlowSolution& s, double t, std::span<const double> x,
                               const HarnackData& d,
                               std::span<const std::pair<double, double>> schedule,
                               int order = 5) {
  if (!(t > 0.0)) throw ConfigError("limit sweep needs a positive time");
  if (schedule.empty()) throw ConfigError("limit sweep needs a nonempty schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    const auto& prev = schedule[k - 1];
    const auto& cur = schedule[k];
    bool eps_up = cur.first > prev.first;
    bool delta_down = cur.first == prev.first && cur.second < prev.second;
    if (!eps_up && !delta_down)
      throw ConfigError("sweep schedule must be strictly monotone in the swept parameter");
  }
  detail::require_plain_flow(s);

  SpacetimeConnection deg = build_spacetime_connection(s, t, x, 0.0, order);
  Tensor<double> deg_gamma = values_of(deg.gamma);
  const double z = harnack_Z(deg.base, d, false);
  Tensor<double> ric = values_of(deg.base.ric);
  Tensor<double> g_inv = values_of(deg.base.g_inv);
  const int n = deg.dim;
  std::vector<double> w_up(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w_up[static_cast<std::size_t>(i)] += g_inv(i, j) * d.W(j);
  double ric_ww = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ric_ww += ric(i, j) * w_up[static_cast<std::size_t>(i)] * w_up[static_cast<std::size_t>(j)];

  SweepResult out;
  out.footnote_constant = 0.0;
  out.entries.reserve(schedule.size());
  for (const auto& [eps, delta] : schedule) {
    ApproxMetric m = approx_metric(s, eps, delta, t, x, order);
    Tensor<Jet> gamma_eps = christoffel(m.g_st, m.g_inv_st);
    Tensor<Jet> rm_eps = curvature_from_connection(gamma_eps);

    SweepEntry e{};
    e.eps = eps;
    e.delta = delta;
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          e.conn_err =
              std::max(e.conn_err, std::abs(gamma_eps(k, i, j).value() - deg_gamma(k, i, j)));
    ApproxConnectionRecord conn = detail::connection_residuals(m, gamma_eps);
    ApproxCurvatureRecord curv = detail::curvature_residuals(m, rm_eps);
    e.curv_form_err = std::max(conn.max_residual, curv.max_residual);
    e.gamma000 = gamma_eps(0, 0, 0).value();

    Tensor<double> rm_low = values_of(lower_curvature(rm_eps, m.g_st));
    double q = detail::quadratic_form_values(m, rm_low, d);
    e.target_gap = std::abs(q - (z + ric_ww / (2.0 * t)));
    e.target_gap_shifted = std::abs(q - (z + ric_ww / (2.0 * (t + delta))));

    out.footnote_constant =
        std::max(out.footnote_constant, eps * std::abs(e.gamma000 + 1.0 / (2.0 * (t + delta))));
    out.entries.push_back(e);
  }
  for (std::size_t k = 1; k < out.entries.size(); ++k) {
    double prev_conn = out.entries[k - 1].conn_err;
    double prev_gap = out.entries[k - 1].target_gap_shifted;
    out.conn_ratios.push_back(prev_conn > 0.0 ? out.entries[k].conn_err / prev_conn : 0.0);
    out.gap_ratios.push_back(prev_gap > 0.0 ? out.entries[k].target_gap_shifted / prev_gap : 0.0);
  }
  return out;
}

// Splits a space-time 2-form into its spatial 2-form and the 1-form carried by
// the mixed block, normalized by the root of the time-time entry so that the
// split is an isometry onto the summand pair.
struct TwoFormSplit {
  Tensor<double> two_form;  // Spatial, Down Down
  Tensor<double> one_form;  // Spatial, Down
};

inline TwoFormSplit lambda2_decomposition(const ApproxMetric& m, const Tensor<double>& alpha) {
  const int n = m.dim;
  if (alpha.range() != Range::Spacetime || alpha.rank() != 2 || alpha.dim() != n)
    throw ShapeError("decomposition needs a space-time 2-form over the sample dimension");
  require_antisymmetric(alpha);
  const double root_b = std::sqrt(m.B.value());
  TwoFormSplit split{Tensor<double>(Range::Spatial, n, {Var::Down, Var::Down}, 0.0),
                     Tensor<double>(Range::Spatial, n, {Var::Down}, 0.0)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) split.two_form(i, j) = alpha(i + 1, j + 1);
    split.one_form(i) = alpha(i + 1, 0) / root_b;
  }
  return split;
}

// The bracket and inner product the nondegenerate metric induces on a pair of
// summand elements through the plain coordinate embedding, next to their
// semi-direct and degenerate limits; the gaps decay like 1/B.
struct InducedAlgebraRecord {
  LieAlgebraElement bracket_induced;
  LieAlgebraElement bracket_limit;
  double inner_induced;
  double inner_limit;
  double bracket_gap;
  double inner_gap;
};

inline InducedAlgebraRecord induced_algebra_limit(const ApproxMetric& m,
                                                  const LieAlgebraElement& a,
                                                  const LieAlgebraElement& b) {
  const int n = m.dim;
  if (a.two_form.dim() != n || b.two_form.dim() != n)
    throw ShapeError("algebra element dimension does not match the metric sample");
  Tensor<double> g = values_of(m.base.g);
  Tensor<double> g_inv = values_of(m.base.g_inv);
  LieAlgebraElement la = to_lowered(a, g);
  LieAlgebraElement lb = to_lowered(b, g);
  auto alpha = detail::spacetime_two_form(la);
  auto beta = detail::spacetime_two_form(lb);
  const double Bv = m.B.value();

  std::vector<std::vector<double>> ginv(static_cast<std::size_t>(n + 1),
                                        std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  ginv[0][0] = 1.0 / Bv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ginv[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] = g_inv(i, j);

  std::vector<std::vector<double>> res(static_cast<std::size_t>(n + 1),
                                       std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l)
          res[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
              ginv[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] *
              (alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                   beta[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] -
               beta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                   alpha[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)]);

  InducedAlgebraRecord rec{zero_element(n), zero_element(n), 0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    rec.bracket_induced.one_form(i) = res[static_cast<std::size_t>(i + 1)][0];
    for (int j = 0; j < n; ++j)
      rec.bracket_induced.two_form(i, j) =
          res[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)];
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l)
          rec.inner_induced += ginv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                               ginv[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] *
                               alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                               beta[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];

  auto [br, inner] = bracket_and_inner(la, lb, g, g_inv, AlgebraMode::Direct);
  rec.bracket_limit = std::move(br);
  rec.inner_limit = inner;
  for (int i = 0; i < n; ++i) {
    rec.bracket_gap = std::max(
        rec.bracket_gap,
        std::abs(rec.bracket_induced.one_form(i) - rec.bracket_limit.one_form(i)));
    for (int j = 0; j < n; ++j)
      rec.bracket_gap = std::max(
          rec.bracket_gap,
          std::abs(rec.bracket_induced.two_form(i, j) - rec.bracket_limit.two_form(i, j)));
  }
  rec.inner_gap = std::abs(rec.inner_induced - rec.inner_limit);
  return rec;
}

}  // namespace hlab
