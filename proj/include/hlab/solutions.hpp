#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/jet.hpp"
#include "hlab/tensor.hpp"

namespace hlab {

// How the time dependence of a catalog solution is governed: the unmodified
// flow d/dt g = -2 Ric, the flow modified by the Hessian of a potential,
// or a static steady-soliton gauge of the modified flow.
enum class FlowMode { PlainFlow, ModifiedFlow, SteadySoliton };

inline bool uses_potential_in_flow(FlowMode m) { return m != FlowMode::PlainFlow; }

struct SolutionParams {
  int dim = 2;
  double c0 = 1.0;
  std::vector<double> affine;
};

// A named exact solution: closed-form metric evaluator producing jets, an
// optional potential, flow mode, and domain bounds.
class FlowSolution {
 public:
  using MetricFn = std::function<Tensor<Jet>(double, std::span<const double>, const JetLayout&)>;
  using ScalarFn = std::function<Jet(double, std::span<const double>, const JetLayout&)>;

  FlowSolution(std::string name, int dim, FlowMode mode, MetricFn metric, ScalarFn potential,
               double r_max, double t_min, double t_max, double sample_t0, double sample_t1)
      : name_(std::move(name)),
        dim_(dim),
        mode_(mode),
        metric_(std::move(metric)),
        potential_(std::move(potential)),
        r_max_(r_max),
        t_min_(t_min),
        t_max_(t_max),
        sample_t0_(sample_t0),
        sample_t1_(sample_t1) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  FlowMode mode() const { return mode_; }
  bool has_potential() const { return static_cast<bool>(potential_); }
  double r_max() const { return r_max_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double sample_t0() const { return sample_t0_; }
  double sample_t1() const { return sample_t1_; }

  void require_in_domain(double t, std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw ShapeError("evaluation point has wrong spatial dimension");
    if (!(t >= t_min_) || !(t < t_max_))
      throw DomainError(name_ + ": time " + std::to_string(t) + " outside [" +
                        std::to_string(t_min_) + ", " + std::to_string(t_max_) + ")");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    if (r2 > r_max_ * r_max_)
      throw DomainError(name_ + ": point outside the chart radius " + std::to_string(r_max_));
  }

  Tensor<Jet> metric(double t, std::span<const double> x, const JetLayout& layout) const {
    require_in_domain(t, x);
    return metric_(t, x, layout);
  }

  Jet potential(double t, std::span<const double> x, const JetLayout& layout) const {
    if (!potential_) throw ConfigError(name_ + " has no potential");
    require_in_domain(t, x);
    return potential_(t, x, layout);
  }

 private:
  std::string name_;
  int dim_;
  FlowMode mode_;
  MetricFn metric_;
  ScalarFn potential_;
  double r_max_, t_min_, t_max_, sample_t0_, sample_t1_;
};

namespace detail {

inline std::vector<Jet> chart_jets(int dim, double t, std::span<const double> x,
                                   const JetLayout& layout, Jet* t_out) {
  if (layout.num_vars() != dim + 1)
    throw ShapeError("jet layout variable count does not match the solution dimension");
  *t_out = Jet::variable(layout, 0, t);
  std::vector<Jet> xs;
  xs.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) xs.push_back(Jet::variable(layout, i + 1, x[i]));
  return xs;
}

inline Jet radius_sq(const std::vector<Jet>& xs, const JetLayout& layout) {
  Jet r2 = Jet::constant(layout, 0.0);
  for (const Jet& v : xs) r2 += v * v;
  return r2;
}

}  // namespace detail

inline FlowSolution make_solution(const std::string& name, const SolutionParams& params = {}) {
  const int n = params.dim;
  if (n < 2 || n > 3) throw ConfigError("solution dimension must be 2 or 3");

  if (name == "flat") {
    std::vector<double> a = params.affine;
    if (!a.empty() && static_cast<int>(a.size()) != n)
      throw ConfigError("affine coefficient count must match the dimension");
    bool affine = false;
    for (double v : a) affine = affine || v != 0.0;
    auto metric = [n](double, std::span<const double>, const JetLayout& layout) {
      Tensor<Jet> g(Range::Spatial, n, {Var::Down, Var::Down}, Jet::constant(layout, 0.0));
      for (int i = 0; i < n; ++i) g(i, i) = Jet::constant(layout, 1.0);
      return g;
    };
    auto potential = [n, a](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(n, t, x, layout, &tj);
      Jet f = Jet::constant(layout, 0.0);
      for (std::size_t i = 0; i < a.size(); ++i) f += a[i] * xs[i];
      return f;
    };
    return FlowSolution("flat", n, affine ? FlowMode::ModifiedFlow : FlowMode::PlainFlow, metric,
                        potential, 10.0, 0.0, 1.0, 0.05, 0.5);
  }

  if (name == "shrinking_sphere") {
    if (!(params.c0 > 0.0)) throw ConfigError("shrinking_sphere requires c0 > 0");
    const double c0 = params.c0;
    const double t_max = c0 / (2.0 * (n - 1));
    auto metric = [n, c0](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(n, t, x, layout, &tj);
      Jet c = Jet::constant(layout, c0) - (2.0 * (n - 1)) * tj;
      Jet r2 = detail::radius_sq(xs, layout);
      Jet conf = 4.0 * c * recip((1.0 + r2) * (1.0 + r2));
      Tensor<Jet> g(Range::Spatial, n, {Var::Down, Var::Down}, Jet::constant(layout, 0.0));
      for (int i = 0; i < n; ++i) g(i, i) = conf;
      return g;
    };
    return FlowSolution("shrinking_sphere", n, FlowMode::PlainFlow, metric, nullptr, 10.0, 0.0,
                        t_max, 0.1 * t_max, 0.8 * t_max);
  }

  if (name == "cigar_flow") {
    if (params.dim != 2) throw ConfigError("cigar_flow is two-dimensional");
    auto metric = [](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(2, t, x, layout, &tj);
      Jet denom = exp(4.0 * tj) + detail::radius_sq(xs, layout);
      Jet conf = recip(denom);
      Tensor<Jet> g(Range::Spatial, 2, {Var::Down, Var::Down}, Jet::constant(layout, 0.0));
      g(0, 0) = g(1, 1) = conf;
      return g;
    };
    auto potential = [](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(2, t, x, layout, &tj);
      return log(exp(4.0 * tj) + detail::radius_sq(xs, layout));
    };
    return FlowSolution("cigar_flow", 2, FlowMode::PlainFlow, metric, potential, 10.0, 0.0, 1.0,
                        0.05, 0.3);
  }

  if (name == "cigar_static") {
    if (params.dim != 2) throw ConfigError("cigar_static is two-dimensional");
    auto metric = [](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(2, t, x, layout, &tj);
      Jet conf = recip(1.0 + detail::radius_sq(xs, layout));
      Tensor<Jet> g(Range::Spatial, 2, {Var::Down, Var::Down}, Jet::constant(layout, 0.0));
      g(0, 0) = g(1, 1) = conf;
      return g;
    };
    auto potential = [](double t, std::span<const double> x, const JetLayout& layout) {
      Jet tj;
      std::vector<Jet> xs = detail::chart_jets(2, t, x, layout, &tj);
      return log(1.0 + detail::radius_sq(xs, layout));
    };
    return FlowSolution("cigar_static", 2, FlowMode::SteadySoliton, metric, potential, 10.0, 0.0,
                        1.0, 0.05, 0.5);
  }

  throw ConfigError("unknown solution name: " + name);
}

// Everything the identity checks need about a solution at one point: the
// metric and its derived spatial objects as jets, plus the potential's
// first and second covariant derivatives when one is present.
struct SpatialGeometry {
  const JetLayout* layout;
  int dim;
  FlowMode mode;
  bool has_potential;
  Tensor<Jet> g, g_inv, gamma;
  Tensor<Jet> rm;        // at(i,j,k,l): last slot Up
  Tensor<Jet> rm_low;    // all slots Down
  Tensor<Jet> ric;       // Down, Down
  Tensor<Jet> ric_mixed; // at(i,k) = R_i^k
  Jet R;
  Jet f;
  Tensor<Jet> df;      // Down
  Tensor<Jet> grad_f;  // Up
  Tensor<Jet> hess_f;  // Down, Down
};

inline SpatialGeometry geometry_at(const FlowSolution& s, double t, std::span<const double> x,
                                   int order) {
  const JetLayout& layout = JetLayout::get(s.dim() + 1, order);
  Tensor<Jet> g = s.metric(t, x, layout);
  Tensor<Jet> g_inv = invert_symmetric(g);
  Tensor<Jet> gamma = christoffel(g, g_inv);
  Tensor<Jet> rm = curvature_from_connection(gamma);
  Tensor<Jet> rm_low = lower_curvature(rm, g);
  Tensor<Jet> ric = ricci_from_curvature(rm);
  Tensor<Jet> ric_mixed = flip_slot(ric, 1, g_inv);
  Jet R = scalar_from_ricci(ric, g_inv);
  Jet f = Jet::constant(layout, 0.0);
  if (s.has_potential()) f = s.potential(t, x, layout);
  Tensor<Jet> fs(Range::Spatial, s.dim(), {}, f);
  Tensor<Jet> df = covariant_derivative(fs, gamma);
  Tensor<Jet> grad_f = flip_slot(df, 0, g_inv);
  Tensor<Jet> hess_f = covariant_derivative(df, gamma);
  return SpatialGeometry{&layout,  s.dim(), s.mode(), s.has_potential(),
                         std::move(g),      std::move(g_inv), std::move(gamma),
                         std::move(rm),     std::move(rm_low), std::move(ric),
                         std::move(ric_mixed), R, f,
                         std::move(df),     std::move(grad_f), std::move(hess_f)};
}

// d/dt g_{ij} + 2 R_{ij}, minus 2 grad_i grad_j f when the mode uses the
// potential; identically small for every catalog member.
inline Tensor<Jet> flow_residual(const SpatialGeometry& G) {
  Tensor<Jet> res = time_derivative(G.g) + 2.0 * G.ric;
  if (uses_potential_in_flow(G.mode)) res = res - 2.0 * G.hess_f;
  return res;
}

// Residuals of the gradient-soliton identities for V = df, reported
// separately so callers can assert exactly the subset a solution satisfies.
struct SolitonResiduals {
  double structure;       // R_{ij} - grad_i V_j
  double trace;           // R - div V
  double divergence;      // (1/2) grad_j R + R_{jk} V^k
  double closedness;      // grad_i V_j - grad_j V_i
  double time_evolution;  // d/dt V_j - (Lap V_j - R_j^l V_l)
  double weitzenboeck;    // (Lap V_j - R_j^l V_l) - Lap_d V_j
};

inline SolitonResiduals soliton_residuals(const SpatialGeometry& G) {
  const int n = G.dim;
  SolitonResiduals out{};
  Tensor<Jet> diff = G.ric - G.hess_f;
  out.structure = max_abs_value(diff);

  Jet div_v = zero_like(G.R);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) div_v += G.g_inv(i, j) * G.hess_f(i, j);
  out.trace = std::abs((G.R - div_v).value());

  Tensor<Jet> scalar(Range::Spatial, n, {}, G.R);
  Tensor<Jet> dR = covariant_derivative(scalar, G.gamma);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    Jet term = 0.5 * dR(j);
    for (int k = 0; k < n; ++k) term += G.ric(j, k) * G.grad_f(k);
    worst = std::max(worst, std::abs(term.value()));
  }
  out.divergence = worst;

  worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs((G.hess_f(i, j) - G.hess_f(j, i)).value()));
  out.closedness = worst;

  Tensor<Jet> dt_v = time_derivative(G.df);
  Tensor<Jet> lap_v = rough_laplacian(G.df, G.g_inv, G.gamma);
  Tensor<Jet> hodge_v = hodge_laplacian_one_form(G.df, G.g_inv, G.gamma);
  double worst_t = 0.0, worst_w = 0.0;
  for (int j = 0; j < n; ++j) {
    Jet ric_v = zero_like(G.R);
    for (int l = 0; l < n; ++l) ric_v += G.ric_mixed(j, l) * G.df(l);
    Jet parabolic = lap_v(j) - ric_v;
    worst_t = std::max(worst_t, std::abs((dt_v(j) - parabolic).value()));
    worst_w = std::max(worst_w, std::abs((parabolic - hodge_v(j)).value()));
  }
  out.time_evolution = worst_t;
  out.weitzenboeck = worst_w;
  return out;
}

}  // namespace hlab
