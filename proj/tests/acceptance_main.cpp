#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/approx.hpp"
#include "hlab/harnack.hpp"
#include "hlab/solutions.hpp"
#include "hlab/spacetime.hpp"

namespace hlab {
namespace {

constexpr int kOrder = 5;
constexpr std::uint64_t kSeed = 42;

struct Sub {
  std::string what;
  double value;
  double bound;
  bool ok;
};

struct Criterion {
  int id;
  std::string label;
  std::vector<Sub> subs;
  std::vector<std::string> notes;

  void check(const std::string& what, double value, double bound) {
    subs.push_back({what, value, bound, value <= bound});
  }
  void note(const std::string& line) { notes.push_back(line); }
  bool pass() const {
    return std::all_of(subs.begin(), subs.end(), [](const Sub& s) { return s.ok; });
  }
};

double uni(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

std::vector<double> box_point(std::mt19937_64& g, int n) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (double& v : x) v = 0.8 * uni(g, -1.0, 1.0);
  return x;
}

double sample_time(std::mt19937_64& g, const FlowSolution& s, double tau = 0.0) {
  double hi = std::min(s.sample_t1(), s.t_max() - tau - 1e-6 * (s.t_max() - s.t_min()));
  return uni(g, s.sample_t0(), hi);
}

Tensor<double> random_two_form(std::mt19937_64& g, int n) {
  Tensor<double> u(Range::Spatial, n, {Var::Down, Var::Down}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = uni(g, -1.0, 1.0);
      u(i, j) = v;
      u(j, i) = -v;
    }
  return u;
}

Tensor<double> random_one_form(std::mt19937_64& g, int n) {
  Tensor<double> w(Range::Spatial, n, {Var::Down}, 0.0);
  for (int i = 0; i < n; ++i) w(i) = uni(g, -1.0, 1.0);
  return w;
}

LieAlgebraElement element_from(const Tensor<double>& u, const Tensor<double>& w) {
  const int n = u.dim();
  LieAlgebraElement e = zero_element(n);
  for (int i = 0; i < n; ++i) {
    e.one_form(i) = w(i);
    for (int j = 0; j < n; ++j) e.two_form(i, j) = u(i, j);
  }
  return e;
}

double element_gap(const LieAlgebraElement& a, const LieAlgebraElement& b) {
  double worst = 0.0;
  const int n = a.two_form.dim();
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(a.one_form(i) - b.one_form(i)));
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(a.two_form(i, j) - b.two_form(i, j)));
  }
  return worst;
}

std::vector<std::vector<double>> orthogonalize(std::span<const double> raw, int n2) {
  std::vector<std::vector<double>> o(static_cast<std::size_t>(n2),
                                     std::vector<double>(static_cast<std::size_t>(n2), 0.0));
  for (int a = 0; a < n2; ++a) {
    for (int b = 0; b < n2; ++b) o[a][b] = raw[static_cast<std::size_t>(a) * n2 + b];
    for (int prev = 0; prev < a; ++prev) {
      double dot = 0.0;
      for (int b = 0; b < n2; ++b) dot += o[a][b] * o[prev][b];
      for (int b = 0; b < n2; ++b) o[a][b] -= dot * o[prev][b];
    }
    double norm = 0.0;
    for (int b = 0; b < n2; ++b) norm += o[a][b] * o[a][b];
    norm = std::sqrt(norm);
    if (norm < 1e-9) {
      for (int b = 0; b < n2; ++b) o[a][b] = a == b ? 1.0 : 0.0;
    } else {
      for (int b = 0; b < n2; ++b) o[a][b] /= norm;
    }
  }
  return o;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return std::string(buf);
}

FlowSolution sphere2() { return make_solution("shrinking_sphere"); }

FlowSolution sphere3() {
  SolutionParams p;
  p.dim = 3;
  return make_solution("shrinking_sphere", p);
}

FlowSolution flat_plain() { return make_solution("flat"); }

FlowSolution flat_affine() {
  SolutionParams p;
  p.affine = {0.3, -0.7};
  return make_solution("flat", p);
}

Criterion criterion_1() {
  Criterion c{1, "flow residuals on the exact solution family"};
  std::mt19937_64 g(kSeed + 100);
  std::vector<FlowSolution> family;
  family.push_back(sphere2());
  family.push_back(sphere3());
  family.push_back(make_solution("cigar_flow"));
  family.push_back(make_solution("cigar_static"));
  for (const FlowSolution& s : family) {
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      SpatialGeometry G = geometry_at(s, t, x, kOrder);
      double scale = std::max(1.0, max_abs_value(time_derivative(G.g)));
      worst = std::max(worst, max_abs_value(flow_residual(G)) / scale);
    }
    const char* anchor = s.mode() == FlowMode::PlainFlow ? "(1.1)" : "(3.1)";
    c.check(std::string(anchor) + " evolution, " + s.name() + " n=" + std::to_string(s.dim()),
            worst, 1e-9);
  }
  return c;
}

Criterion criterion_2() {
  Criterion c{2, "direct vs closed-form space-time curvature, every component"};
  std::mt19937_64 g(kSeed + 200);
  auto run = [&](const FlowSolution& s, const std::string& tag) {
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      SpacetimeConnection conn = build_spacetime_connection(s, t, x, 0.0, kOrder);
      Tensor<double> direct = values_of(spacetime_curvature(conn, CurvatureMethod::Direct).rm);
      Tensor<double> closed = values_of(spacetime_curvature(conn, CurvatureMethod::ClosedForm).rm);
      double scale = std::max(1.0, max_abs(direct));
      double gap = 0.0;
      const int e = s.dim() + 1;
      for (int i = 0; i < e; ++i)
        for (int j = 0; j < e; ++j)
          for (int p = 0; p < e; ++p)
            for (int l = 0; l < e; ++l)
              gap = std::max(gap, std::abs(direct(i, j, p, l) - closed(i, j, p, l)));
      worst = std::max(worst, gap / scale);
    }
    c.check(tag, worst, 1e-9);
  };
  run(sphere2(), "(B1)-(B5) shrinking_sphere n=2");
  run(sphere3(), "(B1)-(B5) shrinking_sphere n=3");
  run(make_solution("cigar_flow"), "(B1)-(B5) cigar_flow");
  run(flat_plain(), "(B1)-(B5) flat");
  run(make_solution("cigar_static"), "(E1)-(E4) cigar_static");
  run(flat_affine(), "(E1)-(E4) flat with affine potential");
  return c;
}

Criterion criterion_3() {
  Criterion c{3, "curvature quadratic form reproduces the Harnack matrix value"};
  std::mt19937_64 g(kSeed + 300);
  FlowSolution s = sphere2();
  for (double tau : {0.0, 0.05}) {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      double t = sample_time(g, s, tau);
      std::vector<double> x = box_point(g, s.dim());
      HarnackData d{random_two_form(g, s.dim()), random_one_form(g, s.dim()),
                    std::vector<double>(static_cast<std::size_t>(s.dim()), 0.0), t};
      SpacetimeConnection conn = build_spacetime_connection(s, t, x, tau, kOrder);
      HarnackCurvatureComparison cmp = harnack_equals_curvature(conn, d);
      worst = std::max(worst, cmp.difference / std::max(1.0, std::abs(cmp.harnack_z)));
    }
    c.check(fmt("(2.2) pairing vs Z, 50 draws, tau = %.2f", tau), worst, 1e-9);
  }
  return c;
}

Criterion criterion_4() {
  Criterion c{4, "degenerate-flow residuals including the time index rows"};
  std::mt19937_64 g(kSeed + 400);
  auto run = [&](const FlowSolution& s, const std::string& metric_anchor,
                 const std::string& conn_anchor) {
    double metric = 0.0, conn = 0.0, mixed = 0.0, corner = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      SpacetimeConnection sc = build_spacetime_connection(s, t, x, 0.0, kOrder);
      DegenerateFlowResiduals r = degenerate_flow_residual(sc);
      metric = std::max(metric, r.metric_evolution);
      conn = std::max(conn, r.connection_evolution);
      mixed = std::max(mixed, r.connection_mixed_time);
      corner = std::max(corner, r.connection_double_time);
    }
    c.check(metric_anchor + " metric evolution, " + s.name(), metric, 1e-9);
    c.check(conn_anchor + " connection evolution, " + s.name(), conn, 1e-9);
    c.check(conn_anchor + " j=0 row, " + s.name(), mixed, 1e-9);
    c.check(conn_anchor + " i=j=0 entry, " + s.name(), corner, 1e-9);
  };
  run(sphere2(), "(2.1)", "(2.1)");
  run(sphere3(), "(2.1)", "(2.1)");
  run(make_solution("cigar_flow"), "(2.1)", "(2.1)");
  run(flat_plain(), "(2.1)", "(2.1)");
  run(make_solution("cigar_static"), "(3.2)", "(3.3)");
  run(flat_affine(), "(3.2)", "(3.3)");
  return c;
}

Criterion criterion_5() {
  Criterion c{5, "traced closed forms, scalar identity, and the sphere chain value"};
  std::mt19937_64 g(kSeed + 500);
  auto run = [&](const FlowSolution& s, const std::string& tag) {
    double closed = 0.0, scalar = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      SpacetimeConnection sc = build_spacetime_connection(s, t, x, 0.0, kOrder);
      SpacetimeRicciReport rr = spacetime_ricci(sc);
      double scale = std::max(1.0, max_abs(values_of(rr.ric)));
      closed = std::max(closed, rr.closed_form_gap / scale);
      scalar = std::max(scalar, rr.scalar_gap);
    }
    c.check(tag + " traced closed forms, " + s.name(), closed, 1e-9);
    c.check("scalar value matches the base scalar, " + s.name(), scalar, 1e-10);
  };
  run(sphere2(), "(C1)-(C3)");
  run(sphere3(), "(C1)-(C3)");
  run(make_solution("cigar_flow"), "(C1)-(C3)");
  run(flat_plain(), "(C1)-(C3)");
  run(make_solution("cigar_static"), "(F1)-(F3)");
  run(flat_affine(), "(F1)-(F3)");

  std::array<double, 2> x0{0.3, -0.2};
  SpacetimeConnection sc = build_spacetime_connection(sphere2(), 0.0, x0, 0.0, kOrder);
  BianchiResiduals b = bianchi_identity_residuals(sc);
  c.check("scalar chain agreement at n=2, c0=1, t=0", b.scalar_chain, 1e-9);
  c.check("scalar chain value equals 2 at n=2, c0=1, t=0", std::abs(b.scalar_half_dt - 2.0),
          1e-9);
  return c;
}

Criterion criterion_6() {
  Criterion c{6, "curvature derivative identities and the second Bianchi sum"};
  std::mt19937_64 g(kSeed + 600);
  FlowSolution s = make_solution("cigar_static");
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0, nulls = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
  for (int k = 0; k < 8; ++k) {
    double t = sample_time(g, s);
    std::vector<double> x = box_point(g, s.dim());
    BianchiResiduals b = bianchi_identity_residuals(build_spacetime_connection(s, t, x, 0.0, kOrder));
    d1 = std::max(d1, b.ricci_derivative_spatial);
    d2 = std::max(d2, b.ricci_derivative_time);
    d3 = std::max(d3, b.ricci_derivative_row_time);
    d4 = std::max(d4, b.ricci_derivative_corner);
    nulls = std::max(nulls, b.ricci_derivative_null_rows);
    e1 = std::max(e1, b.exchange_spatial);
    e2 = std::max(e2, b.exchange_mixed);
    e3 = std::max(e3, b.exchange_time_component);
    e4 = std::max(e4, b.exchange_time_corner);
  }
  c.check("Lemma 3.3 (1) cigar_static", d1, 1e-8);
  c.check("Lemma 3.3 (2) cigar_static", d2, 1e-8);
  c.check("Lemma 3.3 (3) cigar_static", d3, 1e-8);
  c.check("Lemma 3.3 (4) cigar_static", d4, 1e-8);
  c.check("Lemma 3.3 vanishing rows cigar_static", nulls, 1e-8);
  c.check("Corollary 3.5 (1) cigar_static", e1, 1e-8);
  c.check("Corollary 3.5 (2) cigar_static", e2, 1e-8);
  c.check("Corollary 3.5 (3) cigar_static", e3, 1e-8);
  c.check("Corollary 3.5 (4) cigar_static", e4, 1e-8);

  FlowSolution sp = sphere2();
  double second = 0.0;
  for (int k = 0; k < 8; ++k) {
    double t = sample_time(g, sp);
    std::vector<double> x = box_point(g, sp.dim());
    BianchiResiduals b =
        bianchi_identity_residuals(build_spacetime_connection(sp, t, x, 0.0, kOrder));
    second = std::max(second, b.second_bianchi);
  }
  c.check("second Bianchi sum, shrinking_sphere", second, 1e-8);
  return c;
}

Criterion criterion_7() {
  Criterion c{7, "Harnack inequalities and the steady equality"};
  std::mt19937_64 g(kSeed + 700);

  for (const char* name : {"shrinking_sphere", "cigar_flow"}) {
    FlowSolution s = make_solution(name);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double t = uni(g, 0.05, 0.4);
      std::vector<double> x = box_point(g, s.dim());
      std::vector<double> v(static_cast<std::size_t>(s.dim()), 0.0);
      for (double& entry : v) entry = uni(g, -1.0, 1.0);
      SpatialGeometry G = geometry_at(s, t, x, kOrder);
      worst = std::max(worst, std::max(0.0, -trace_harnack(G, v, true, t)));
    }
    c.check(std::string("(1.3) trace nonnegative, 1000 draws, ") + name, worst, 1e-9);
  }

  {
    FlowSolution s = sphere2();
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double t = uni(g, 0.05, 0.4);
      std::vector<double> x = box_point(g, s.dim());
      HarnackData d{random_two_form(g, s.dim()), random_one_form(g, s.dim()),
                    std::vector<double>(2, 0.0), t};
      SpatialGeometry G = geometry_at(s, t, x, kOrder);
      worst = std::max(worst, std::max(0.0, -harnack_Z(G, d, true)));
    }
    c.check("(1.2) matrix form nonnegative, 1000 draws, shrinking_sphere", worst, 1e-9);
  }

  FlowSolution cigar = make_solution("cigar_flow");
  std::array<double, 2> spot{1.0, 0.0};
  SpatialGeometry G = geometry_at(cigar, 0.0, spot, kOrder);
  const int n = cigar.dim();
  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) grad[i] = G.grad_f(i).value();
  double dt_r = G.R.derivative(0).value();
  double grad_term = 0.0, ric_term = 0.0;
  for (int i = 0; i < n; ++i) {
    grad_term += 2.0 * G.R.derivative(i + 1).value() * grad[i];
    for (int j = 0; j < n; ++j) ric_term += 2.0 * G.ric(i, j).value() * grad[i] * grad[j];
  }
  c.note(fmt("steady spot terms at (1,0), t=0: dtR = %.6f, 2<gradR,V> = %.6f, 2Ric(V,V) = %.6f",
             dt_r, grad_term, ric_term));
  c.check("steady spot term dtR equals 4", std::abs(dt_r - 4.0), 1e-9);
  c.check("steady spot term 2<gradR,V> equals -8", std::abs(grad_term + 8.0), 1e-9);
  c.check("steady spot term 2Ric(V,V) equals 4", std::abs(ric_term - 4.0), 1e-9);
  c.check("(1.3) steady equality at the spot, no time term",
          std::abs(trace_harnack(G, grad, false, 0.0)), 1e-9);

  double steady = 0.0;
  for (int k = 0; k < 100; ++k) {
    double t = sample_time(g, cigar);
    std::vector<double> x = box_point(g, n);
    SpatialGeometry Gk = geometry_at(cigar, t, x, kOrder);
    std::vector<double> vk(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) vk[i] = Gk.grad_f(i).value();
    steady = std::max(steady, std::abs(trace_harnack(Gk, vk, false, 0.0)));
  }
  c.check("(1.3) steady equality, 100 random points, cigar_flow", steady, 1e-9);
  return c;
}

Criterion criterion_8() {
  Criterion c{8, "soliton structure identities and the contraction system"};
  std::mt19937_64 g(kSeed + 800);
  c.note("the evolution statement (2.17) presumes an evolving metric, so it is certified on "
         "cigar_flow; the static gauge keeps every other relation");
  for (const char* name : {"cigar_flow", "cigar_static"}) {
    FlowSolution s = make_solution(name);
    bool evolving = s.mode() != FlowMode::SteadySoliton;
    double structure = 0.0, trace = 0.0, divergence = 0.0, closedness = 0.0, evolution = 0.0,
           weitzenboeck = 0.0;
    double parallel = 0.0, w_grad = 0.0, w_evolution = 0.0, substitution = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      SpatialGeometry G = geometry_at(s, t, x, kOrder);
      SolitonResiduals sr = soliton_residuals(G);
      structure = std::max(structure, sr.structure);
      trace = std::max(trace, sr.trace);
      divergence = std::max(divergence, sr.divergence);
      closedness = std::max(closedness, sr.closedness);
      evolution = std::max(evolution, sr.time_evolution);
      weitzenboeck = std::max(weitzenboeck, sr.weitzenboeck);
      SolitonUWResiduals uw = soliton_uw_checks(G, volume_two_form(G));
      parallel = std::max(parallel, uw.parallel_u);
      w_grad = std::max(w_grad, uw.w_gradient);
      w_evolution = std::max(w_evolution, uw.w_time_evolution);
      substitution = std::max(substitution, uw.hamilton_substitution);
    }
    std::string tag = std::string(", ") + name;
    c.check("(2.15) structure" + tag, structure, 1e-8);
    c.check("(2.15) trace" + tag, trace, 1e-8);
    c.check("(2.15) closedness" + tag, closedness, 1e-8);
    c.check("(2.16) divergence" + tag, divergence, 1e-8);
    if (evolving) c.check("(2.17) evolution" + tag, evolution, 1e-8);
    c.check("(2.18) Weitzenboeck" + tag, weitzenboeck, 1e-8);
    c.check("(2.13) parallel volume form" + tag, parallel, 1e-8);
    c.check("(2.14) contraction gradient" + tag, w_grad, 1e-8);
    if (!evolving) c.check("(2.12) contraction evolution" + tag, w_evolution, 1e-8);
    c.check("(2.22) substitution identity" + tag, substitution, 1e-12);
  }
  return c;
}

Criterion criterion_9() {
  Criterion c{9, "approximation family: closed forms and limit sweeps"};
  std::mt19937_64 g(kSeed + 900);
  FlowSolution s = sphere2();

  std::array<double, 6> conn_items{};
  std::array<double, 3> curv_items{};
  for (auto [eps, delta] : {std::pair{10.0, 1.0}, std::pair{4.0, 0.5}}) {
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, s.dim());
      ApproxConnectionRecord conn = approx_connection_check(s, eps, delta, t, x, kOrder);
      ApproxCurvatureRecord curv = approx_curvature_check(s, eps, delta, t, x, kOrder);
      for (int i = 0; i < 6; ++i) conn_items[i] = std::max(conn_items[i], conn.item[i]);
      for (int i = 0; i < 3; ++i) curv_items[i] = std::max(curv_items[i], curv.item[i]);
    }
  }
  for (int i = 0; i < 6; ++i)
    c.check("Lemma 4.3 (" + std::to_string(i + 1) + ") with the squared time factor",
            conn_items[i], 1e-9);
  for (int i = 0; i < 3; ++i)
    c.check("Lemma 4.4 (" + std::to_string(i + 1) + ") with the squared time factor",
            curv_items[i], 1e-9);

  const double t0 = 0.25;
  std::array<double, 2> x0{0.3, -0.2};
  Tensor<double> u(Range::Spatial, 2, {Var::Down, Var::Down}, 0.0);
  u(0, 1) = 0.7;
  u(1, 0) = -0.7;
  Tensor<double> w(Range::Spatial, 2, {Var::Down}, 0.0);
  w(0) = 0.4;
  w(1) = -0.1;
  HarnackData d{u, w, {0.0, 0.0}, t0};

  std::vector<std::pair<double, double>> equal_sched;
  for (int k = 1; k <= 10; ++k)
    equal_sched.push_back({std::pow(2.0, k), std::pow(2.0, k)});
  SweepResult lit = limit_sweep(s, t0, x0, d, equal_sched, kOrder);
  double dev = 0.0;
  std::string ratio_line = "literal equal-scale conn ratios (last 5):";
  for (std::size_t i = lit.conn_ratios.size() - 5; i < lit.conn_ratios.size(); ++i) {
    dev = std::max(dev, std::abs(lit.conn_ratios[i] - 0.5));
    ratio_line += fmt(" %.3f", lit.conn_ratios[i]);
  }
  c.note(ratio_line);
  c.check("sweep (i) literal: eps = delta = 2^k conn error halves per doubling", dev, 0.1);

  std::vector<std::pair<double, double>> split_sched;
  for (int k = 1; k <= 10; ++k)
    split_sched.push_back({std::pow(4.0, k), std::pow(2.0, k)});
  SweepResult split = limit_sweep(s, t0, x0, d, split_sched, kOrder);
  double dev_w = 0.0;
  std::string split_line = "witness separated-scale (4^k, 2^k) conn ratios (last 5):";
  for (std::size_t i = split.conn_ratios.size() - 5; i < split.conn_ratios.size(); ++i) {
    dev_w = std::max(dev_w, std::abs(split.conn_ratios[i] - 0.5));
    split_line += fmt(" %.3f", split.conn_ratios[i]);
  }
  c.note(split_line);
  c.check("sweep (i) witness: separated scales halve cleanly", dev_w, 0.1);

  std::vector<std::pair<double, double>> deep_sched;
  for (int k = 8; k <= 24; ++k)
    deep_sched.push_back({std::pow(2.0, k), std::pow(2.0, -10)});
  SweepResult deep = limit_sweep(s, t0, x0, d, deep_sched, kOrder);
  double fitted = 0.0;
  for (std::size_t i = 0; i < deep.entries.size() / 2; ++i) {
    const SweepEntry& en = deep.entries[i];
    fitted = std::max(fitted, en.eps * std::abs(en.gamma000 + 1.0 / (2.0 * (t0 + en.delta))));
  }
  double excess = 0.0;
  for (const SweepEntry& en : deep.entries) {
    double drift = en.eps * std::abs(en.gamma000 + 1.0 / (2.0 * (t0 + en.delta)));
    excess = std::max(excess, drift / fitted);
  }
  c.note(fmt("fitted drift constant C = %.3f over eps = 2^8..2^24 at delta = 2^-10", fitted));
  c.check("time-time-time drift bounded by C/eps across the sweep", excess, 1.1);

  std::vector<std::pair<double, double>> pin{{std::pow(2.0, 20), std::pow(2.0, -10)}};
  double literal_gap = 0.0, shifted_gap = 0.0;
  for (int k = 0; k < 4; ++k) {
    std::vector<double> x = box_point(g, s.dim());
    HarnackData dk{random_two_form(g, s.dim()), random_one_form(g, s.dim()), {0.0, 0.0}, t0};
    SweepResult one = limit_sweep(s, t0, x, dk, pin, kOrder);
    literal_gap = std::max(literal_gap, one.entries.front().target_gap);
    shifted_gap = std::max(shifted_gap, one.entries.front().target_gap_shifted);
  }
  c.note(fmt("literal comparison gap %.3e vs shifted-time witness %.3e at eps = 2^20, "
             "delta = 2^-10",
             literal_gap, shifted_gap));
  c.check("sweep (ii) literal: quadratic form matches Z + Ric(W,W)/(2t) to 1e-6", literal_gap,
          1e-6);
  c.check("sweep (ii) witness: same comparison with the 1/(2(t+delta)) factor", shifted_gap,
          1e-4);
  return c;
}

Criterion criterion_10() {
  Criterion c{10, "algebra layer: Jacobi, path agreement, sharp operator"};
  std::mt19937_64 g(kSeed + 1000);
  for (const FlowSolution& s : {sphere2(), sphere3()}) {
    const int n = s.dim();
    double jacobi = 0.0, inner_paths = 0.0, bracket_paths = 0.0, sharp_sym = 0.0,
           sharp_rot = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = sample_time(g, s);
      std::vector<double> x = box_point(g, n);
      SpatialGeometry G = geometry_at(s, t, x, kOrder);
      Tensor<double> gm = values_of(G.g);
      Tensor<double> gm_inv = values_of(G.g_inv);

      LieAlgebraElement ea = element_from(random_two_form(g, n), random_one_form(g, n));
      LieAlgebraElement eb = element_from(random_two_form(g, n), random_one_form(g, n));
      LieAlgebraElement ec = element_from(random_two_form(g, n), random_one_form(g, n));
      auto bracket = [&](const LieAlgebraElement& lhs, const LieAlgebraElement& rhs,
                         AlgebraMode mode) { return bracket_and_inner(lhs, rhs, gm, gm_inv, mode); };
      LieAlgebraElement j1 =
          bracket(ea, bracket(eb, ec, AlgebraMode::Direct).first, AlgebraMode::Direct).first;
      LieAlgebraElement j2 =
          bracket(eb, bracket(ec, ea, AlgebraMode::Direct).first, AlgebraMode::Direct).first;
      LieAlgebraElement j3 =
          bracket(ec, bracket(ea, eb, AlgebraMode::Direct).first, AlgebraMode::Direct).first;
      for (int i = 0; i < n; ++i) {
        jacobi = std::max(jacobi, std::abs(j1.one_form(i) + j2.one_form(i) + j3.one_form(i)));
        for (int j = 0; j < n; ++j)
          jacobi = std::max(jacobi, std::abs(j1.two_form(i, j) + j2.two_form(i, j) +
                                             j3.two_form(i, j)));
      }

      auto [direct_bracket, direct_inner] = bracket(ea, eb, AlgebraMode::Direct);
      auto [st_bracket, st_inner] = bracket(ea, eb, AlgebraMode::Spacetime);
      auto [mx_bracket, mx_inner] = bracket(ea, eb, AlgebraMode::Mixed);
      inner_paths = std::max(inner_paths, std::abs(st_inner - direct_inner));
      inner_paths = std::max(inner_paths, std::abs(mx_inner - direct_inner));
      bracket_paths = std::max(bracket_paths, element_gap(st_bracket, direct_bracket));
      bracket_paths = std::max(bracket_paths, element_gap(mx_bracket, direct_bracket));

      SharpBasis basis(gm, gm_inv, AlgebraMode::Direct);
      const int basis_dim = basis.dim();
      const int n2 = basis.two_form_count();
      std::vector<double> q(static_cast<std::size_t>(basis_dim) * basis_dim, 0.0);
      for (int a = 0; a < basis_dim; ++a)
        for (int b = a; b < basis_dim; ++b) {
          double v = uni(g, -1.0, 1.0);
          q[static_cast<std::size_t>(a) * basis_dim + b] = v;
          q[static_cast<std::size_t>(b) * basis_dim + a] = v;
        }
      std::vector<double> sharp = sharp_square(basis, q);
      for (int a = 0; a < basis_dim; ++a)
        for (int b = 0; b < basis_dim; ++b)
          sharp_sym = std::max(sharp_sym,
                               std::abs(sharp[static_cast<std::size_t>(a) * basis_dim + b] -
                                        sharp[static_cast<std::size_t>(b) * basis_dim + a]));

      std::vector<double> raw(static_cast<std::size_t>(n2) * n2, 0.0);
      for (double& v : raw) v = uni(g, -1.0, 1.0);
      std::vector<std::vector<double>> o = orthogonalize(raw, n2);
      auto big = [&](int a, int b) {
        if (a < n2 && b < n2) return o[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        return a == b ? 1.0 : 0.0;
      };
      std::vector<double> q_rot(static_cast<std::size_t>(basis_dim) * basis_dim, 0.0);
      for (int a = 0; a < basis_dim; ++a)
        for (int b = 0; b < basis_dim; ++b) {
          double acc = 0.0;
          for (int p = 0; p < basis_dim; ++p)
            for (int e = 0; e < basis_dim; ++e)
              acc += big(a, p) * big(b, e) * q[static_cast<std::size_t>(p) * basis_dim + e];
          q_rot[static_cast<std::size_t>(a) * basis_dim + b] = acc;
        }
      SharpBasis rotated = basis;
      rotated.rotate_two_form_block(o, AlgebraMode::Direct);
      std::vector<double> sharp_rot_v = sharp_square(rotated, q_rot);
      for (int a = 0; a < basis_dim; ++a)
        for (int b = 0; b < basis_dim; ++b) {
          double expected = 0.0;
          for (int p = 0; p < basis_dim; ++p)
            for (int e = 0; e < basis_dim; ++e)
              expected += big(a, p) * big(b, e) * sharp[static_cast<std::size_t>(p) * basis_dim + e];
          sharp_rot = std::max(sharp_rot,
                               std::abs(sharp_rot_v[static_cast<std::size_t>(a) * basis_dim + b] -
                                        expected));
        }
    }
    std::string tag = " n=" + std::to_string(n);
    c.check("(1.5) Jacobi identity" + tag, jacobi, 1e-12);
    c.check("(1.6)/(2.3)/(2.5) inner products agree" + tag, inner_paths, 1e-12);
    c.check("(1.5)/(2.4)/(2.6) brackets agree" + tag, bracket_paths, 1e-12);
    c.check("sharp operator output symmetric" + tag, sharp_sym, 1e-12);
    c.check("sharp operator basis-rotation invariant" + tag, sharp_rot, 1e-12);
  }
  return c;
}

}  // namespace
}  // namespace hlab

int main() {
  using hlab::Criterion;
  std::vector<Criterion> cs;
  try {
    cs.push_back(hlab::criterion_1());
    cs.push_back(hlab::criterion_2());
    cs.push_back(hlab::criterion_3());
    cs.push_back(hlab::criterion_4());
    cs.push_back(hlab::criterion_5());
    cs.push_back(hlab::criterion_6());
    cs.push_back(hlab::criterion_7());
    cs.push_back(hlab::criterion_8());
    cs.push_back(hlab::criterion_9());
    cs.push_back(hlab::criterion_10());
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }

  std::printf("acceptance run: 10 criteria, jet order %d, seed %llu\n\n", hlab::kOrder,
              static_cast<unsigned long long>(hlab::kSeed));
  int passed = 0;
  for (const Criterion& c : cs) {
    bool ok = c.pass();
    passed += ok ? 1 : 0;
    double margin = 0.0;
    for (const hlab::Sub& s : c.subs) margin = std::max(margin, s.value / s.bound);
    std::printf("criterion %2d %s  %s  [%zu checks, worst value/bound %.2e]\n", c.id,
                ok ? "PASS" : "FAIL", c.label.c_str(), c.subs.size(), margin);
    for (const hlab::Sub& s : c.subs)
      if (!s.ok) std::printf("    FAIL %s: %.6e (bound %.1e)\n", s.what.c_str(), s.value, s.bound);
    for (const std::string& line : c.notes) std::printf("    %s\n", line.c_str());
  }
  std::printf("\n%d of 10 criteria pass\n", passed);
  if (passed < 10)
    std::printf("red entries keep the literal sweep readings on purpose; the adjacent witness "
                "checks certify the convergent form of each statement\n");
  return passed == 10 ? 0 : 1;
}
