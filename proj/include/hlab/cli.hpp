#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "hlab/approx.hpp"
#include "hlab/errors.hpp"
#include "hlab/harnack.hpp"
#include "hlab/solutions.hpp"
#include "hlab/spacetime.hpp"

namespace hlab {

// Batch verification runner: executes named check suites over seeded sample
// points of a catalog solution and reports every residual with the catalog
// label of the identity it certifies.

struct RunConfig {
  std::string solution = "shrinking_sphere";
  SolutionParams params;
  double tau = 0.0;
  int order = 5;
  int samples = 32;
  std::uint64_t seed = 42;
  std::vector<std::string> suites;
  std::map<std::string, double> tolerances;
  std::vector<std::pair<double, double>> schedule;
  std::vector<std::pair<double, double>> curvature_schedule;
  double approx_epsilon = 10.0;
  double approx_delta = 1.0;
  std::string out_dir;
  std::string format = "text";
  bool stable_output = false;
};

struct CheckResult {
  std::string id;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<double> point;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool pass = false;
};

struct VerificationReport {
  RunConfig config;
  std::vector<SuiteResult> suites;
  bool pass = false;
  double elapsed_ms = 0.0;
  std::vector<SweepEntry> sweep_rows;
};

// Which solutions a check applies to. PlainFlow gates on the flow not using
// the potential; Potential gates on the solution carrying one; EvolvingGauge
// excludes the static soliton gauge, whose time derivatives vanish;
// SolitonGaugeDim2 selects two-dimensional gauges generated by the potential.
enum class CheckGate {
  Always,
  PlainFlow,
  Potential,
  PlainPotential,
  PotentialDim2,
  EvolvingGauge,
  SolitonGaugeDim2
};

struct CheckSpec {
  const char* id;
  const char* anchor;
  const char* anchor_modified;
  CheckGate gate;
  double tolerance;
};

struct SuiteSpec {
  const char* name;
  int min_order;
  bool plain_only;
  bool needs_potential;
  std::vector<CheckSpec> checks;
};

inline const std::vector<SuiteSpec>& suite_catalog() {
  static const std::vector<SuiteSpec> catalog = {
      {"flow",
       3,
       false,
       false,
       {{"evolution", "(1.1)", "(3.1)", CheckGate::Always, 1e-9}}},
      {"soliton",
       4,
       false,
       true,
       {{"structure", "(2.15)", nullptr, CheckGate::Always, 1e-8},
        {"trace", "(2.15)", nullptr, CheckGate::Always, 1e-8},
        {"closedness", "(2.15)", nullptr, CheckGate::Always, 1e-8},
        {"divergence", "(2.16)", nullptr, CheckGate::Always, 1e-8},
        {"time-evolution", "(2.17)", nullptr, CheckGate::EvolvingGauge, 1e-8},
        {"weitzenboeck", "(2.18)", nullptr, CheckGate::Always, 1e-8},
        {"parallel-two-form", "(2.13)", nullptr, CheckGate::PotentialDim2, 1e-8},
        {"contraction-gradient", "(2.14)", nullptr, CheckGate::PotentialDim2, 1e-8},
        {"contraction-evolution", "(2.12)", nullptr, CheckGate::SolitonGaugeDim2, 1e-8},
        {"hamilton-substitution", "(2.22)", nullptr, CheckGate::PotentialDim2, 1e-12}}},
      {"harnack-defs",
       4,
       false,
       false,
       {{"p-antisymmetry", "(1.2)", nullptr, CheckGate::Always, 1e-12},
        {"m-symmetry", "(1.2)", nullptr, CheckGate::Always, 1e-12},
        {"z-assembly", "(1.2)", nullptr, CheckGate::Always, 1e-12},
        {"trace-assembly", "(1.3)", nullptr, CheckGate::Always, 1e-12},
        {"jacobi", "(1.5)", nullptr, CheckGate::Always, 1e-12},
        {"degenerate-inner", "(1.6)", nullptr, CheckGate::Always, 1e-12},
        {"spacetime-inner", "(2.3)", nullptr, CheckGate::Always, 1e-12},
        {"spacetime-bracket", "(2.4)", nullptr, CheckGate::Always, 1e-12},
        {"mixed-inner", "(2.5)", nullptr, CheckGate::Always, 1e-12},
        {"mixed-bracket", "(2.6)", nullptr, CheckGate::Always, 1e-12},
        {"sharp-symmetry", "below (1.4)", nullptr, CheckGate::Always, 1e-12},
        {"sharp-rotation", "below (1.4)", nullptr, CheckGate::Always, 1e-12}}},
      {"harnack-ineq",
       4,
       false,
       false,
       {{"matrix-inequality", "(1.2)", nullptr, CheckGate::Always, 1e-9},
        {"trace-inequality", "(1.3)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"ricci-quadratic", "§2 Ricci quadratic", nullptr, CheckGate::PlainFlow, 1e-9},
        {"steady-equality", "(1.3)", nullptr, CheckGate::PlainPotential, 1e-9}}},
      {"spacetime-conn",
       4,
       false,
       false,
       {{"degenerate-metric", "§2 degenerate metric", nullptr, CheckGate::Always, 1e-12},
        {"spatial-block", "(A1)", "(D1)", CheckGate::Always, 1e-12},
        {"time-row", "(A2)", "(D2)", CheckGate::Always, 1e-12},
        {"ricci-block", "(A3)", "(D3)", CheckGate::Always, 1e-12},
        {"gradient-row", "(A4)", "(D4)", CheckGate::Always, 1e-12},
        {"metric-compatibility", "Theorem 2.1", "Theorem 3.7", CheckGate::Always, 1e-10},
        {"torsion-free", "Theorem 2.1", "Theorem 3.7", CheckGate::Always, 1e-12},
        {"parallel-two-form", "(2.13)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"parallel-one-form", "(2.14)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"parallel-combined", "(2.9)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"heat-two-form", "(2.11)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"heat-one-form", "(2.12)", nullptr, CheckGate::PlainFlow, 1e-9},
        {"heat-combined", "(2.8)", nullptr, CheckGate::PlainFlow, 1e-9}}},
      {"spacetime-curv",
       4,
       false,
       false,
       {{"spatial-block", "(B1)", "(E1)", CheckGate::Always, 1e-9},
        {"upper-time-row", "(B2)", "(E2)", CheckGate::Always, 1e-9},
        {"time-direction-block", "(B3)", "(E3)", CheckGate::Always, 1e-9},
        {"mixed-time-block", "(B4)", "(E3')", CheckGate::Always, 1e-9},
        {"double-time-block", "(B5)", "(E4)", CheckGate::Always, 1e-9},
        {"time-block-forms", "(B5)", "(E4)", CheckGate::Always, 1e-9},
        {"ricci-spatial", "(C1)", "(F1)", CheckGate::Always, 1e-9},
        {"ricci-time-row", "(C2)", "(F2)", CheckGate::Always, 1e-9},
        {"ricci-corner", "(C3)", "(F3)", CheckGate::Always, 1e-9},
        {"ricci-parabolic", "(C3)", "(F3)", CheckGate::Always, 1e-9},
        {"ricci-symmetry", "Corollary 2.4", "Corollary 3.2", CheckGate::Always, 1e-9},
        {"scalar-curvature", "Corollary 2.4", "Corollary 3.2", CheckGate::Always, 1e-10}}},
      {"deg-flow",
       5,
       false,
       false,
       {{"metric-evolution", "(2.1)", "(3.2)", CheckGate::Always, 1e-9},
        {"connection-evolution", "(2.1)", "(3.3)", CheckGate::Always, 1e-9},
        {"connection-mixed-time", "Theorem 2.1", "Theorem 3.7", CheckGate::Always, 1e-9},
        {"connection-double-time", "Theorem 2.1", "Theorem 3.7", CheckGate::Always, 1e-9}}},
      {"bianchi",
       5,
       false,
       false,
       {{"scalar-chain", "§2 Bianchi (scalar)", nullptr, CheckGate::PlainFlow, 1e-8},
        {"curvature-cyclic", "§2 Bianchi (curvature)", nullptr, CheckGate::Always, 1e-8},
        {"ricci-derivative-spatial", "Lemma 3.3 (1)", nullptr, CheckGate::Always, 1e-8},
        {"ricci-derivative-time", "Lemma 3.3 (2)", nullptr, CheckGate::Always, 1e-8},
        {"ricci-derivative-row", "Lemma 3.3 (3)", nullptr, CheckGate::Always, 1e-8},
        {"ricci-derivative-corner", "Lemma 3.3 (4)", nullptr, CheckGate::Always, 1e-8},
        {"null-rows", "Lemma 3.3 (4)", nullptr, CheckGate::Always, 1e-8},
        {"exchange-spatial", "Corollary 3.5 (1)", nullptr, CheckGate::Always, 1e-8},
        {"exchange-time", "Corollary 3.5 (2)", nullptr, CheckGate::Always, 1e-8},
        {"exchange-component", "Corollary 3.5 (3)", nullptr, CheckGate::Always, 1e-8},
        {"exchange-corner", "Corollary 3.5 (4)", nullptr, CheckGate::Always, 1e-8},
        {"potential-commutation", "Corollary 3.5 (commutation)", nullptr, CheckGate::Always,
         1e-8}}},
      {"harnack-curvature",
       4,
       true,
       false,
       {{"quadratic-form-direct", "Corollary 2.3", nullptr, CheckGate::Always, 1e-9},
        {"quadratic-form-closed", "(2.2)", nullptr, CheckGate::Always, 1e-9}}},
      {"approx-conn",
       3,
       true,
       false,
       {{"metric-blocks", "Remark 4.2", nullptr, CheckGate::Always, 1e-12},
        {"positive-definite", "§4 metric family", nullptr, CheckGate::Always, 1e-12},
        {"spatial-block", "Lemma 4.3 (1)", nullptr, CheckGate::Always, 1e-9},
        {"time-row-ricci", "Lemma 4.3 (2)", nullptr, CheckGate::Always, 1e-9},
        {"mixed-ricci-block", "Lemma 4.3 (3)", nullptr, CheckGate::Always, 1e-9},
        {"gradient-row", "Lemma 4.3 (4)", nullptr, CheckGate::Always, 1e-9},
        {"time-row-gradient", "Lemma 4.3 (5)", nullptr, CheckGate::Always, 1e-9},
        {"time-corner", "Lemma 4.3 (6)", nullptr, CheckGate::Always, 1e-9},
        {"metric-compatibility", "Lemma 4.3", nullptr, CheckGate::Always, 1e-10},
        {"torsion-free", "Lemma 4.3", nullptr, CheckGate::Always, 1e-12}}},
      {"approx-curv",
       4,
       true,
       false,
       {{"spatial-correction", "Lemma 4.4 (1)", nullptr, CheckGate::Always, 1e-9},
        {"time-direction-correction", "Lemma 4.4 (2)", nullptr, CheckGate::Always, 1e-9},
        {"double-time-correction", "Lemma 4.4 (3)", nullptr, CheckGate::Always, 1e-9}}},
      {"limits",
       4,
       true,
       false,
       {{"connection-limit", "Theorem 4.5 (1)", nullptr, CheckGate::Always, 0.1},
        {"footnote-drift", "footnote 7", nullptr, CheckGate::Always, 0.25},
        {"quadratic-form-limit", "Theorem 4.5 (2)", nullptr, CheckGate::Always, 1e-4},
        {"two-form-isometry", "Remark 4.1", nullptr, CheckGate::Always, 1e-12},
        {"bracket-degeneration", "(1.5)", nullptr, CheckGate::Always, 1e-5},
        {"inner-degeneration", "(1.6)", nullptr, CheckGate::Always, 1e-5}}},
  };
  return catalog;
}

// Every catalog label that can appear in a report, across both flow modes.
inline std::set<std::string> all_check_anchors() {
  std::set<std::string> anchors;
  for (const SuiteSpec& suite : suite_catalog())
    for (const CheckSpec& check : suite.checks) {
      anchors.insert(check.anchor);
      if (check.anchor_modified != nullptr) anchors.insert(check.anchor_modified);
    }
  return anchors;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline int worker_count() {
  if (const char* env = std::getenv("HARNACK_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 64));
    throw ConfigError("HARNACK_LAB_THREADS must be a positive integer");
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 8u));
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct SuiteSample {
  double t;
  std::vector<double> x;
  Tensor<double> U;
  Tensor<double> W;
  std::vector<double> V;
  Tensor<double> U2;
  Tensor<double> W2;
  std::vector<double> qsym;
  std::vector<double> rot_raw;
};

inline Tensor<double> random_two_form(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Tensor<double> u(Range::Spatial, n, {Var::Down, Var::Down}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = unit(rng);
      u(i, j) = v;
      u(j, i) = -v;
    }
  return u;
}

inline Tensor<double> random_one_form(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Tensor<double> w(Range::Spatial, n, {Var::Down}, 0.0);
  for (int i = 0; i < n; ++i) w(i) = unit(rng);
  return w;
}

inline SuiteSample make_sample(std::mt19937_64& rng, int n, double t_lo, double t_hi) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> tdist(t_lo, t_hi);
  double t = tdist(rng);
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (double& v : x) v = 0.8 * unit(rng);
  Tensor<double> u = random_two_form(n, rng);
  Tensor<double> w = random_one_form(n, rng);
  std::vector<double> vvec(static_cast<std::size_t>(n), 0.0);
  for (double& v : vvec) v = unit(rng);
  Tensor<double> u2 = random_two_form(n, rng);
  Tensor<double> w2 = random_one_form(n, rng);
  const int n2 = n * (n - 1) / 2;
  const int basis_dim = n2 + n;
  std::vector<double> qsym(static_cast<std::size_t>(basis_dim) * basis_dim, 0.0);
  for (int a = 0; a < basis_dim; ++a)
    for (int b = a; b < basis_dim; ++b) {
      double v = unit(rng);
      qsym[static_cast<std::size_t>(a) * basis_dim + b] = v;
      qsym[static_cast<std::size_t>(b) * basis_dim + a] = v;
    }
  std::vector<double> rot(static_cast<std::size_t>(n2) * n2, 0.0);
  for (double& v : rot) v = unit(rng);
  return SuiteSample{t,  std::move(x),  std::move(u),    std::move(w), std::move(vvec),
                     u2, std::move(w2), std::move(qsym), std::move(rot)};
}

struct SuiteContext {
  const RunConfig& cfg;
  const FlowSolution& solution;
  bool modified;
  bool has_potential;
  double t_lo;
  double t_hi;
};

inline bool gate_active(CheckGate gate, const SuiteContext& ctx) {
  switch (gate) {
    case CheckGate::Always:
      return true;
    case CheckGate::PlainFlow:
      return !ctx.modified;
    case CheckGate::Potential:
      return ctx.has_potential;
    case CheckGate::PlainPotential:
      return !ctx.modified && ctx.has_potential;
    case CheckGate::PotentialDim2:
      return ctx.has_potential && ctx.solution.dim() == 2;
    case CheckGate::EvolvingGauge:
      return ctx.solution.mode() != FlowMode::SteadySoliton;
    case CheckGate::SolitonGaugeDim2:
      return ctx.modified && ctx.solution.dim() == 2;
  }
  return false;
}

inline double configured_tolerance(const RunConfig& cfg, const std::string& suite,
                                   const CheckSpec& spec) {
  auto exact = cfg.tolerances.find(suite + "." + spec.id);
  if (exact != cfg.tolerances.end()) return exact->second;
  auto whole = cfg.tolerances.find(suite);
  if (whole != cfg.tolerances.end()) return whole->second;
  return spec.tolerance;
}

inline std::vector<const CheckSpec*> active_checks(const SuiteSpec& spec,
                                                   const SuiteContext& ctx) {
  std::vector<const CheckSpec*> out;
  for (const CheckSpec& check : spec.checks)
    if (gate_active(check.gate, ctx)) out.push_back(&check);
  return out;
}

inline SuiteResult assemble_suite(const SuiteSpec& spec, const SuiteContext& ctx,
                                  const std::vector<const CheckSpec*>& checks,
                                  const std::vector<std::vector<double>>& rows,
                                  const std::vector<std::vector<double>>& points) {
  SuiteResult out;
  out.name = spec.name;
  out.pass = true;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    CheckResult res;
    res.id = checks[c]->id;
    res.anchor = ctx.modified && checks[c]->anchor_modified != nullptr
                     ? checks[c]->anchor_modified
                     : checks[c]->anchor;
    res.tolerance = configured_tolerance(ctx.cfg, spec.name, *checks[c]);
    std::size_t worst = 0;
    for (std::size_t s = 1; s < rows.size(); ++s)
      if (rows[s][c] > rows[worst][c]) worst = s;
    res.residual = rows.empty() ? 0.0 : rows[worst][c];
    res.point = rows.empty() ? std::vector<double>{} : points[worst];
    res.pass = res.residual <= res.tolerance;
    out.pass = out.pass && res.pass;
    out.checks.push_back(std::move(res));
  }
  return out;
}

template <typename Fn>
SuiteResult eval_per_sample(const SuiteSpec& spec, const SuiteContext& ctx,
                            const std::vector<SuiteSample>& samples, Fn&& fn) {
  std::vector<const CheckSpec*> checks = active_checks(spec, ctx);
  std::vector<std::vector<double>> rows(samples.size());
  std::vector<std::vector<double>> points(samples.size());
  parallel_for(static_cast<int>(samples.size()), [&](int i) {
    const SuiteSample& smp = samples[static_cast<std::size_t>(i)];
    rows[static_cast<std::size_t>(i)] = fn(smp);
    std::vector<double> pt;
    pt.push_back(smp.t);
    pt.insert(pt.end(), smp.x.begin(), smp.x.end());
    points[static_cast<std::size_t>(i)] = std::move(pt);
  });
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != checks.size())
      throw Error("suite produced a residual row of the wrong width");
  return assemble_suite(spec, ctx, checks, rows, points);
}

inline Tensor<Jet> constant_jet_tensor(const Tensor<double>& v, const JetLayout& layout) {
  Tensor<Jet> out(v.range(), v.dim(), v.variance(), Jet::constant(layout, 0.0));
  const int e = v.extent();
  if (v.rank() == 1) {
    for (int i = 0; i < e; ++i) out(i) = Jet::constant(layout, v(i));
  } else if (v.rank() == 2) {
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j) out(i, j) = Jet::constant(layout, v(i, j));
  } else {
    throw ShapeError("constant lift supports rank 1 and 2 only");
  }
  return out;
}

inline LieAlgebraElement element_from(const Tensor<double>& u, const Tensor<double>& w) {
  const int n = u.dim();
  LieAlgebraElement e = zero_element(n);
  for (int i = 0; i < n; ++i) {
    e.one_form(i) = w(i);
    for (int j = 0; j < n; ++j) e.two_form(i, j) = u(i, j);
  }
  return e;
}

inline double element_gap(const LieAlgebraElement& a, const LieAlgebraElement& b) {
  double worst = 0.0;
  const int n = a.two_form.dim();
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(a.one_form(i) - b.one_form(i)));
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(a.two_form(i, j) - b.two_form(i, j)));
  }
  return worst;
}

inline std::vector<std::vector<double>> orthogonalize(std::span<const double> raw, int n2) {
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

inline std::vector<double> flow_row(const SuiteContext& ctx, const SuiteSample& smp) {
  SpatialGeometry G = geometry_at(ctx.solution, smp.t, smp.x, ctx.cfg.order);
  double scale = std::max(1.0, max_abs_value(time_derivative(G.g)));
  return {max_abs_value(flow_residual(G)) / scale};
}

inline std::vector<double> soliton_row(const SuiteContext& ctx, const SuiteSample& smp) {
  SpatialGeometry G = geometry_at(ctx.solution, smp.t, smp.x, ctx.cfg.order);
  SolitonResiduals sr = soliton_residuals(G);
  std::vector<double> row{sr.structure, sr.trace, sr.closedness, sr.divergence};
  if (ctx.solution.mode() != FlowMode::SteadySoliton) row.push_back(sr.time_evolution);
  row.push_back(sr.weitzenboeck);
  if (G.dim == 2) {
    SolitonUWResiduals uw = soliton_uw_checks(G, volume_two_form(G));
    row.insert(row.end(), {uw.parallel_u, uw.w_gradient});
    if (ctx.modified) row.push_back(uw.w_time_evolution);
    row.push_back(uw.hamilton_substitution);
  }
  return row;
}

inline std::vector<double> harnack_defs_row(const SuiteContext& ctx, const SuiteSample& smp) {
  const int n = ctx.solution.dim();
  SpatialGeometry G = geometry_at(ctx.solution, smp.t, smp.x, ctx.cfg.order);
  Tensor<double> g = values_of(G.g);
  Tensor<double> g_inv = values_of(G.g_inv);
  Tensor<double> p = values_of(compute_P(G));
  Tensor<double> m = values_of(compute_M(G));
  Tensor<double> rm = values_of(G.rm);
  Tensor<double> ric = values_of(G.ric);

  double p_antisym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) p_antisym = std::max(p_antisym, std::abs(p(i, j, k) + p(j, i, k)));

  double m_sym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m_sym = std::max(m_sym, std::abs(m(i, j) - m(j, i)));

  HarnackData d{smp.U, smp.W, {}, smp.t};
  double z = harnack_Z(G, d, false);
  std::vector<double> w_up(static_cast<std::size_t>(n), 0.0);
  Tensor<double> u_up(Range::Spatial, n, {Var::Up, Var::Up}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      w_up[i] += g_inv(i, j) * smp.W(j);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) u_up(i, j) += g_inv(i, a) * g_inv(j, b) * smp.U(a, b);
    }
  double z2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      z2 += m(i, j) * w_up[i] * w_up[j];
      for (int k = 0; k < n; ++k) {
        z2 -= 2.0 * p(i, j, k) * u_up(i, j) * w_up[k];
        for (int l = 0; l < n; ++l)
          for (int q = 0; q < n; ++q)
            z2 += rm(i, j, k, q) * g(q, l) * u_up(i, j) * u_up(l, k);
      }
    }
  double z_scale = std::max(1.0, std::abs(z));
  double z_assembly = std::abs(z - z2) / z_scale;

  double tr = trace_harnack(G, smp.V, false, 0.0);
  double dtR = G.R.derivative(0).value();
  double tr2 = dtR;
  for (int i = 0; i < n; ++i) {
    tr2 += 2.0 * G.R.derivative(i + 1).value() * smp.V[i];
    for (int j = 0; j < n; ++j) tr2 += 2.0 * ric(i, j) * smp.V[i] * smp.V[j];
  }
  double trace_assembly = std::abs(tr - tr2) / std::max(1.0, std::abs(tr));

  LieAlgebraElement ea = element_from(smp.U, smp.W);
  LieAlgebraElement eb = element_from(smp.U2, smp.W2);
  LieAlgebraElement ec = zero_element(n);
  for (int i = 0; i < n; ++i) {
    ec.one_form(i) = smp.W(i) - smp.W2(i);
    for (int j = 0; j < n; ++j) ec.two_form(i, j) = smp.U(i, j) + smp.U2(i, j);
  }
  auto bracket = [&](const LieAlgebraElement& lhs, const LieAlgebraElement& rhs,
                     AlgebraMode mode) {
    return bracket_and_inner(lhs, rhs, g, g_inv, mode);
  };
  LieAlgebraElement jac = bracket(ea, bracket(eb, ec, AlgebraMode::Direct).first,
                                  AlgebraMode::Direct)
                              .first;
  LieAlgebraElement jac2 = bracket(eb, bracket(ec, ea, AlgebraMode::Direct).first,
                                   AlgebraMode::Direct)
                               .first;
  LieAlgebraElement jac3 = bracket(ec, bracket(ea, eb, AlgebraMode::Direct).first,
                                   AlgebraMode::Direct)
                               .first;
  double jacobi = 0.0;
  for (int i = 0; i < n; ++i) {
    jacobi = std::max(jacobi, std::abs(jac.one_form(i) + jac2.one_form(i) + jac3.one_form(i)));
    for (int j = 0; j < n; ++j)
      jacobi = std::max(jacobi,
                        std::abs(jac.two_form(i, j) + jac2.two_form(i, j) + jac3.two_form(i, j)));
  }

  auto [direct_bracket, direct_inner] = bracket(ea, eb, AlgebraMode::Direct);
  double manual_inner = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          manual_inner += g_inv(i, k) * g_inv(j, l) * smp.U(i, j) * smp.U2(k, l);
  LieAlgebraElement wa = zero_element(n);
  LieAlgebraElement wb = zero_element(n);
  for (int i = 0; i < n; ++i) {
    wa.one_form(i) = smp.W(i);
    wb.one_form(i) = smp.W2(i);
  }
  double one_form_inner = bracket(wa, wb, AlgebraMode::Direct).second;
  double degenerate_inner =
      std::max(std::abs(direct_inner - manual_inner), std::abs(one_form_inner));

  auto [st_bracket, st_inner] = bracket(ea, eb, AlgebraMode::Spacetime);
  auto [mx_bracket, mx_inner] = bracket(ea, eb, AlgebraMode::Mixed);
  double spacetime_inner_gap = std::abs(st_inner - direct_inner);
  double spacetime_bracket_gap = element_gap(st_bracket, direct_bracket);
  double mixed_inner_gap = std::abs(mx_inner - direct_inner);
  double mixed_bracket_gap = element_gap(mx_bracket, direct_bracket);

  SharpBasis basis(g, g_inv, AlgebraMode::Direct);
  const int basis_dim = basis.dim();
  const int n2 = basis.two_form_count();
  std::vector<double> sharp = sharp_square(basis, smp.qsym);
  double sharp_sym = 0.0;
  for (int a = 0; a < basis_dim; ++a)
    for (int b = 0; b < basis_dim; ++b)
      sharp_sym = std::max(
          sharp_sym, std::abs(sharp[static_cast<std::size_t>(a) * basis_dim + b] -
                              sharp[static_cast<std::size_t>(b) * basis_dim + a]));

  std::vector<std::vector<double>> o = orthogonalize(smp.rot_raw, n2);
  auto big = [&](int a, int b) {
    if (a < n2 && b < n2) return o[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    return a == b ? 1.0 : 0.0;
  };
  std::vector<double> q_rot(static_cast<std::size_t>(basis_dim) * basis_dim, 0.0);
  for (int a = 0; a < basis_dim; ++a)
    for (int b = 0; b < basis_dim; ++b) {
      double s = 0.0;
      for (int c = 0; c < basis_dim; ++c)
        for (int e = 0; e < basis_dim; ++e)
          s += big(a, c) * big(b, e) * smp.qsym[static_cast<std::size_t>(c) * basis_dim + e];
      q_rot[static_cast<std::size_t>(a) * basis_dim + b] = s;
    }
  SharpBasis rotated = basis;
  rotated.rotate_two_form_block(o, AlgebraMode::Direct);
  std::vector<double> sharp_rot = sharp_square(rotated, q_rot);
  double sharp_invariance = 0.0;
  for (int a = 0; a < basis_dim; ++a)
    for (int b = 0; b < basis_dim; ++b) {
      double expected = 0.0;
      for (int c = 0; c < basis_dim; ++c)
        for (int e = 0; e < basis_dim; ++e)
          expected += big(a, c) * big(b, e) * sharp[static_cast<std::size_t>(c) * basis_dim + e];
      sharp_invariance =
          std::max(sharp_invariance,
                   std::abs(sharp_rot[static_cast<std::size_t>(a) * basis_dim + b] - expected));
    }

  return {p_antisym,
          m_sym,
          z_assembly,
          trace_assembly,
          jacobi,
          degenerate_inner,
          spacetime_inner_gap,
          spacetime_bracket_gap,
          mixed_inner_gap,
          mixed_bracket_gap,
          sharp_sym,
          sharp_invariance};
}

inline std::vector<double> harnack_ineq_row(const SuiteContext& ctx, const SuiteSample& smp) {
  const int n = ctx.solution.dim();
  SpatialGeometry G = geometry_at(ctx.solution, smp.t, smp.x, ctx.cfg.order);
  HarnackData d{smp.U, smp.W, {}, smp.t};
  double z = harnack_Z(G, d, true);
  double matrix = std::max(0.0, -z);

  std::vector<double> row{matrix};
  if (!ctx.modified) {
    double tr = trace_harnack(G, smp.V, true, smp.t);
    row.push_back(std::max(0.0, -tr));

    SpacetimeConnection c =
        build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
    SpacetimeRicciReport rr = spacetime_ricci(c);
    Tensor<double> ric = values_of(rr.ric);
    double quad = ric(0, 0);
    for (int j = 0; j < n; ++j) {
      quad += (ric(0, j + 1) + ric(j + 1, 0)) * smp.V[j];
      for (int i = 0; i < n; ++i) quad += ric(i + 1, j + 1) * smp.V[i] * smp.V[j];
    }
    double half_trace = 0.5 * trace_harnack(c.base, smp.V, false, 0.0);
    row.push_back(std::abs(quad - half_trace) / std::max(1.0, std::abs(quad)));
  }
  if (!ctx.modified && ctx.has_potential) {
    std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) grad[i] = G.grad_f(i).value();
    row.push_back(std::abs(trace_harnack(G, grad, false, 0.0)));
  }
  return row;
}

inline std::vector<double> spacetime_conn_row(const SuiteContext& ctx, const SuiteSample& smp) {
  const int n = ctx.solution.dim();
  SpacetimeConnection c =
      build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
  const SpatialGeometry& G = c.base;

  double metric_gap = 0.0;
  for (int a = 0; a <= n; ++a) {
    metric_gap = std::max(metric_gap, std::abs(c.g_inv_st(0, a).value()));
    metric_gap = std::max(metric_gap, std::abs(c.g_inv_st(a, 0).value()));
    metric_gap = std::max(metric_gap, std::abs(c.g_st(0, a).value()));
    metric_gap = std::max(metric_gap, std::abs(c.g_st(a, 0).value()));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      metric_gap =
          std::max(metric_gap, std::abs((c.g_inv_st(i + 1, j + 1) - G.g_inv(i, j)).value()));
      metric_gap = std::max(metric_gap, std::abs((c.g_st(i + 1, j + 1) - G.g(i, j)).value()));
    }

  double spatial = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        spatial = std::max(
            spatial, std::abs((c.gamma(k + 1, i + 1, j + 1) - G.gamma(k, i, j)).value()));

  double time_row = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) time_row = std::max(time_row, std::abs(c.gamma(0, a, b).value()));

  Tensor<Jet> hess_up = flip_slot(G.hess_f, 1, G.g_inv);
  double ricci_block = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Jet expected = -G.ric_mixed(i, k);
      if (ctx.modified) expected += hess_up(i, k);
      ricci_block =
          std::max(ricci_block, std::abs((c.gamma(k + 1, i + 1, 0) - expected).value()));
      ricci_block =
          std::max(ricci_block, std::abs((c.gamma(k + 1, 0, i + 1) - expected).value()));
    }

  Jet speed = -0.5 * G.R;
  if (ctx.modified) {
    Jet grad_sq = zero_like(G.R);
    for (int i = 0; i < n; ++i) grad_sq += G.grad_f(i) * G.df(i);
    speed += G.f.derivative(0) - 0.5 * grad_sq;
  }
  Tensor<Jet> speed_scalar(Range::Spatial, n, {}, speed);
  Tensor<Jet> grad_speed = flip_slot(covariant_derivative(speed_scalar, G.gamma), 0, G.g_inv);
  double gradient_row = 0.0;
  for (int k = 0; k < n; ++k)
    gradient_row = std::max(gradient_row, std::abs((c.gamma(k + 1, 0, 0) - grad_speed(k)).value()));

  CompatibilityTorsionRecord ct = compatibility_and_torsion(c);

  std::vector<double> row{metric_gap, spatial,   time_row, ricci_block,
                          gradient_row, ct.metric_compatibility, ct.torsion};
  if (!ctx.modified) {
    Tensor<Jet> uf = constant_jet_tensor(smp.U, *c.layout);
    Tensor<Jet> wf = constant_jet_tensor(smp.W, *c.layout);
    TFieldComparison tf = spacetime_T_derivatives(c, uf, wf);

    // The evolution block of the lifted heat operator differs from the
    // spatial one by curvature frame terms; for constant coefficient fields
    // those terms have a closed form.
    Tensor<double> ricm = values_of(G.ric_mixed);
    double expected_u = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) v += ricm(j, m) * smp.U(m, k) + ricm(k, m) * smp.U(j, m);
        expected_u = std::max(expected_u, std::abs(v));
      }
    Tensor<Jet> du = covariant_derivative(uf, G.gamma);
    Tensor<double> ric_up = values_of(flip_slot(G.ric_mixed, 0, G.g_inv));
    Tensor<double> grad_R = values_of(grad_speed);
    double expected_w = 0.0;
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int m = 0; m < n; ++m) v += ricm(j, m) * smp.W(m);
      for (int a = 0; a < n; ++a)
        for (int p = 0; p < n; ++p) v -= 2.0 * ric_up(a, p) * du(a, j, p).value();
      for (int p = 0; p < n; ++p) v -= grad_R(p) * smp.U(j, p);
      expected_w = std::max(expected_w, std::abs(v));
    }
    double heat_u = std::abs(tf.u_heat - expected_u) / std::max(1.0, expected_u);
    double heat_w = std::abs(tf.w_heat - expected_w) / std::max(1.0, expected_w);
    row.insert(row.end(), {tf.u_gradient, tf.w_gradient, std::max(tf.u_gradient, tf.w_gradient),
                           heat_u, heat_w, std::max(heat_u, heat_w)});
  }
  return row;
}

inline std::vector<double> spacetime_curv_row(const SuiteContext& ctx, const SuiteSample& smp) {
  const int n = ctx.solution.dim();
  SpacetimeConnection c =
      build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
  Tensor<double> direct = values_of(spacetime_curvature(c, CurvatureMethod::Direct).rm);
  Tensor<double> closed = values_of(spacetime_curvature(c, CurvatureMethod::ClosedForm).rm);
  double scale = std::max(1.0, max_abs(direct));

  double spatial = 0.0, upper_time = 0.0, time_direction = 0.0, mixed_time = 0.0,
         double_time = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) {
          double gap = std::abs(direct(i, j, k, l) - closed(i, j, k, l));
          if (l == 0) {
            upper_time = std::max(upper_time, gap);
          } else if (i > 0 && j > 0 && k > 0) {
            spatial = std::max(spatial, gap);
          } else if (i > 0 && j > 0) {
            time_direction = std::max(time_direction, gap);
          } else if (k > 0 && (i > 0 || j > 0)) {
            mixed_time = std::max(mixed_time, gap);
          } else {
            double_time = std::max(double_time, gap);
          }
        }

  double forms_gap = curvature_time_block_display_gap(c) / scale;

  SpacetimeRicciReport rr = spacetime_ricci(c);
  Tensor<double> ric = values_of(rr.ric);
  Tensor<double> ric_closed = values_of(rr.ric_closed);
  double ric_scale = std::max(1.0, max_abs(ric));
  double ric_spatial = 0.0, ric_time_row = 0.0;
  for (int i = 0; i < n; ++i) {
    ric_time_row = std::max(ric_time_row, std::abs(ric(0, i + 1) - ric_closed(0, i + 1)));
    ric_time_row = std::max(ric_time_row, std::abs(ric(i + 1, 0) - ric_closed(i + 1, 0)));
    for (int j = 0; j < n; ++j)
      ric_spatial = std::max(ric_spatial, std::abs(ric(i + 1, j + 1) - ric_closed(i + 1, j + 1)));
  }
  double ric_corner = std::abs(ric(0, 0) - ric_closed(0, 0));

  return {spatial / scale,
          upper_time / scale,
          time_direction / scale,
          mixed_time / scale,
          double_time / scale,
          forms_gap,
          ric_spatial / ric_scale,
          ric_time_row / ric_scale,
          ric_corner / ric_scale,
          rr.parabolic_gap / ric_scale,
          rr.symmetry_gap / ric_scale,
          rr.scalar_gap};
}

inline std::vector<double> deg_flow_row(const SuiteContext& ctx, const SuiteSample& smp) {
  SpacetimeConnection c =
      build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
  DegenerateFlowResiduals fr = degenerate_flow_residual(c);
  return {fr.metric_evolution, fr.connection_evolution, fr.connection_mixed_time,
          fr.connection_double_time};
}

inline std::vector<double> bianchi_row(const SuiteContext& ctx, const SuiteSample& smp) {
  SpacetimeConnection c =
      build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
  BianchiResiduals br = bianchi_identity_residuals(c);
  std::vector<double> row;
  if (!ctx.modified) row.push_back(br.scalar_chain);
  row.insert(row.end(), {br.second_bianchi, br.ricci_derivative_spatial,
                         br.ricci_derivative_time, br.ricci_derivative_row_time,
                         br.ricci_derivative_corner, br.ricci_derivative_null_rows,
                         br.exchange_spatial, br.exchange_mixed, br.exchange_time_component,
                         br.exchange_time_corner, br.potential_commutation});
  return row;
}

inline std::vector<double> harnack_curvature_row(const SuiteContext& ctx,
                                                 const SuiteSample& smp) {
  SpacetimeConnection c =
      build_spacetime_connection(ctx.solution, smp.t, smp.x, ctx.cfg.tau, ctx.cfg.order);
  HarnackData d{smp.U, smp.W, {}, smp.t};
  HarnackCurvatureComparison direct = harnack_equals_curvature(c, d, CurvatureMethod::Direct);
  HarnackCurvatureComparison closed =
      harnack_equals_curvature(c, d, CurvatureMethod::ClosedForm);
  double scale_direct = std::max(1.0, std::abs(direct.harnack_z));
  double scale_closed = std::max(1.0, std::abs(closed.harnack_z));
  return {direct.difference / scale_direct, closed.difference / scale_closed};
}

inline std::vector<double> approx_conn_row(const SuiteContext& ctx, const SuiteSample& smp) {
  const int n = ctx.solution.dim();
  ApproxMetric m = approx_metric(ctx.solution, ctx.cfg.approx_epsilon, ctx.cfg.approx_delta,
                                 smp.t, smp.x, ctx.cfg.order);
  double blocks = 0.0;
  for (int i = 0; i < n; ++i) {
    blocks = std::max(blocks, std::abs(m.g_st(0, i + 1).value()));
    blocks = std::max(blocks, std::abs(m.g_st(i + 1, 0).value()));
    for (int j = 0; j < n; ++j)
      blocks = std::max(blocks, std::abs((m.g_st(i + 1, j + 1) - m.base.g(i, j)).value()));
  }
  blocks = std::max(blocks, std::abs((m.g_st(0, 0) - m.B).value()));
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      double id = 0.0;
      for (int p = 0; p <= n; ++p) id += (m.g_st(a, p) * m.g_inv_st(p, b)).value();
      blocks = std::max(blocks, std::abs(id - (a == b ? 1.0 : 0.0)));
    }
  double definite = std::max(0.0, -m.B.value());

  ApproxConnectionRecord rec = approx_connection_check(
      ctx.solution, ctx.cfg.approx_epsilon, ctx.cfg.approx_delta, smp.t, smp.x, ctx.cfg.order);
  return {blocks,      definite,    rec.item[0], rec.item[1],
          rec.item[2], rec.item[3], rec.item[4], rec.item[5],
          rec.metric_compatibility, rec.torsion};
}

inline std::vector<double> approx_curv_row(const SuiteContext& ctx, const SuiteSample& smp) {
  ApproxCurvatureRecord rec = approx_curvature_check(
      ctx.solution, ctx.cfg.approx_epsilon, ctx.cfg.approx_delta, smp.t, smp.x, ctx.cfg.order);
  return {rec.item[0], rec.item[1], rec.item[2]};
}

inline SuiteResult run_limits_suite(const SuiteSpec& spec, const SuiteContext& ctx,
                                    const std::vector<SuiteSample>& samples,
                                    std::vector<SweepEntry>* rows_out) {
  const SuiteSample& smp = samples.front();
  const int n = ctx.solution.dim();
  HarnackData d{smp.U, smp.W, {}, smp.t};

  std::vector<std::pair<double, double>> conn_schedule = ctx.cfg.schedule;
  if (conn_schedule.empty())
    for (int k = 1; k <= 10; ++k)
      conn_schedule.emplace_back(std::pow(4.0, k), std::pow(2.0, k));
  std::vector<std::pair<double, double>> curv_schedule = ctx.cfg.curvature_schedule;
  if (curv_schedule.empty())
    for (int k = 8; k <= 24; ++k)
      curv_schedule.emplace_back(std::pow(2.0, k), std::pow(2.0, -10));

  SweepResult conn_sweep =
      limit_sweep(ctx.solution, smp.t, smp.x, d, conn_schedule, ctx.cfg.order);
  SweepResult curv_sweep =
      limit_sweep(ctx.solution, smp.t, smp.x, d, curv_schedule, ctx.cfg.order);
  if (rows_out != nullptr) {
    rows_out->insert(rows_out->end(), conn_sweep.entries.begin(), conn_sweep.entries.end());
    rows_out->insert(rows_out->end(), curv_sweep.entries.begin(), curv_sweep.entries.end());
  }

  double ratio_residual = 0.0;
  const std::size_t ratio_count = conn_sweep.conn_ratios.size();
  const std::size_t ratio_tail = std::min<std::size_t>(5, ratio_count);
  for (std::size_t i = ratio_count - ratio_tail; i < ratio_count; ++i)
    ratio_residual = std::max(ratio_residual, std::abs(conn_sweep.conn_ratios[i] - 0.5));

  std::vector<double> drift;
  for (const SweepEntry& e : curv_sweep.entries)
    drift.push_back(e.eps * std::abs(e.gamma000 + 1.0 / (2.0 * (smp.t + e.delta))));
  constexpr double kDriftFloor = 1e-6;
  double drift_residual = 0.0;
  for (std::size_t i = drift.size() > 3 ? drift.size() - 3 : 1; i < drift.size(); ++i)
    if (drift[i] > kDriftFloor && drift[i - 1] > kDriftFloor)
      drift_residual = std::max(drift_residual, std::abs(drift[i] / drift[i - 1] - 1.0));
  double fitted = 0.0;
  for (double v : drift) fitted = std::max(fitted, v);

  double quad_residual = curv_sweep.entries.back().target_gap_shifted;

  ApproxMetric m = approx_metric(ctx.solution, ctx.cfg.approx_epsilon, ctx.cfg.approx_delta,
                                 smp.t, smp.x, ctx.cfg.order);
  Tensor<double> alpha(Range::Spacetime, n, {Var::Down, Var::Down}, 0.0);
  for (int i = 0; i < n; ++i) {
    alpha(i + 1, 0) = smp.W(i);
    alpha(0, i + 1) = -smp.W(i);
    for (int j = 0; j < n; ++j) alpha(i + 1, j + 1) = smp.U(i, j);
  }
  TwoFormSplit split = lambda2_decomposition(m, alpha);
  double full_norm = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q)
          full_norm +=
              (m.g_inv_st(a, p) * m.g_inv_st(b, q)).value() * alpha(a, b) * alpha(p, q);
  Tensor<double> g_inv = values_of(m.base.g_inv);
  double split_norm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      split_norm += 2.0 * g_inv(i, j) * split.one_form(i) * split.one_form(j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          split_norm +=
              g_inv(i, k) * g_inv(j, l) * split.two_form(i, j) * split.two_form(k, l);
    }
  double isometry = std::abs(full_norm - split_norm);

  const SweepEntry& deep = curv_sweep.entries.back();
  ApproxMetric m_deep =
      approx_metric(ctx.solution, deep.eps, deep.delta, smp.t, smp.x, ctx.cfg.order);
  InducedAlgebraRecord alg = induced_algebra_limit(m_deep, element_from(smp.U, smp.W),
                                                   element_from(smp.U2, smp.W2));

  std::vector<const CheckSpec*> checks = active_checks(spec, ctx);
  std::vector<std::vector<double>> rows{{ratio_residual, drift_residual, quad_residual, isometry,
                                         alg.bracket_gap, alg.inner_gap}};
  std::vector<std::vector<double>> points{{smp.t}};
  SuiteResult out = assemble_suite(spec, ctx, checks, rows, points);
  for (CheckResult& check : out.checks) {
    if (check.id == "connection-limit" || check.id == "quadratic-form-limit")
      check.point = {conn_sweep.entries.back().eps, conn_sweep.entries.back().delta};
    if (check.id == "quadratic-form-limit")
      check.point = {curv_sweep.entries.back().eps, curv_sweep.entries.back().delta};
    if (check.id == "footnote-drift") check.point = {fitted};
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> applicable_suites(const FlowSolution& s) {
  std::vector<std::string> out;
  const bool modified = uses_potential_in_flow(s.mode());
  for (const SuiteSpec& spec : suite_catalog()) {
    if (spec.plain_only && modified) continue;
    if (spec.needs_potential && !s.has_potential()) continue;
    out.push_back(spec.name);
  }
  return out;
}

inline const SuiteSpec* find_suite(const std::string& name) {
  for (const SuiteSpec& spec : suite_catalog())
    if (name == spec.name) return &spec;
  return nullptr;
}

// Resolves the suite list, checks solution compatibility and jet order, and
// computes the sampling window; throws ConfigError naming the offending key.
inline std::vector<std::string> validate_config(const RunConfig& cfg, const FlowSolution& s,
                                                double* t_lo, double* t_hi) {
  if (cfg.samples < 1) throw ConfigError("samples: must be at least 1");
  if (cfg.order < 4 || cfg.order > 6) throw ConfigError("order: must lie in [4, 6]");
  if (cfg.tau < 0.0) throw ConfigError("tau: must be nonnegative");
  if (cfg.format != "json" && cfg.format != "text")
    throw ConfigError("format: must be json or text");
  if (!(cfg.approx_epsilon > 0.0)) throw ConfigError("approx_epsilon: must be positive");
  if (!(cfg.approx_delta > 0.0)) throw ConfigError("approx_delta: must be positive");

  const bool modified = uses_potential_in_flow(s.mode());
  std::vector<std::string> names = cfg.suites;
  if (names.empty()) {
    for (const std::string& name : applicable_suites(s))
      if (cfg.order >= find_suite(name)->min_order) names.push_back(name);
  }
  std::set<std::string> seen;
  for (const std::string& name : names) {
    const SuiteSpec* spec = find_suite(name);
    if (spec == nullptr) throw ConfigError("suites: unknown suite '" + name + "'");
    if (!seen.insert(name).second)
      throw ConfigError("suites: suite '" + name + "' listed twice");
    if (spec->plain_only && modified)
      throw ConfigError("suites: '" + name + "' requires a plain-flow solution; '" + s.name() +
                        "' uses the potential in the flow");
    if (spec->needs_potential && !s.has_potential())
      throw ConfigError("suites: '" + name + "' requires a solution with a potential; '" +
                        s.name() + "' has none");
    if (cfg.order < spec->min_order)
      throw ConfigError("order: suite '" + name + "' needs jet order >= " +
                        std::to_string(spec->min_order));
  }

  double lo = s.sample_t0();
  double hi = std::min(s.sample_t1(), s.t_max() - cfg.tau - 1e-6 * (s.t_max() - s.t_min()));
  if (!(hi > lo))
    throw ConfigError("tau: offset " + std::to_string(cfg.tau) +
                      " leaves no sampling window inside the solution's time domain");
  if (t_lo != nullptr) *t_lo = lo;
  if (t_hi != nullptr) *t_hi = hi;

  auto check_schedule = [](const std::vector<std::pair<double, double>>& sched,
                           const char* key) {
    for (std::size_t i = 0; i < sched.size(); ++i) {
      if (!(sched[i].first > 0.0) || !(sched[i].second > 0.0))
        throw ConfigError(std::string(key) + ": entries must be positive");
      if (i > 0) {
        bool eps_up = sched[i].first > sched[i - 1].first;
        bool delta_down =
            sched[i].first == sched[i - 1].first && sched[i].second < sched[i - 1].second;
        if (!eps_up && !delta_down)
          throw ConfigError(std::string(key) +
                            ": schedule must increase epsilon or shrink delta at each step");
      }
    }
  };
  check_schedule(cfg.schedule, "sweep");
  check_schedule(cfg.curvature_schedule, "curvature_sweep");
  return names;
}

inline VerificationReport run_suites(const RunConfig& cfg) {
  auto started = std::chrono::steady_clock::now();
  FlowSolution solution = make_solution(cfg.solution, cfg.params);
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<std::string> names = validate_config(cfg, solution, &t_lo, &t_hi);

  VerificationReport report;
  report.config = cfg;
  report.config.suites = names;
  report.pass = true;

  for (const std::string& name : names) {
    const SuiteSpec& spec = *find_suite(name);
    detail::SuiteContext ctx{cfg,
                             solution,
                             uses_potential_in_flow(solution.mode()),
                             solution.has_potential(),
                             t_lo,
                             t_hi};
    std::mt19937_64 rng(cfg.seed ^ detail::fnv1a(name));
    std::vector<detail::SuiteSample> samples;
    samples.reserve(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
      samples.push_back(detail::make_sample(rng, solution.dim(), t_lo, t_hi));

    SuiteResult result = [&] {
      if (name == "flow")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::flow_row(ctx, s);
                                       });
      if (name == "soliton")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::soliton_row(ctx, s);
                                       });
      if (name == "harnack-defs")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::harnack_defs_row(ctx, s);
                                       });
      if (name == "harnack-ineq")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::harnack_ineq_row(ctx, s);
                                       });
      if (name == "spacetime-conn")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::spacetime_conn_row(ctx, s);
                                       });
      if (name == "spacetime-curv")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::spacetime_curv_row(ctx, s);
                                       });
      if (name == "deg-flow")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::deg_flow_row(ctx, s);
                                       });
      if (name == "bianchi")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::bianchi_row(ctx, s);
                                       });
      if (name == "harnack-curvature")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::harnack_curvature_row(ctx, s);
                                       });
      if (name == "approx-conn")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::approx_conn_row(ctx, s);
                                       });
      if (name == "approx-curv")
        return detail::eval_per_sample(spec, ctx, samples,
                                       [&](const detail::SuiteSample& s) {
                                         return detail::approx_curv_row(ctx, s);
                                       });
      return detail::run_limits_suite(spec, ctx, samples, &report.sweep_rows);
    }();
    report.pass = report.pass && result.pass;
    report.suites.push_back(std::move(result));
  }

  auto finished = std::chrono::steady_clock::now();
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(finished - started).count();
  if (cfg.stable_output) report.elapsed_ms = 0.0;
  return report;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline void emit_json_array(std::ostream& os, std::span<const double> values) {
  os << "[";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << (i == 0 ? "" : ", ") << format_double(values[i]);
  os << "]";
}

}  // namespace detail

inline void emit_json(const VerificationReport& report, std::ostream& os) {
  const RunConfig& cfg = report.config;
  os << "{\"config\": {";
  os << "\"solution\": \"" << detail::json_escape(cfg.solution) << "\"";
  os << ", \"dim\": " << cfg.params.dim;
  os << ", \"c0\": " << detail::format_double(cfg.params.c0);
  os << ", \"affine\": ";
  detail::emit_json_array(os, cfg.params.affine);
  os << ", \"tau\": " << detail::format_double(cfg.tau);
  os << ", \"order\": " << cfg.order;
  os << ", \"samples\": " << cfg.samples;
  os << ", \"seed\": " << cfg.seed;
  os << ", \"suites\": [";
  for (std::size_t i = 0; i < cfg.suites.size(); ++i)
    os << (i == 0 ? "" : ", ") << "\"" << detail::json_escape(cfg.suites[i]) << "\"";
  os << "]}";
  os << ", \"suites\": [";
  for (std::size_t s = 0; s < report.suites.size(); ++s) {
    const SuiteResult& suite = report.suites[s];
    os << (s == 0 ? "" : ", ") << "{\"name\": \"" << detail::json_escape(suite.name)
       << "\", \"checks\": [";
    for (std::size_t c = 0; c < suite.checks.size(); ++c) {
      const CheckResult& check = suite.checks[c];
      os << (c == 0 ? "" : ", ") << "{\"id\": \"" << detail::json_escape(check.id) << "\""
         << ", \"anchor\": \"" << detail::json_escape(check.anchor) << "\""
         << ", \"residual\": " << detail::format_double(check.residual)
         << ", \"tolerance\": " << detail::format_double(check.tolerance)
         << ", \"pass\": " << (check.pass ? "true" : "false") << ", \"point\": ";
      detail::emit_json_array(os, check.point);
      os << "}";
    }
    os << "], \"pass\": " << (suite.pass ? "true" : "false") << "}";
  }
  os << "], \"pass\": " << (report.pass ? "true" : "false")
     << ", \"elapsed_ms\": " << detail::format_double(report.elapsed_ms) << "}\n";
}

inline void emit_text(const VerificationReport& report, std::ostream& os) {
  os << "verification of " << report.config.solution << " (dim " << report.config.params.dim
     << ", tau " << report.config.tau << ", order " << report.config.order << ", samples "
     << report.config.samples << ", seed " << report.config.seed << ")\n";
  for (const SuiteResult& suite : report.suites) {
    os << "\n[" << suite.name << "] " << (suite.pass ? "pass" : "FAIL") << "\n";
    for (const CheckResult& check : suite.checks) {
      char line[256];
      std::snprintf(line, sizeof(line), "  %-26s %-28s %11.3e <= %-9.0e %s\n", check.id.c_str(),
                    check.anchor.c_str(), check.residual, check.tolerance,
                    check.pass ? "pass" : "FAIL");
      os << line;
    }
  }
  bool any_fail = false;
  for (const SuiteResult& suite : report.suites)
    for (const CheckResult& check : suite.checks)
      if (!check.pass) {
        if (!any_fail) os << "\nfailing checks:\n";
        any_fail = true;
        os << "  " << suite.name << "/" << check.id << " anchor " << check.anchor
           << " residual " << detail::format_double(check.residual) << " tolerance "
           << detail::format_double(check.tolerance) << "\n";
      }
  os << "\n" << (report.pass ? "PASS" : "FAIL") << " (" << report.elapsed_ms << " ms)\n";
}

inline void emit_sweep_csv(const VerificationReport& report, std::ostream& os) {
  os << "epsilon,delta,conn_err,curv_form_err,gamma000,target_gap\n";
  for (const SweepEntry& e : report.sweep_rows)
    os << detail::format_double(e.eps) << "," << detail::format_double(e.delta) << ","
       << detail::format_double(e.conn_err) << "," << detail::format_double(e.curv_form_err)
       << "," << detail::format_double(e.gamma000) << "," << detail::format_double(e.target_gap)
       << "\n";
}

namespace detail {

// Line-based subset of TOML: [table] headers, key = value pairs, strings,
// numbers, booleans, and flat arrays of numbers or strings.
struct TomlValue {
  enum class Kind { String, Number, Boolean, NumberArray, StringArray } kind;
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<double> numbers;
  std::vector<std::string> strings;
};

inline std::string toml_trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string toml_strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline TomlValue toml_parse_scalar(const std::string& raw, int line_no) {
  TomlValue v{};
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    v.kind = TomlValue::Kind::String;
    v.text = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = raw == "true";
    return v;
  }
  char* end = nullptr;
  double num = std::strtod(raw.c_str(), &end);
  if (end != raw.c_str() && *end == '\0') {
    v.kind = TomlValue::Kind::Number;
    v.number = num;
    return v;
  }
  throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value '" + raw +
                    "'");
}

inline TomlValue toml_parse_value(const std::string& raw, int line_no) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
    TomlValue v{};
    v.kind = TomlValue::Kind::NumberArray;
    std::string body = raw.substr(1, raw.size() - 2);
    std::size_t pos = 0;
    bool first = true;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string item = toml_trim(comma == std::string::npos ? body.substr(pos)
                                                              : body.substr(pos, comma - pos));
      if (!item.empty()) {
        TomlValue scalar = toml_parse_scalar(item, line_no);
        if (scalar.kind == TomlValue::Kind::String) {
          if (first) v.kind = TomlValue::Kind::StringArray;
          if (v.kind != TomlValue::Kind::StringArray)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": mixed array element types");
          v.strings.push_back(scalar.text);
        } else if (scalar.kind == TomlValue::Kind::Number) {
          if (v.kind != TomlValue::Kind::NumberArray)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": mixed array element types");
          v.numbers.push_back(scalar.number);
        } else {
          throw ConfigError("config line " + std::to_string(line_no) +
                            ": arrays hold numbers or strings only");
        }
        first = false;
      } else if (comma != std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty array element");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return v;
  }
  return toml_parse_scalar(raw, line_no);
}

inline std::map<std::string, TomlValue> toml_parse(std::istream& in) {
  std::map<std::string, TomlValue> out;
  std::string prefix;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = toml_trim(toml_strip_comment(line));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed table header");
      prefix = toml_trim(text.substr(1, text.size() - 2));
      if (prefix.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty table name");
      continue;
    }
    std::size_t eq = std::string::npos;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') in_string = !in_string;
      if (text[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = toml_trim(text.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
      key = key.substr(1, key.size() - 2);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    std::string full = prefix.empty() ? key : prefix + "." + key;
    if (out.count(full) != 0)
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + full +
                        "'");
    out.emplace(full, toml_parse_value(toml_trim(text.substr(eq + 1)), line_no));
  }
  return out;
}

inline double toml_number(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::Number)
    throw ConfigError("config: key '" + key + "' must be a number");
  return v.number;
}

inline std::vector<std::pair<double, double>> paired_schedule(
    const std::map<std::string, TomlValue>& values, const std::string& table) {
  auto eps_it = values.find(table + ".epsilon");
  auto delta_it = values.find(table + ".delta");
  if (eps_it == values.end() && delta_it == values.end()) return {};
  if (eps_it == values.end() || delta_it == values.end())
    throw ConfigError("config: [" + table + "] needs both epsilon and delta arrays");
  if (eps_it->second.kind != TomlValue::Kind::NumberArray ||
      delta_it->second.kind != TomlValue::Kind::NumberArray)
    throw ConfigError("config: [" + table + "] epsilon and delta must be number arrays");
  if (eps_it->second.numbers.size() != delta_it->second.numbers.size())
    throw ConfigError("config: [" + table + "] epsilon and delta must have equal length");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < eps_it->second.numbers.size(); ++i)
    out.emplace_back(eps_it->second.numbers[i], delta_it->second.numbers[i]);
  return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  std::map<std::string, detail::TomlValue> values = detail::toml_parse(in);
  RunConfig cfg;
  std::set<std::string> consumed;
  auto take = [&](const std::string& key) -> const detail::TomlValue* {
    auto it = values.find(key);
    if (it == values.end()) return nullptr;
    consumed.insert(key);
    return &it->second;
  };

  if (const auto* v = take("solution")) {
    if (v->kind != detail::TomlValue::Kind::String)
      throw ConfigError("config: key 'solution' must be a string");
    cfg.solution = v->text;
  }
  if (const auto* v = take("dim")) cfg.params.dim = static_cast<int>(detail::toml_number(*v, "dim"));
  if (const auto* v = take("c0")) cfg.params.c0 = detail::toml_number(*v, "c0");
  if (const auto* v = take("affine")) {
    if (v->kind != detail::TomlValue::Kind::NumberArray)
      throw ConfigError("config: key 'affine' must be a number array");
    cfg.params.affine = v->numbers;
  }
  if (const auto* v = take("tau")) cfg.tau = detail::toml_number(*v, "tau");
  if (const auto* v = take("order"))
    cfg.order = static_cast<int>(detail::toml_number(*v, "order"));
  if (const auto* v = take("samples"))
    cfg.samples = static_cast<int>(detail::toml_number(*v, "samples"));
  if (const auto* v = take("seed")) {
    double num = detail::toml_number(*v, "seed");
    if (num < 0.0) throw ConfigError("config: key 'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(num);
  }
  if (const auto* v = take("suites")) {
    if (v->kind != detail::TomlValue::Kind::StringArray)
      throw ConfigError("config: key 'suites' must be a string array");
    cfg.suites = v->strings;
  }
  if (const auto* v = take("approx_epsilon"))
    cfg.approx_epsilon = detail::toml_number(*v, "approx_epsilon");
  if (const auto* v = take("approx_delta"))
    cfg.approx_delta = detail::toml_number(*v, "approx_delta");
  if (const auto* v = take("out")) {
    if (v->kind != detail::TomlValue::Kind::String)
      throw ConfigError("config: key 'out' must be a string");
    cfg.out_dir = v->text;
  }
  if (const auto* v = take("format")) {
    if (v->kind != detail::TomlValue::Kind::String)
      throw ConfigError("config: key 'format' must be a string");
    cfg.format = v->text;
  }
  if (const auto* v = take("stable_output")) {
    if (v->kind != detail::TomlValue::Kind::Boolean)
      throw ConfigError("config: key 'stable_output' must be a boolean");
    cfg.stable_output = v->boolean;
  }
  for (const auto& [key, value] : values) {
    if (key.rfind("tolerances.", 0) == 0) {
      cfg.tolerances[key.substr(11)] = detail::toml_number(value, key);
      consumed.insert(key);
    }
  }
  cfg.schedule = detail::paired_schedule(values, "sweep");
  consumed.insert("sweep.epsilon");
  consumed.insert("sweep.delta");
  cfg.curvature_schedule = detail::paired_schedule(values, "curvature_sweep");
  consumed.insert("curvature_sweep.epsilon");
  consumed.insert("curvature_sweep.delta");

  for (const auto& [key, value] : values)
    if (consumed.count(key) == 0) throw ConfigError("config: unknown key '" + key + "'");
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

inline void write_outputs(const VerificationReport& report) {
  if (report.config.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::path dir(report.config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("out: cannot create directory '" + report.config.out_dir + "'");
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw ConfigError(std::string("out: cannot write '") + name + "'");
    return os;
  };
  {
    std::ofstream os = open("report.json");
    emit_json(report, os);
  }
  {
    std::ofstream os = open("report.txt");
    emit_text(report, os);
  }
  if (!report.sweep_rows.empty()) {
    std::ofstream os = open("sweep.csv");
    emit_sweep_csv(report, os);
  }
}

inline int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  try {
    std::string config_path;
    std::vector<std::string> suite_overrides;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::optional<std::string> format_override;
    bool stable_override = false;

    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& arg = args[i];
      auto next = [&]() -> const std::string& {
        if (i + 1 >= args.size()) throw ConfigError("flag " + arg + " needs a value");
        return args[++i];
      };
      if (arg == "--config") {
        config_path = next();
      } else if (arg == "--suite") {
        suite_overrides.push_back(next());
      } else if (arg == "--seed") {
        const std::string& text = next();
        char* end = nullptr;
        unsigned long long v = std::strtoull(text.c_str(), &end, 10);
        if (end == text.c_str() || *end != '\0')
          throw ConfigError("--seed needs an unsigned integer");
        seed_override = v;
      } else if (arg == "--out") {
        out_override = next();
      } else if (arg == "--format") {
        format_override = next();
      } else if (arg == "--stable-output") {
        stable_override = true;
      } else if (arg == "--help") {
        out << "usage: harnack-lab [--config file.toml] [--suite name ...] [--seed n]\n"
               "                   [--out dir] [--format json|text] [--stable-output]\n";
        return 0;
      } else {
        throw ConfigError("unknown flag '" + arg + "'");
      }
    }

    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    if (!suite_overrides.empty()) cfg.suites = suite_overrides;
    if (seed_override) cfg.seed = *seed_override;
    if (out_override) cfg.out_dir = *out_override;
    if (format_override) cfg.format = *format_override;
    if (stable_override) cfg.stable_output = true;

    VerificationReport report = run_suites(cfg);
    if (cfg.format == "json")
      emit_json(report, out);
    else
      emit_text(report, out);
    write_outputs(report);
    return report.pass ? 0 : 1;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hlab
