#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"

namespace hlab {

// Coefficient layout for truncated multivariate Taylor expansions: every
// exponent tuple with total degree <= order, listed degree by degree in
// lexicographic order within each degree.  Because low degrees come first,
// the order-(K-1) layout is a prefix of the order-K layout for the same
// variable count, which lets jets of different orders share coefficient
// positions.
class JetLayout {
 public:
  static const JetLayout& get(int num_vars, int order) {
    if (num_vars < 1 || num_vars > 8) throw ShapeError("jet layout: variable count out of range");
    if (order < 0 || order > 10) throw OrderExceededError("jet layout: order out of range");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(num_vars, order);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, std::unique_ptr<JetLayout>(new JetLayout(num_vars, order))).first;
    return *it->second;
  }

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  int size() const { return size_; }

  std::span<const int> exponents(int pos) const {
    return {exps_.data() + static_cast<std::size_t>(pos) * num_vars_,
            static_cast<std::size_t>(num_vars_)};
  }
  int degree(int pos) const { return degree_[pos]; }
  // First position of total degree d; size() when d exceeds the order.
  int degree_begin(int d) const { return d > order_ ? size_ : degree_begin_[d]; }
  // Position of an exponent tuple, -1 when its degree exceeds the order.
  int position(std::span<const int> exps) const {
    auto it = index_.find(std::vector<int>(exps.begin(), exps.end()));
    return it == index_.end() ? -1 : it->second;
  }
  // Position of exponents(a) + exponents(b), -1 on degree overflow.
  int product_position(int a, int b) const { return prod_[static_cast<std::size_t>(a) * size_ + b]; }
  // Position of exponents(pos) + e_var, -1 on degree overflow.
  int raise_position(int pos, int var) const {
    return raise_[static_cast<std::size_t>(pos) * num_vars_ + var];
  }

  JetLayout(const JetLayout&) = delete;
  JetLayout& operator=(const JetLayout&) = delete;

 private:
  JetLayout(int num_vars, int order) : num_vars_(num_vars), order_(order) {
    std::vector<int> tuple(num_vars, 0);
    degree_begin_.resize(order + 1, 0);
    for (int d = 0; d <= order; ++d) {
      degree_begin_[d] = static_cast<int>(degree_.size());
      emit_degree(tuple, 0, d);
    }
    size_ = static_cast<int>(degree_.size());
    for (int pos = 0; pos < size_; ++pos)
      index_.emplace(std::vector<int>(exponents(pos).begin(), exponents(pos).end()), pos);

    prod_.assign(static_cast<std::size_t>(size_) * size_, -1);
    std::vector<int> sum(num_vars);
    for (int a = 0; a < size_; ++a)
      for (int b = 0; b < size_; ++b) {
        if (degree_[a] + degree_[b] > order) continue;
        auto ea = exponents(a);
        auto eb = exponents(b);
        for (int v = 0; v < num_vars; ++v) sum[v] = ea[v] + eb[v];
        prod_[static_cast<std::size_t>(a) * size_ + b] = position(sum);
      }

    raise_.assign(static_cast<std::size_t>(size_) * num_vars, -1);
    for (int pos = 0; pos < size_; ++pos)
      for (int v = 0; v < num_vars; ++v) {
        if (degree_[pos] + 1 > order) continue;
        auto e = exponents(pos);
        std::vector<int> up(e.begin(), e.end());
        ++up[v];
        raise_[static_cast<std::size_t>(pos) * num_vars + v] = position(up);
      }
  }

  void emit_degree(std::vector<int>& tuple, int var, int remaining) {
    if (var == num_vars_ - 1) {
      tuple[var] = remaining;
      exps_.insert(exps_.end(), tuple.begin(), tuple.end());
      degree_.push_back(remaining + sum_prefix(tuple, var));
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      tuple[var] = e;
      emit_degree(tuple, var + 1, remaining - e);
    }
    tuple[var] = 0;
  }

  static int sum_prefix(const std::vector<int>& tuple, int var) {
    int s = 0;
    for (int v = 0; v < var; ++v) s += tuple[v];
    return s;
  }

  int num_vars_, order_, size_ = 0;
  std::vector<int> exps_;
  std::vector<int> degree_;
  std::vector<int> degree_begin_;
  std::vector<std::int32_t> prod_;
  std::vector<std::int32_t> raise_;
  std::map<std::vector<int>, int> index_;
};

// Truncated Taylor expansion of a scalar quantity around a base point.
// Arithmetic between jets with the same variable count is defined up to the
// smaller of the two orders; elementary functions compose through their
// univariate series.
class Jet {
 public:
  Jet() : Jet(JetLayout::get(1, 0), 0.0) {}
  Jet(const JetLayout& layout, double constant) : layout_(&layout), c_(layout.size(), 0.0) {
    c_[0] = constant;
  }

  static Jet constant(const JetLayout& layout, double v) { return Jet(layout, v); }
  static Jet variable(const JetLayout& layout, int var, double base_value) {
    if (var < 0 || var >= layout.num_vars()) throw ShapeError("jet variable index out of range");
    Jet j(layout, base_value);
    if (layout.order() >= 1) {
      std::vector<int> e(layout.num_vars(), 0);
      e[var] = 1;
      j.c_[layout.position(e)] = 1.0;
    }
    return j;
  }

  const JetLayout& layout() const { return *layout_; }
  int num_vars() const { return layout_->num_vars(); }
  int order() const { return layout_->order(); }
  double value() const { return c_[0]; }
  double coeff(int pos) const { return c_[pos]; }
  double& coeff(int pos) { return c_[pos]; }

  // Value of the mixed partial derivative with the given exponent tuple.
  double partial(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != num_vars())
      throw ShapeError("partial-derivative index has wrong variable count");
    long long deg = 0;
    for (int e : idx) {
      if (e < 0) throw ShapeError("negative derivative order");
      deg += e;
    }
    if (deg > order())
      throw OrderExceededError("derivative order exceeds the jet's truncation order");
    int pos = layout_->position(idx);
    double fact = 1.0;
    for (int e : idx)
      for (int k = 2; k <= e; ++k) fact *= k;
    return c_[pos] * fact;
  }

  // The jet of the first partial derivative with respect to one variable;
  // the truncation order drops by one.
  Jet derivative(int var) const {
    if (var < 0 || var >= num_vars()) throw ShapeError("jet variable index out of range");
    if (order() < 1)
      throw OrderExceededError("cannot differentiate an order-0 jet; raise the jet order");
    const JetLayout& out = JetLayout::get(num_vars(), order() - 1);
    Jet r(out, 0.0);
    for (int p = 0; p < out.size(); ++p) {
      int src = layout_->raise_position(p, var);
      r.c_[p] = c_[src] * (layout_->exponents(p)[var] + 1);
    }
    return r;
  }

  Jet truncated(int new_order) const {
    if (new_order >= order()) return *this;
    if (new_order < 0) throw OrderExceededError("negative truncation order");
    const JetLayout& out = JetLayout::get(num_vars(), new_order);
    Jet r(out, 0.0);
    for (int p = 0; p < out.size(); ++p) r.c_[p] = c_[p];
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    auto [pa, pb, out] = aligned(a, b);
    Jet r(*out, 0.0);
    for (int p = 0; p < out->size(); ++p) r.c_[p] = pa->c_[p] + pb->c_[p];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    auto [pa, pb, out] = aligned(a, b);
    Jet r(*out, 0.0);
    for (int p = 0; p < out->size(); ++p) r.c_[p] = pa->c_[p] - pb->c_[p];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    auto [pa, pb, out] = aligned(a, b);
    Jet r(*out, 0.0);
    const int order = out->order();
    for (int i = 0; i < out->size(); ++i) {
      const double ai = pa->c_[i];
      if (ai == 0.0) continue;
      const int jmax = out->degree_begin(order - out->degree(i) + 1);
      for (int j = 0; j < jmax; ++j) {
        const double bj = pb->c_[j];
        if (bj == 0.0) continue;
        r.c_[out->product_position(i, j)] += ai * bj;
      }
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator*(const Jet& a, double s) {
    Jet r = a;
    for (double& v : r.c_) v *= s;
    return r;
  }
  friend Jet operator*(double s, const Jet& a) { return a * s; }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& a) { return recip(a) * s; }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

  // sum_k c[k] (a - a0)^k evaluated by Horner's scheme in jet arithmetic.
  friend Jet compose_series(const Jet& a, std::span<const double> series) {
    Jet h = a;
    h.c_[0] = 0.0;
    Jet r = Jet::constant(a.layout(), series.empty() ? 0.0 : series.back());
    for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
      r = r * h;
      r.c_[0] += series[k];
    }
    return r;
  }

  friend Jet exp(const Jet& a) {
    const int K = a.order();
    std::vector<double> c(K + 1);
    c[0] = std::exp(a.value());
    for (int k = 1; k <= K; ++k) c[k] = c[k - 1] / k;
    return compose_series(a, c);
  }
  friend Jet log(const Jet& a) {
    if (!(a.value() > 0.0)) throw DerivativeDomainError("log of non-positive constant term", a.value());
    const int K = a.order();
    std::vector<double> c(K + 1);
    c[0] = std::log(a.value());
    double pw = 1.0;
    for (int k = 1; k <= K; ++k) {
      pw *= a.value();
      c[k] = ((k % 2) ? 1.0 : -1.0) / (k * pw);
    }
    return compose_series(a, c);
  }
  friend Jet sqrt(const Jet& a) {
    if (!(a.value() > 0.0)) throw DerivativeDomainError("sqrt of non-positive constant term", a.value());
    const int K = a.order();
    std::vector<double> c(K + 1);
    c[0] = std::sqrt(a.value());
    for (int k = 1; k <= K; ++k) c[k] = c[k - 1] * (1.5 / k - 1.0) / a.value();
    return compose_series(a, c);
  }
  friend Jet pow(const Jet& a, double p) {
    if (!(a.value() > 0.0))
      throw DerivativeDomainError("pow of non-positive constant term", a.value());
    const int K = a.order();
    std::vector<double> c(K + 1);
    c[0] = std::pow(a.value(), p);
    for (int k = 1; k <= K; ++k) c[k] = c[k - 1] * ((p - k + 1) / k) / a.value();
    return compose_series(a, c);
  }
  friend Jet recip(const Jet& a) {
    if (a.value() == 0.0) throw DerivativeDomainError("reciprocal of zero constant term", a.value());
    const int K = a.order();
    std::vector<double> c(K + 1);
    c[0] = 1.0 / a.value();
    for (int k = 1; k <= K; ++k) c[k] = -c[k - 1] / a.value();
    return compose_series(a, c);
  }

 private:
  // Views a pair of jets at their common (minimum) order.  The prefix
  // property of the layouts makes the coefficient arrays directly
  // compatible, so no copying is needed.
  static std::tuple<const Jet*, const Jet*, const JetLayout*> aligned(const Jet& a, const Jet& b) {
    if (a.num_vars() != b.num_vars())
      throw ShapeError("jet arithmetic requires matching variable counts");
    const JetLayout* out =
        a.order() <= b.order() ? &a.layout() : &b.layout();
    return {&a, &b, out};
  }

  const JetLayout* layout_;
  std::vector<double> c_;
};

// Named tags for the elementary-function dispatcher.
enum class JetFn { Exp, Log, Sqrt, Pow, Recip };

inline Jet jet_map(JetFn fn, const Jet& a, double p = 0.0) {
  switch (fn) {
    case JetFn::Exp:
      return exp(a);
    case JetFn::Log:
      return log(a);
    case JetFn::Sqrt:
      return sqrt(a);
    case JetFn::Pow:
      return pow(a, p);
    case JetFn::Recip:
      return recip(a);
  }
  throw ShapeError("unknown jet function tag");
}

}  // namespace hlab
