#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/jet.hpp"

namespace hlab {

enum class Var { Up, Down };

// Index range of a tensor: purely spatial (indices 0..n-1 name the chart
// coordinates) or space-time (index 0 is time, indices 1..n are spatial).
enum class Range { Spatial, Spacetime };

// Jet variable that differentiates in coordinate direction i of the given
// range.  Jet variable 0 is always time and variables 1..n the spatial chart,
// so spatial direction i maps to jet variable i + 1.
inline int jet_var_of(Range range, int internal) {
  return range == Range::Spatial ? internal + 1 : internal;
}

inline double zero_like(double) { return 0.0; }
inline Jet zero_like(const Jet& j) { return Jet::constant(j.layout(), 0.0); }

// Dense tensor of fixed rank over a spatial or space-time index range, with
// per-slot variance.  Entries are doubles or jets.
template <class T>
class Tensor {
 public:
  Tensor(Range range, int dim, std::vector<Var> variance, const T& fill)
      : range_(range), dim_(dim), variance_(std::move(variance)) {
    if (dim_ < 1) throw ShapeError("tensor dimension must be positive");
    std::size_t n = 1;
    for (std::size_t s = 0; s < variance_.size(); ++s) n *= static_cast<std::size_t>(extent());
    data_.assign(n, fill);
  }

  Range range() const { return range_; }
  int dim() const { return dim_; }
  int extent() const { return range_ == Range::Spatial ? dim_ : dim_ + 1; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const std::vector<Var>& variance() const { return variance_; }

  const T& at(std::span<const int> idx) const { return data_[flat(idx)]; }
  T& at(std::span<const int> idx) { return data_[flat(idx)]; }

  template <class... I>
  const T& operator()(I... is) const {
    std::array<int, sizeof...(I)> idx{static_cast<int>(is)...};
    return at(std::span<const int>(idx));
  }
  template <class... I>
  T& operator()(I... is) {
    std::array<int, sizeof...(I)> idx{static_cast<int>(is)...};
    return at(std::span<const int>(idx));
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Tensor& o) const {
    return range_ == o.range_ && dim_ == o.dim_ && variance_ == o.variance_;
  }

  friend Tensor operator+(const Tensor& a, const Tensor& b) {
    a.require_same_shape(b);
    Tensor r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] + b.data_[i];
    return r;
  }
  friend Tensor operator-(const Tensor& a, const Tensor& b) {
    a.require_same_shape(b);
    Tensor r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] - b.data_[i];
    return r;
  }
  friend Tensor operator*(const Tensor& a, double s) {
    Tensor r = a;
    for (auto& v : r.data_) v = v * s;
    return r;
  }
  friend Tensor operator*(double s, const Tensor& a) { return a * s; }
  Tensor operator-() const { return *this * -1.0; }

 private:
  void require_same_shape(const Tensor& o) const {
    if (!same_shape(o)) throw ShapeError("tensor shapes do not match");
  }
  std::size_t flat(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw ShapeError("tensor index has wrong rank");
    std::size_t pos = 0;
    for (int v : idx) {
      if (v < 0 || v >= extent()) throw ShapeError("tensor index out of range");
      pos = pos * static_cast<std::size_t>(extent()) + static_cast<std::size_t>(v);
    }
    return pos;
  }

  Range range_;
  int dim_;
  std::vector<Var> variance_;
  std::vector<T> data_;
};

// Calls f with every multi-index of the given rank over [0, extent).
template <class F>
void for_each_index(int extent, int rank, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  while (true) {
    f(std::span<const int>(idx));
    int s = rank - 1;
    for (; s >= 0; --s) {
      if (++idx[s] < extent) break;
      idx[s] = 0;
    }
    if (s < 0) break;
  }
}

inline Tensor<double> values_of(const Tensor<Jet>& t) {
  Tensor<double> r(t.range(), t.dim(), t.variance(), 0.0);
  for (std::size_t i = 0; i < t.data().size(); ++i) r.data()[i] = t.data()[i].value();
  return r;
}

inline double max_abs(const Tensor<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_value(const Tensor<Jet>& t) {
  double m = 0.0;
  for (const Jet& v : t.data()) m = std::max(m, std::abs(v.value()));
  return m;
}

// Largest |T(..a..b..) - T(..b..a..)| over entry values when slots s1, s2
// are exchanged.
inline double max_symmetry_defect(const Tensor<double>& t, int s1, int s2) {
  double m = 0.0;
  std::vector<int> sw(static_cast<std::size_t>(t.rank()));
  for_each_index(t.extent(), t.rank(), [&](std::span<const int> idx) {
    sw.assign(idx.begin(), idx.end());
    std::swap(sw[s1], sw[s2]);
    m = std::max(m, std::abs(t.at(idx) - t.at(sw)));
  });
  return m;
}

}  // namespace hlab
