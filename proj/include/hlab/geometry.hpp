#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlab/errors.hpp"
#include "hlab/jet.hpp"
#include "hlab/tensor.hpp"

namespace hlab {

inline bool all_coeffs_zero(const Jet& j) {
  for (int p = 0; p < j.layout().size(); ++p)
    if (j.coeff(p) != 0.0) return false;
  return true;
}

// Inverse of a symmetric rank-2 tensor with Down,Down variance, computed by
// Gauss-Jordan elimination in jet arithmetic with pivoting on the constant
// terms.
inline Tensor<Jet> invert_symmetric(const Tensor<Jet>& g) {
  if (g.rank() != 2) throw ShapeError("metric inverse requires a rank-2 tensor");
  const int e = g.extent();
  const Jet zero = zero_like(g(0, 0));
  std::vector<std::vector<Jet>> a(e, std::vector<Jet>(e, zero));
  std::vector<std::vector<Jet>> inv(e, std::vector<Jet>(e, zero));
  for (int i = 0; i < e; ++i) {
    for (int j = 0; j < e; ++j) a[i][j] = g(i, j);
    inv[i][i] = zero + 1.0;
  }
  for (int col = 0; col < e; ++col) {
    int piv = col;
    for (int r = col + 1; r < e; ++r)
      if (std::abs(a[r][col].value()) > std::abs(a[piv][col].value())) piv = r;
    if (std::abs(a[piv][col].value()) < 1e-13)
      throw SingularMetricError("metric is singular at the base point");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Jet s = recip(a[col][col]);
    for (int j = 0; j < e; ++j) {
      a[col][j] = a[col][j] * s;
      inv[col][j] = inv[col][j] * s;
    }
    for (int r = 0; r < e; ++r) {
      if (r == col) continue;
      Jet f = a[r][col];
      if (all_coeffs_zero(f)) continue;
      for (int j = 0; j < e; ++j) {
        a[r][j] = a[r][j] - f * a[col][j];
        inv[r][j] = inv[r][j] - f * inv[col][j];
      }
    }
  }
  Tensor<Jet> out(g.range(), g.dim(), {Var::Up, Var::Up}, zero);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) out(i, j) = inv[i][j];
  return out;
}

// Coordinate derivative of every entry in direction i of the tensor's range;
// the jets lose one order.
inline Tensor<Jet> partial_derivative(const Tensor<Jet>& t, int direction) {
  const int var = jet_var_of(t.range(), direction);
  Tensor<Jet> r(t.range(), t.dim(), t.variance(), t.data()[0].derivative(var));
  for (std::size_t i = 0; i < t.data().size(); ++i) r.data()[i] = t.data()[i].derivative(var);
  return r;
}

// Time derivative of every entry (jet variable 0).
inline Tensor<Jet> time_derivative(const Tensor<Jet>& t) {
  Tensor<Jet> r(t.range(), t.dim(), t.variance(), t.data()[0].derivative(0));
  for (std::size_t i = 0; i < t.data().size(); ++i) r.data()[i] = t.data()[i].derivative(0);
  return r;
}

// Levi-Civita connection coefficients, stored as at(k, i, j) = Gamma^k_{ij}.
inline Tensor<Jet> christoffel(const Tensor<Jet>& g, const Tensor<Jet>& g_inv) {
  const int e = g.extent();
  std::vector<Tensor<Jet>> dg;
  dg.reserve(e);
  for (int l = 0; l < e; ++l) dg.push_back(partial_derivative(g, l));
  Tensor<Jet> gamma(g.range(), g.dim(), {Var::Up, Var::Down, Var::Down},
                    zero_like(dg[0](0, 0)));
  for (int k = 0; k < e; ++k)
    for (int i = 0; i < e; ++i)
      for (int j = i; j < e; ++j) {
        Jet sum = zero_like(dg[0](0, 0));
        for (int l = 0; l < e; ++l)
          sum += g_inv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        gamma(k, i, j) = sum * 0.5;
        gamma(k, j, i) = gamma(k, i, j);
      }
  return gamma;
}

// Curvature of a (not necessarily metric) connection:
//   at(i, j, k, l) = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
//                  + Gamma^m_{jk} Gamma^l_{im} - Gamma^m_{ik} Gamma^l_{jm}.
inline Tensor<Jet> curvature_from_connection(const Tensor<Jet>& gamma) {
  const int e = gamma.extent();
  std::vector<Tensor<Jet>> dgamma;
  dgamma.reserve(e);
  for (int i = 0; i < e; ++i) dgamma.push_back(partial_derivative(gamma, i));
  Tensor<Jet> rm(gamma.range(), gamma.dim(), {Var::Down, Var::Down, Var::Down, Var::Up},
                 zero_like(dgamma[0](0, 0, 0)));
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      if (j == i) continue;
      for (int k = 0; k < e; ++k)
        for (int l = 0; l < e; ++l) {
          Jet sum = dgamma[i](l, j, k) - dgamma[j](l, i, k);
          for (int m = 0; m < e; ++m)
            sum += gamma(m, j, k) * gamma(l, i, m) - gamma(m, i, k) * gamma(l, j, m);
          rm(i, j, k, l) = sum;
        }
    }
  return rm;
}

// at(j, k) = sum_p at(p, j, k, p) of the curvature: positive on the round
// sphere in this sign convention.
inline Tensor<Jet> ricci_from_curvature(const Tensor<Jet>& rm) {
  const int e = rm.extent();
  Tensor<Jet> ric(rm.range(), rm.dim(), {Var::Down, Var::Down}, zero_like(rm(0, 0, 0, 0)));
  for (int j = 0; j < e; ++j)
    for (int k = 0; k < e; ++k) {
      Jet sum = zero_like(rm(0, 0, 0, 0));
      for (int p = 0; p < e; ++p) sum += rm(p, j, k, p);
      ric(j, k) = sum;
    }
  return ric;
}

inline Jet scalar_from_ricci(const Tensor<Jet>& ric, const Tensor<Jet>& g_inv) {
  const int e = ric.extent();
  Jet sum = zero_like(ric(0, 0));
  for (int j = 0; j < e; ++j)
    for (int k = 0; k < e; ++k) sum += g_inv(j, k) * ric(j, k);
  return sum;
}

// Covariant derivative with the derivative slot prepended:
//   (grad T)(i, a1..ar) = d_i T(a1..ar) + corrections per slot variance.
// Works on any rank, including scalars.
inline Tensor<Jet> covariant_derivative(const Tensor<Jet>& t, const Tensor<Jet>& gamma) {
  if (t.range() != gamma.range() || t.dim() != gamma.dim())
    throw ShapeError("tensor and connection ranges do not match");
  const int e = t.extent();
  const int rank = t.rank();
  std::vector<Tensor<Jet>> dt;
  dt.reserve(e);
  for (int i = 0; i < e; ++i) dt.push_back(partial_derivative(t, i));
  std::vector<Var> variance;
  variance.reserve(rank + 1);
  variance.push_back(Var::Down);
  variance.insert(variance.end(), t.variance().begin(), t.variance().end());
  Tensor<Jet> r(t.range(), t.dim(), variance, zero_like(dt[0].data()[0]));
  std::vector<int> sub(static_cast<std::size_t>(rank));
  for_each_index(e, rank + 1, [&](std::span<const int> idx) {
    const int i = idx[0];
    std::span<const int> a = idx.subspan(1);
    Jet val = dt[i].at(a);
    sub.assign(a.begin(), a.end());
    for (int s = 0; s < rank; ++s) {
      const int as = a[s];
      Jet corr = zero_like(val);
      for (int m = 0; m < e; ++m) {
        sub[s] = m;
        if (t.variance()[s] == Var::Up)
          corr += gamma(as, i, m) * t.at(sub);
        else
          corr -= gamma(m, i, as) * t.at(sub);
      }
      sub[s] = as;
      val += corr;
    }
    r.at(idx) = val;
  });
  return r;
}

// Contraction of an Up slot with a Down slot by direct summation.
template <class T>
Tensor<T> contract(const Tensor<T>& t, int s1, int s2) {
  if (s1 == s2 || t.variance()[s1] == t.variance()[s2])
    throw ShapeError("contraction requires one Up and one Down slot");
  const int e = t.extent();
  std::vector<Var> variance;
  for (int s = 0; s < t.rank(); ++s)
    if (s != s1 && s != s2) variance.push_back(t.variance()[s]);
  Tensor<T> r(t.range(), t.dim(), variance, zero_like(t.data()[0]));
  std::vector<int> full(static_cast<std::size_t>(t.rank()));
  for_each_index(e, t.rank() - 2, [&](std::span<const int> idx) {
    T sum = zero_like(t.data()[0]);
    for (int m = 0; m < e; ++m) {
      int pos = 0;
      for (int s = 0; s < t.rank(); ++s)
        full[s] = (s == s1 || s == s2) ? m : idx[pos++];
      sum = sum + t.at(full);
    }
    r.at(idx) = sum;
  });
  return r;
}

// Contraction of two same-variance slots through a rank-2 metric tensor
// (metric inverse for Down-Down slots, metric for Up-Up slots).
template <class T>
Tensor<T> contract_metric(const Tensor<T>& t, int s1, int s2, const Tensor<T>& metric) {
  if (s1 == s2 || t.variance()[s1] != t.variance()[s2])
    throw ShapeError("metric contraction requires two same-variance slots");
  const int e = t.extent();
  std::vector<Var> variance;
  for (int s = 0; s < t.rank(); ++s)
    if (s != s1 && s != s2) variance.push_back(t.variance()[s]);
  Tensor<T> r(t.range(), t.dim(), variance, zero_like(t.data()[0]));
  std::vector<int> full(static_cast<std::size_t>(t.rank()));
  for_each_index(e, t.rank() - 2, [&](std::span<const int> idx) {
    T sum = zero_like(t.data()[0]);
    for (int m1 = 0; m1 < e; ++m1)
      for (int m2 = 0; m2 < e; ++m2) {
        int pos = 0;
        for (int s = 0; s < t.rank(); ++s)
          full[s] = s == s1 ? m1 : (s == s2 ? m2 : idx[pos++]);
        sum = sum + metric(m1, m2) * t.at(full);
      }
    r.at(idx) = sum;
  });
  return r;
}

// Flips the variance of one slot through the metric: pass the inverse metric
// to raise a Down slot, the metric to lower an Up slot.
template <class T>
Tensor<T> flip_slot(const Tensor<T>& t, int slot, const Tensor<T>& metric) {
  const int e = t.extent();
  std::vector<Var> variance = t.variance();
  variance[slot] = variance[slot] == Var::Up ? Var::Down : Var::Up;
  Tensor<T> r(t.range(), t.dim(), variance, zero_like(t.data()[0]));
  std::vector<int> src(static_cast<std::size_t>(t.rank()));
  for_each_index(e, t.rank(), [&](std::span<const int> idx) {
    T sum = zero_like(t.data()[0]);
    src.assign(idx.begin(), idx.end());
    for (int m = 0; m < e; ++m) {
      src[slot] = m;
      sum = sum + metric(idx[slot], m) * t.at(src);
    }
    r.at(idx) = sum;
  });
  return r;
}

// Fully lowered curvature at(i, j, k, l) = g_{lm} at(i, j, k, m).
inline Tensor<Jet> lower_curvature(const Tensor<Jet>& rm, const Tensor<Jet>& g) {
  return flip_slot(rm, 3, g);
}

// Trace Laplacian g^{ij} grad_i grad_j applied entrywise.
inline Tensor<Jet> rough_laplacian(const Tensor<Jet>& t, const Tensor<Jet>& g_inv,
                                   const Tensor<Jet>& gamma) {
  return contract_metric(covariant_derivative(covariant_derivative(t, gamma), gamma), 0, 1, g_inv);
}

// Codifferential of a 1-form: -g^{ij} grad_i W_j.
inline Jet codifferential(const Tensor<Jet>& w, const Tensor<Jet>& g_inv,
                          const Tensor<Jet>& gamma) {
  Tensor<Jet> dw = covariant_derivative(w, gamma);
  Jet sum = zero_like(dw(0, 0));
  for (int i = 0; i < w.extent(); ++i)
    for (int j = 0; j < w.extent(); ++j) sum += g_inv(i, j) * dw(i, j);
  return -sum;
}

// Laplacian -(d delta + delta d) on 1-forms; on a negative spectrum like the
// trace Laplacian.
inline Tensor<Jet> hodge_laplacian_one_form(const Tensor<Jet>& w, const Tensor<Jet>& g_inv,
                                            const Tensor<Jet>& gamma) {
  const int e = w.extent();
  Jet delta_w = codifferential(w, g_inv, gamma);
  Tensor<Jet> nabla_w = covariant_derivative(w, gamma);
  Tensor<Jet> beta(w.range(), w.dim(), {Var::Down, Var::Down}, zero_like(nabla_w(0, 0)));
  for (int k = 0; k < e; ++k)
    for (int j = 0; j < e; ++j) beta(k, j) = nabla_w(k, j) - nabla_w(j, k);
  Tensor<Jet> nabla_beta = covariant_derivative(beta, gamma);
  Tensor<Jet> scalar(w.range(), w.dim(), {}, delta_w);
  Tensor<Jet> d_delta = covariant_derivative(scalar, gamma);
  Tensor<Jet> out(w.range(), w.dim(), {Var::Down}, zero_like(nabla_beta(0, 0, 0)));
  for (int j = 0; j < e; ++j) {
    Jet delta_beta = zero_like(nabla_beta(0, 0, 0));
    for (int i = 0; i < e; ++i)
      for (int k = 0; k < e; ++k) delta_beta -= g_inv(i, k) * nabla_beta(i, k, j);
    out(j) = -d_delta(j) - delta_beta;
  }
  return out;
}

}  // namespace hlab
