#pragma once

#include <stdexcept>
#include <vector>

#include "psatz/poly.hpp"

namespace psatz {

/// t x t matrix with polynomial entries. Degree is the maximum entry degree;
/// homogeneous means every nonzero entry is homogeneous of that same degree.
template <CoefficientScalar T>
class PolyMatrix {
 public:
  PolyMatrix(std::size_t t, std::size_t nvars)
      : t_(t), nvars_(nvars), e_(t * t, Poly<T>(nvars)) {
    if (t == 0) throw std::invalid_argument("PolyMatrix: size must be positive");
  }

  static PolyMatrix identity(std::size_t t, std::size_t nvars) {
    PolyMatrix m(t, nvars);
    for (std::size_t i = 0; i < t; ++i) m.set(i, i, Poly<T>::one(nvars));
    return m;
  }
  static PolyMatrix constant_identity_times(std::size_t t, std::size_t nvars, const T& c) {
    PolyMatrix m(t, nvars);
    for (std::size_t i = 0; i < t; ++i) m.set(i, i, Poly<T>::constant(nvars, c));
    return m;
  }

  std::size_t size() const { return t_; }
  std::size_t nvars() const { return nvars_; }

  const Poly<T>& at(std::size_t i, std::size_t j) const { return e_.at(i * t_ + j); }
  void set(std::size_t i, std::size_t j, Poly<T> p) {
    if (p.nvars() != nvars_) throw std::invalid_argument("PolyMatrix::set: nvars mismatch");
    e_.at(i * t_ + j) = std::move(p);
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < t_; ++i)
      for (std::size_t j = i + 1; j < t_; ++j)
        if (!(at(i, j) == at(j, i))) return false;
    return true;
  }
  void require_symmetric(const char* who) const {
    if (!is_symmetric()) throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
  }

  bool is_zero() const {
    for (const auto& p : e_)
      if (!p.is_zero()) return false;
    return true;
  }

  int degree() const {
    int d = kZeroPolyDegree;
    for (const auto& p : e_) d = std::max(d, p.degree());
    return d;
  }

  bool is_homogeneous() const {
    const int d = degree();
    if (d == kZeroPolyDegree) return true;
    for (const auto& p : e_)
      if (!p.is_zero() && !(p.is_homogeneous() && p.degree() == d)) return false;
    return true;
  }

  PolyMatrix& operator+=(const PolyMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  PolyMatrix& operator-=(const PolyMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
  }
  friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) { return a += b; }
  friend PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) { return a -= b; }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("PolyMatrix: nvars mismatch");
    if (a.t_ != b.t_) throw std::invalid_argument("PolyMatrix: size mismatch");
    PolyMatrix r(a.t_, a.nvars_);
    for (std::size_t i = 0; i < a.t_; ++i)
      for (std::size_t j = 0; j < a.t_; ++j) {
        Poly<T> acc(a.nvars_);
        for (std::size_t k = 0; k < a.t_; ++k) acc += a.at(i, k) * b.at(k, j);
        r.set(i, j, std::move(acc));
      }
    return r;
  }

  PolyMatrix transpose() const {
    PolyMatrix r(t_, nvars_);
    for (std::size_t i = 0; i < t_; ++i)
      for (std::size_t j = 0; j < t_; ++j) r.set(j, i, at(i, j));
    return r;
  }

  /// A^T A; always symmetric.
  PolyMatrix gram_square() const { return transpose() * (*this); }

  PolyMatrix scaled(const T& s) const {
    PolyMatrix r(t_, nvars_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i].scaled(s);
    return r;
  }

  PolyMatrix scaled_by_poly(const Poly<T>& p) const {
    if (p.nvars() != nvars_) throw std::invalid_argument("PolyMatrix::scaled_by_poly: nvars mismatch");
    PolyMatrix r(t_, nvars_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * p;
    return r;
  }

  /// Entry values at a point, row-major.
  std::vector<T> evaluate(std::span<const T> point) const {
    std::vector<T> v;
    v.reserve(e_.size());
    for (const auto& p : e_) v.push_back(p.evaluate(point));
    return v;
  }
  std::vector<T> evaluate(const std::vector<T>& point) const {
    return evaluate(std::span<const T>(point));
  }

  /// Matrix-level homogenization: every term of every entry is padded with
  /// X_0 up to the matrix degree d, so the result is homogeneous of degree d.
  PolyMatrix homogenized() const {
    const int d = degree();
    if (d == kZeroPolyDegree)
      throw std::invalid_argument("PolyMatrix::homogenized: zero matrix has no degree");
    PolyMatrix r(t_, nvars_ + 1);
    for (std::size_t i = 0; i < e_.size(); ++i)
      r.e_[i] = e_[i].is_zero() ? Poly<T>(nvars_ + 1) : e_[i].homogenized(d);
    return r;
  }

  /// Substitutes slot 0 := 1 entrywise and drops the slot.
  PolyMatrix dehomogenized() const {
    PolyMatrix r(t_, nvars_ - 1);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i].dehomogenized();
    return r;
  }

  template <CoefficientScalar U>
  PolyMatrix<U> convert() const {
    PolyMatrix<U> r(t_, nvars_);
    for (std::size_t i = 0; i < t_; ++i)
      for (std::size_t j = 0; j < t_; ++j) r.set(i, j, at(i, j).template convert<U>());
    return r;
  }

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
    return a.t_ == b.t_ && a.nvars_ == b.nvars_ && a.e_ == b.e_;
  }

 private:
  void check_same(const PolyMatrix& o) const {
    if (o.t_ != t_ || o.nvars_ != nvars_)
      throw std::invalid_argument("PolyMatrix: dimension or nvars mismatch");
  }

  std::size_t t_, nvars_;
  std::vector<Poly<T>> e_;
};

inline PolyMatrix<double> to_double_matrix(const PolyMatrix<Rational>& m) {
  return m.template convert<double>();
}

}  // namespace psatz
