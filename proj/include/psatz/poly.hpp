#pragma once

#include <concepts>
#include <map>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "psatz/monomial.hpp"
#include "psatz/rational.hpp"

namespace psatz {

/// Coefficient domain of a computation context: exact rationals or doubles.
/// The mode is a compile-time switch, so expressions can never mix modes.
template <class T>
concept CoefficientScalar = std::same_as<T, Rational> || std::same_as<T, double>;

template <CoefficientScalar T>
inline bool scalar_is_zero(const T& x) {
  if constexpr (std::same_as<T, Rational>) return x.is_zero();
  else return x == 0.0;
}

/// Degree reported for the zero polynomial (stand-in for -infinity).
inline constexpr int kZeroPolyDegree = -1;

struct DegreeInfo {
  int degree = kZeroPolyDegree;
  bool is_homogeneous = false;
  bool is_even_degree = false;
};

/// Sparse multivariate polynomial over a fixed ambient variable count.
/// Terms are kept in graded-lex order with no stored zero coefficients.
/// Values are immutable in spirit: every operation allocates a fresh result.
template <CoefficientScalar T>
class Poly {
 public:
  using Terms = std::map<Monomial, T>;

  explicit Poly(std::size_t nvars) : nvars_(nvars) {}

  static Poly zero(std::size_t nvars) { return Poly(nvars); }
  static Poly constant(std::size_t nvars, T c) {
    Poly p(nvars);
    p.add_term(Monomial(nvars), std::move(c));
    return p;
  }
  static Poly one(std::size_t nvars) { return constant(nvars, T(1)); }
  static Poly variable(std::size_t nvars, std::size_t i) {
    Poly p(nvars);
    p.add_term(Monomial::variable(nvars, i), T(1));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  /// Accumulates c into the coefficient of m, pruning exact zeros.
  void add_term(const Monomial& m, T c) {
    if (m.nvars() != nvars_) throw std::invalid_argument("Poly::add_term: nvars mismatch");
    if (scalar_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, std::move(c));
    if (!inserted) {
      it->second += c;  // try_emplace left c untouched on failure
      if (scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  T coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }

  int degree() const {
    if (terms_.empty()) return kZeroPolyDegree;
    return terms_.rbegin()->first.degree();  // graded order: last term is top degree
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;  // convention: zero is homogeneous
    const int d = terms_.begin()->first.degree();
    return terms_.rbegin()->first.degree() == d;
  }

  DegreeInfo degree_info() const {
    DegreeInfo info;
    info.degree = degree();
    info.is_homogeneous = is_homogeneous();
    info.is_even_degree = info.degree >= 0 && info.degree % 2 == 0;
    return info;
  }

  Poly& operator+=(const Poly& o) {
    check_same_context(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_same_context(o);
    for (const auto& [m, c] : o.terms_) add_term(m, negate(c));
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) {
    Poly r(a.nvars_);
    for (const auto& [m, c] : a.terms_) r.add_term(m, negate(c));
    return r;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_same_context(b);
    Poly r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma.times(mb), ca * cb);
    return r;
  }

  Poly scaled(const T& s) const {
    Poly r(nvars_);
    if (scalar_is_zero(s)) return r;
    for (const auto& [m, c] : terms_) r.add_term(m, c * s);
    return r;
  }

  Poly pow(unsigned n) const {
    Poly r = one(nvars_);
    for (unsigned i = 0; i < n; ++i) r = r * (*this);
    return r;
  }

  T evaluate(std::span<const T> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("Poly::evaluate: point dimension mismatch");
    T acc(0);
    for (const auto& [m, c] : terms_) {
      T term = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (std::uint32_t e = 0; e < m[i]; ++e) term *= point[i];
      acc += term;
    }
    return acc;
  }
  T evaluate(const std::vector<T>& point) const { return evaluate(std::span<const T>(point)); }

  /// Homogenization into nvars+1 variables; the new variable takes slot 0 and
  /// absorbs the degree deficit up to `target_degree` (defaults to degree()).
  Poly homogenized(int target_degree = -1) const {
    const int d = target_degree >= 0 ? target_degree : degree();
    if (d < 0) throw std::invalid_argument("Poly::homogenized: zero polynomial has no degree");
    if (d < degree()) throw std::invalid_argument("Poly::homogenized: target degree below degree");
    Poly r(nvars_ + 1);
    for (const auto& [m, c] : terms_) {
      std::vector<std::uint32_t> e(nvars_ + 1, 0);
      e[0] = static_cast<std::uint32_t>(d - m.degree());
      for (std::size_t i = 0; i < nvars_; ++i) e[i + 1] = m[i];
      r.terms_.emplace(Monomial(std::move(e)), c);
    }
    return r;
  }

  /// Substitutes slot 0 := 1 and drops it. Inverse of homogenized() on its
  /// image; on general input it is plain substitution (terms may merge).
  Poly dehomogenized() const {
    if (nvars_ == 0) throw std::invalid_argument("Poly::dehomogenized: no variable slot");
    Poly r(nvars_ - 1);
    for (const auto& [m, c] : terms_) {
      std::vector<std::uint32_t> e(m.exponents().begin() + 1, m.exponents().end());
      r.add_term(Monomial(std::move(e)), c);
    }
    return r;
  }

  template <CoefficientScalar U>
  Poly<U> convert() const {
    Poly<U> r(nvars_);
    for (const auto& [m, c] : terms_) {
      if constexpr (std::same_as<T, Rational> && std::same_as<U, double>)
        r.add_term(m, c.to_double());
      else if constexpr (std::same_as<T, U>)
        r.add_term(m, c);
      else
        static_assert(std::same_as<T, U> || std::same_as<U, double>,
                      "only rational -> double conversion is supported");
    }
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Canonical total order (nvars, then term sequence); used for
  /// deduplication and deterministic weight ordering.
  friend std::strong_ordering operator<=>(const Poly& a, const Poly& b) {
    if (auto c = a.nvars_ <=> b.nvars_; c != 0) return c;
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
      if (auto c = ia->first <=> ib->first; c != 0) return c;
      if constexpr (std::same_as<T, Rational>) {
        if (ia->second < ib->second) return std::strong_ordering::less;
        if (ib->second < ia->second) return std::strong_ordering::greater;
      } else {
        if (auto c = ia->second <=> ib->second; c != std::partial_ordering::equivalent)
          return c == std::partial_ordering::less ? std::strong_ordering::less
                                                  : std::strong_ordering::greater;
      }
    }
    if (ia != a.terms_.end()) return std::strong_ordering::greater;
    if (ib != b.terms_.end()) return std::strong_ordering::less;
    return std::strong_ordering::equal;
  }

 private:
  static T negate(const T& c) { return T(0) - c; }
  void check_same_context(const Poly& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Poly: nvars mismatch");
  }

  std::size_t nvars_;
  Terms terms_;
};

/// Sum of squares of the variables, sigma = X_1^2 + ... + X_n^2.
template <CoefficientScalar T>
Poly<T> sum_of_squares_poly(std::size_t nvars) {
  Poly<T> p(nvars);
  for (std::size_t i = 0; i < nvars; ++i)
    p.add_term(Monomial::variable(nvars, i).times(Monomial::variable(nvars, i)), T(1));
  return p;
}

/// Sum of the variables, X_1 + ... + X_n.
template <CoefficientScalar T>
Poly<T> sum_of_vars_poly(std::size_t nvars) {
  Poly<T> p(nvars);
  for (std::size_t i = 0; i < nvars; ++i) p.add_term(Monomial::variable(nvars, i), T(1));
  return p;
}

inline Poly<double> to_double_poly(const Poly<Rational>& p) { return p.template convert<double>(); }

}  // namespace psatz
