#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace psatz {

/// Power product X^alpha as an exponent vector over a fixed ambient variable
/// count. When a homogenization variable is in play it occupies slot 0.
class Monomial {
 public:
  explicit Monomial(std::size_t nvars) : e_(nvars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> exponents) : e_(std::move(exponents)) {}

  static Monomial variable(std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw std::out_of_range("Monomial::variable: index out of range");
    Monomial m(nvars);
    m.e_[i] = 1;
    return m;
  }

  std::size_t nvars() const { return e_.size(); }
  std::uint32_t operator[](std::size_t i) const { return e_[i]; }
  const std::vector<std::uint32_t>& exponents() const { return e_; }

  int degree() const {
    return std::accumulate(e_.begin(), e_.end(), 0,
                           [](int a, std::uint32_t b) { return a + static_cast<int>(b); });
  }
  bool is_constant() const {
    for (auto e : e_)
      if (e != 0) return false;
    return true;
  }

  Monomial times(const Monomial& o) const {
    if (o.nvars() != nvars()) throw std::invalid_argument("Monomial::times: nvars mismatch");
    Monomial r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
  }

  /// Raise a single slot's exponent (used by homogenization).
  Monomial with_added(std::size_t slot, std::uint32_t add) const {
    Monomial r(*this);
    r.e_[slot] += add;
    return r;
  }

  /// Graded order: total degree first, then lexicographic on the exponent
  /// vector. This is the canonical term order everywhere.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    for (std::size_t i = 0; i < a.e_.size() && i < b.e_.size(); ++i)
      if (auto c = a.e_[i] <=> b.e_[i]; c != 0) return c;
    return a.e_.size() <=> b.e_.size();
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }

 private:
  std::vector<std::uint32_t> e_;
};

}  // namespace psatz
