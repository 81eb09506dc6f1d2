#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "psatz/basis.hpp"
#include "psatz/polymatrix.hpp"

namespace psatz {

// ---------------------------------------------------------------------------
// Generator sets

/// The scalar generators g_j and symmetric matrix generators G_i cutting out
/// K(G) = { x : g_j(x) >= 0, G_i(x) psd }.
struct GeneratorSet {
  std::size_t nvars = 0;
  std::vector<Poly<Rational>> scalar_gens;
  std::vector<PolyMatrix<Rational>> matrix_gens;

  explicit GeneratorSet(std::size_t n) : nvars(n) {}

  void add(Poly<Rational> g) {
    if (g.nvars() != nvars) throw std::invalid_argument("GeneratorSet: nvars mismatch");
    scalar_gens.push_back(std::move(g));
  }
  void add(PolyMatrix<Rational> g) {
    if (g.nvars() != nvars) throw std::invalid_argument("GeneratorSet: nvars mismatch");
    g.require_symmetric("GeneratorSet::add");
    matrix_gens.push_back(std::move(g));
  }

  bool all_scalar() const { return matrix_gens.empty(); }

  /// Indices of the linear scalar generators (degree <= 1, nonzero).
  std::vector<std::size_t> linear_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scalar_gens.size(); ++i) {
      const int d = scalar_gens[i].degree();
      if (d == 0 || d == 1) out.push_back(i);
    }
    return out;
  }

  /// True when every generator is homogeneous of even degree (constants count
  /// as degree 0).
  bool all_even_homogeneous() const {
    for (const auto& g : scalar_gens) {
      const auto info = g.degree_info();
      if (g.is_zero()) continue;
      if (!info.is_homogeneous || info.degree % 2 != 0) return false;
    }
    for (const auto& g : matrix_gens) {
      if (g.is_zero()) continue;
      if (!g.is_homogeneous() || g.degree() % 2 != 0) return false;
    }
    return true;
  }

  GeneratorSet homogenized() const {
    GeneratorSet out(nvars + 1);
    for (const auto& g : scalar_gens)
      out.scalar_gens.push_back(g.is_zero() ? Poly<Rational>(nvars + 1) : g.homogenized());
    for (const auto& g : matrix_gens) out.matrix_gens.push_back(g.homogenized());
    return out;
  }
};

// ---------------------------------------------------------------------------
// Scalarization (matrix generators -> characteristic-coefficient scalars)

namespace detail {

inline Poly<Rational> poly_det(const std::vector<std::vector<Poly<Rational>>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly<Rational> acc(m[0][0].nvars());
  int sign = 1;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Poly<Rational>>> sub;
    sub.reserve(n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Poly<Rational>> row;
      row.reserve(n - 1);
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      sub.push_back(std::move(row));
    }
    auto cof = m[0][j] * poly_det(sub);
    if (sign > 0) acc += cof;
    else acc -= cof;
    sign = -sign;
  }
  return acc;
}

inline void k_subsets(std::size_t t, std::size_t k, std::vector<std::size_t>& cur, std::size_t from,
                      std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < t; ++i) {
    cur.push_back(i);
    k_subsets(t, k, cur, i + 1, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Characteristic-coefficient scalarization: returns c_1..c_t where c_k is
/// the sum of principal k x k minors of G. For symmetric G, G(x) is psd
/// exactly when all c_k(x) >= 0 (the eigenvalues are real and the c_k are
/// their elementary symmetric functions).
inline std::vector<Poly<Rational>> scalarize(const PolyMatrix<Rational>& G) {
  G.require_symmetric("scalarize");
  const std::size_t t = G.size();
  std::vector<Poly<Rational>> out;
  out.reserve(t);
  for (std::size_t k = 1; k <= t; ++k) {
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> cur;
    detail::k_subsets(t, k, cur, 0, subsets);
    Poly<Rational> ck(G.nvars());
    for (const auto& S : subsets) {
      std::vector<std::vector<Poly<Rational>>> minor(k, std::vector<Poly<Rational>>());
      for (std::size_t i = 0; i < k; ++i) {
        minor[i].reserve(k);
        for (std::size_t j = 0; j < k; ++j) minor[i].push_back(G.at(S[i], S[j]));
      }
      ck += detail::poly_det(minor);
    }
    out.push_back(std::move(ck));
  }
  return out;
}

/// Replaces every matrix generator by its scalarization.
inline GeneratorSet scalarized(const GeneratorSet& gens) {
  GeneratorSet out(gens.nvars);
  out.scalar_gens = gens.scalar_gens;
  for (const auto& G : gens.matrix_gens)
    for (auto& c : scalarize(G)) out.scalar_gens.push_back(std::move(c));
  return out;
}

/// Appends the ball constraint rho^2 - sum X_i^2, making the quadratic module
/// Archimedean.
inline GeneratorSet add_ball(const GeneratorSet& gens, const Rational& rho) {
  if (!(rho > Rational(0))) throw std::invalid_argument("add_ball: rho must be positive");
  GeneratorSet out = gens;
  Poly<Rational> ball = Poly<Rational>::constant(gens.nvars, rho * rho);
  ball -= sum_of_squares_poly<Rational>(gens.nvars);
  out.scalar_gens.push_back(std::move(ball));
  return out;
}

// ---------------------------------------------------------------------------
// Cone specifications

enum class ConeKind { putinar, semiring, polya_pv };

enum class DenomKind { none, sum_sq, sum_lin, one_plus_sum_sq, one_plus_sum_lin };

/// A certificate shape: the scalar weight family w_k, optional equality
/// multipliers (free-sign), the denominator family and its power N, and the
/// degree bookkeeping assemble() needs.
struct ConeSpec {
  std::vector<Poly<Rational>> weights;
  std::vector<Poly<Rational>> equality_mults;
  DenomKind denom = DenomKind::none;
  int denom_power = 0;
  int mult_degree = 0;   // D: degree bound on each SOS-matrix multiplier
  int target_degree = 0; // degree of the identity's left-hand side
  bool homogeneous = false;
};

namespace detail {

inline void semiring_products(const std::vector<Poly<Rational>>& gens, std::size_t from,
                              const Poly<Rational>& acc, int cap,
                              std::set<Poly<Rational>>& out) {
  out.insert(acc);
  for (std::size_t i = from; i < gens.size(); ++i) {
    const int d = gens[i].degree();
    if (d <= 0) continue;  // constants and zero add nothing to the weight family
    if (acc.degree() + d > cap) continue;
    semiring_products(gens, i, acc * gens[i], cap, out);
  }
}

}  // namespace detail

/// Builds the weight family for a certificate shape. Weights of degree above
/// target_degree are pruned (their multiplier would be forced to zero).
inline ConeSpec build_cone(ConeKind kind, const GeneratorSet& gens, int D, int N,
                           int target_degree, bool homogeneous,
                           DenomKind denom = DenomKind::none) {
  if (!gens.all_scalar())
    throw std::invalid_argument("build_cone: matrix generators must be scalarized first");
  if (D < 0 || D % 2 != 0) throw std::invalid_argument("build_cone: D must be even and >= 0");
  if (N < 0) throw std::invalid_argument("build_cone: N must be >= 0");

  const std::size_t n = gens.nvars;
  ConeSpec cone;
  cone.denom = denom;
  cone.denom_power = N;
  cone.mult_degree = D;
  cone.target_degree = target_degree;
  cone.homogeneous = homogeneous;

  std::set<Poly<Rational>> ws;
  const auto one = Poly<Rational>::one(n);
  switch (kind) {
    case ConeKind::putinar: {
      ws.insert(one);
      for (const auto& g : gens.scalar_gens)
        if (!g.is_zero() && g.degree() <= target_degree) ws.insert(g);
      break;
    }
    case ConeKind::semiring: {
      detail::semiring_products(gens.scalar_gens, 0, one, target_degree, ws);
      break;
    }
    case ConeKind::polya_pv: {
      std::set<Poly<Rational>> products;
      detail::semiring_products(gens.scalar_gens, 0, one, target_degree, products);
      for (const auto& p : products) {
        const int room = target_degree - p.degree();
        for (const auto& m : monomials_up_to(n, room)) {
          Poly<Rational> w(n);
          w.add_term(m, Rational(1));
          ws.insert(p * w);
        }
      }
      break;
    }
  }

  cone.weights.assign(ws.begin(), ws.end());
  std::sort(cone.weights.begin(), cone.weights.end(),
            [](const Poly<Rational>& a, const Poly<Rational>& b) {
              if (a.degree() != b.degree()) return a.degree() < b.degree();
              return a < b;
            });
  return cone;
}

/// The denominator base polynomial for a cone (sigma, sum of vars, or their
/// 1+... variants); none yields the constant 1.
inline Poly<Rational> denominator_base(DenomKind kind, std::size_t nvars) {
  switch (kind) {
    case DenomKind::none:
      return Poly<Rational>::one(nvars);
    case DenomKind::sum_sq:
      return sum_of_squares_poly<Rational>(nvars);
    case DenomKind::sum_lin:
      return sum_of_vars_poly<Rational>(nvars);
    case DenomKind::one_plus_sum_sq:
      return Poly<Rational>::one(nvars) + sum_of_squares_poly<Rational>(nvars);
    case DenomKind::one_plus_sum_lin:
      return Poly<Rational>::one(nvars) + sum_of_vars_poly<Rational>(nvars);
  }
  throw std::logic_error("denominator_base: bad kind");
}

// ---------------------------------------------------------------------------
// Sampling K(G)

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace detail

struct SampleOptions {
  std::size_t count = 1000;
  double lo = -1.0, hi = 1.0;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 0;  // 0: defaults to 10000 * count
};

struct SampleResult {
  std::vector<std::vector<double>> points;
  std::size_t attempts = 0;
  double acceptance_rate = 0.0;
  bool possibly_empty = false;  // attempt cap hit with zero acceptances
  std::uint64_t seed = 0;
};

/// Uniform rejection sampling of K(G) inside the box [lo,hi]^n. Deterministic
/// for a fixed seed: attempt i draws from its own splitmix64 stream, so the
/// accepted set is independent of batching.
inline SampleResult sample_K(const GeneratorSet& gens, const SampleOptions& opt) {
  if (opt.count < 1) throw std::invalid_argument("sample_K: count must be >= 1");
  if (!(opt.lo < opt.hi)) throw std::invalid_argument("sample_K: box must satisfy lo < hi");
  const std::size_t n = gens.nvars;

  std::vector<Poly<double>> sg;
  sg.reserve(gens.scalar_gens.size());
  for (const auto& g : gens.scalar_gens) sg.push_back(to_double_poly(g));
  std::vector<PolyMatrix<double>> mg;
  mg.reserve(gens.matrix_gens.size());
  for (const auto& g : gens.matrix_gens) mg.push_back(to_double_matrix(g));

  SampleResult res;
  res.seed = opt.seed;
  const std::size_t cap = opt.max_attempts ? opt.max_attempts : 10000 * opt.count;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < cap && res.points.size() < opt.count; ++i) {
    ++res.attempts;
    std::uint64_t state = opt.seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    for (std::size_t d = 0; d < n; ++d)
      x[d] = opt.lo + (opt.hi - opt.lo) * detail::uniform01(state);
    bool ok = true;
    for (const auto& g : sg)
      if (g.evaluate(std::span<const double>(x)) < -opt.tol) {
        ok = false;
        break;
      }
    if (ok && !mg.empty()) {
      for (const auto& g : mg) {
        const std::size_t t = g.size();
        Eigen::MatrixXd v(t, t);
        const auto vals = g.evaluate(std::span<const double>(x));
        for (std::size_t r = 0; r < t; ++r)
          for (std::size_t c = 0; c < t; ++c) v(static_cast<int>(r), static_cast<int>(c)) = vals[r * t + c];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -opt.tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) res.points.push_back(x);
  }
  res.acceptance_rate =
      res.attempts ? static_cast<double>(res.points.size()) / static_cast<double>(res.attempts) : 0.0;
  res.possibly_empty = res.points.empty();
  return res;
}

}  // namespace psatz
