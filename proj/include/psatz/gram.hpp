#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "psatz/basis.hpp"
#include "psatz/cones.hpp"
#include "psatz/densemat.hpp"
#include "psatz/poly_io.hpp"
#include "psatz/polymatrix.hpp"

namespace psatz {

/// One weighted SOS-matrix term in Gram form: weight * (Z (x) I_t)^T Q (Z (x) I_t)
/// over a monomial basis Z. Row/column index layout of Q is basis-major:
/// (basis element i, matrix row u) -> i*t + u.
template <CoefficientScalar T>
struct GramBlock {
  Poly<Rational> weight;         // weights stay exact in both modes
  std::vector<Monomial> basis;
  DenseMat<T> Q;                 // symmetric, (|basis|*t) square
};

/// Expands one Gram block to its polynomial matrix. Exact in rational mode.
template <CoefficientScalar T>
PolyMatrix<T> expand_block(const Poly<Rational>& weight, const std::vector<Monomial>& basis,
                           const DenseMat<T>& Q, std::size_t t) {
  const std::size_t m = basis.size();
  if (Q.rows() != m * t || Q.cols() != m * t)
    throw std::invalid_argument("expand_block: Q dimension does not match basis*t");
  const std::size_t n = weight.nvars();
  PolyMatrix<T> out(t, n);
  Poly<T> w = [&] {
    if constexpr (std::same_as<T, Rational>) return weight;
    else return to_double_poly(weight);
  }();
  for (std::size_t u = 0; u < t; ++u)
    for (std::size_t v = u; v < t; ++v) {
      Poly<T> acc(n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const T& q = Q(i * t + u, j * t + v);
          if (scalar_is_zero(q)) continue;
          acc.add_term(basis[i].times(basis[j]), q);
        }
      acc = acc * w;
      out.set(u, v, acc);
      if (v != u) out.set(v, u, std::move(acc));
    }
  return out;
}

template <CoefficientScalar T>
PolyMatrix<T> expand_block(const GramBlock<T>& b, std::size_t t) {
  return expand_block(b.weight, b.basis, b.Q, t);
}

// ---------------------------------------------------------------------------
// Coefficient-matching SDP problem

/// Block PSD feasibility problem with affine equality constraints:
/// find Q_k psd (one per block) and free variables u with, for every row j,
///   sum_k sum_{(i<=j) entries} coeff * Q_k[i][j]  +  sum_f coeff * u_f = b_j.
/// Entry coefficients multiply the independent upper-triangular variables
/// (symmetric counterparts folded in), all exact rationals.
struct SdpProblem {
  struct Block {
    std::size_t weight_index = 0;   // into the originating ConeSpec
    Poly<Rational> weight = Poly<Rational>(0);
    std::vector<Monomial> basis;
    std::size_t dim = 0;            // |basis| * t
  };
  struct Entry {
    std::size_t row;
    std::size_t i, j;               // i <= j, indices into the block's Q
    Rational c;
  };
  struct FreeEntry {
    std::size_t row;
    std::size_t var;
    Rational c;
  };
  struct RowKey {
    Monomial mono;
    std::size_t u, v;               // u <= v, entry of the t x t identity
    friend bool operator==(const RowKey&, const RowKey&) = default;
  };

  std::size_t t = 0;
  std::size_t nvars = 0;
  int target_degree = 0;
  bool homogeneous = false;

  std::vector<Block> blocks;
  std::vector<std::vector<Entry>> block_entries;  // parallel to blocks
  std::vector<FreeEntry> free_entries;
  std::size_t free_var_count = 0;
  std::vector<RowKey> rows;
  std::vector<Rational> b;

  /// Rows with a nonzero target coefficient that no block or free variable
  /// can produce; nonempty means the identity is unsatisfiable at this shape.
  std::vector<std::size_t> impossible_rows;

  std::size_t constraint_count() const { return rows.size(); }
  std::size_t total_psd_dim() const {
    std::size_t s = 0;
    for (const auto& bl : blocks) s += bl.dim;
    return s;
  }
  bool structurally_infeasible() const { return !impossible_rows.empty(); }

  /// One constraint per line, solver-independent.
  void dump(std::ostream& os, const VarTable& vars) const;
};

// ---------------------------------------------------------------------------
// Assembly

namespace detail {

struct RowKeyLess {
  bool operator()(const SdpProblem::RowKey& a, const SdpProblem::RowKey& b) const {
    if (auto c = a.mono <=> b.mono; c != 0) return c < 0;
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  }
};

}  // namespace detail

/// Builds the coefficient-matching system encoding "lhs is in the cone".
/// Bases: exact degree (target - deg w)/2 per weight when the cone is
/// homogeneous (weights with a parity mismatch contribute no block),
/// floor((target - deg w)/2) otherwise.
inline SdpProblem assemble(const PolyMatrix<Rational>& lhs, const ConeSpec& cone) {
  lhs.require_symmetric("assemble");
  const std::size_t t = lhs.size();
  const std::size_t n = lhs.nvars();
  for (const auto& w : cone.weights)
    if (w.nvars() != n) throw std::invalid_argument("assemble: weight nvars mismatch");
  if (cone.homogeneous && !lhs.is_zero()) {
    if (!lhs.is_homogeneous() || lhs.degree() != cone.target_degree)
      throw std::invalid_argument("assemble: lhs is not homogeneous of the cone's target degree");
  }
  if (!cone.homogeneous && lhs.degree() > cone.target_degree)
    throw std::invalid_argument("assemble: lhs degree exceeds the cone's target degree");

  SdpProblem p;
  p.t = t;
  p.nvars = n;
  p.target_degree = cone.target_degree;
  p.homogeneous = cone.homogeneous;

  // Row indexing: gather keys from the lhs first, then from block expansions.
  std::map<SdpProblem::RowKey, std::size_t, detail::RowKeyLess> row_of;
  auto row_index = [&](const Monomial& m, std::size_t u, std::size_t v) {
    SdpProblem::RowKey k{m, u, v};
    auto [it, inserted] = row_of.try_emplace(k, row_of.size());
    return it->second;
  };
  for (std::size_t u = 0; u < t; ++u)
    for (std::size_t v = u; v < t; ++v)
      for (const auto& [m, c] : lhs.at(u, v).terms()) row_index(m, u, v);

  // Blocks with their entries. Entry coefficients multiply the independent
  // upper-triangular Q variables, so a symmetric pair contributes twice.
  for (std::size_t wi = 0; wi < cone.weights.size(); ++wi) {
    const auto& w = cone.weights[wi];
    const int rem = cone.target_degree - w.degree();
    if (rem < 0) continue;
    std::vector<Monomial> basis;
    if (cone.homogeneous) {
      if (rem % 2 != 0) continue;  // parity mismatch: block would be structurally zero
      basis = monomials_exact(n, rem / 2);
    } else {
      basis = monomials_up_to(n, rem / 2);
    }
    if (basis.empty()) continue;

    SdpProblem::Block bl;
    bl.weight_index = wi;
    bl.weight = w;
    bl.basis = basis;
    bl.dim = basis.size() * t;

    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> acc;  // (row,i,j)->c
    const std::size_t m = basis.size();
    for (std::size_t bi = 0; bi < m; ++bi)
      for (std::size_t bj = 0; bj < m; ++bj) {
        const Monomial prod = basis[bi].times(basis[bj]);
        for (std::size_t u = 0; u < t; ++u)
          for (std::size_t v = u; v < t; ++v) {
            std::size_t I = bi * t + u, J = bj * t + v;
            if (I > J) std::swap(I, J);
            for (const auto& [wm, wc] : w.terms()) {
              const std::size_t row = row_index(prod.times(wm), u, v);
              acc[{row, I, J}] += wc;
            }
          }
      }
    std::vector<SdpProblem::Entry> entries;
    entries.reserve(acc.size());
    for (const auto& [key, c] : acc) {
      if (c.is_zero()) continue;
      entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
    }
    p.blocks.push_back(std::move(bl));
    p.block_entries.push_back(std::move(entries));
  }

  // Equality multipliers: each polynomial h gets a free symmetric polynomial
  // matrix multiplier of fitting degree; one free scalar per (monomial, u<=v).
  for (const auto& h : cone.equality_mults) {
    if (h.is_zero()) continue;
    const int rem = cone.target_degree - h.degree();
    if (rem < 0) continue;
    const auto mults = cone.homogeneous ? monomials_exact(n, rem) : monomials_up_to(n, rem);
    for (const auto& g : mults)
      for (std::size_t u = 0; u < t; ++u)
        for (std::size_t v = u; v < t; ++v) {
          const std::size_t var = p.free_var_count++;
          for (const auto& [hm, hc] : h.terms())
            p.free_entries.push_back({row_index(g.times(hm), u, v), var, hc});
        }
  }

  // Freeze rows in canonical order. row_of values were assigned in insertion
  // order, so remap everything to the sorted order for determinism.
  std::vector<std::size_t> remap(row_of.size());
  {
    std::size_t next = 0;
    p.rows.reserve(row_of.size());
    p.b.assign(row_of.size(), Rational(0));
    for (const auto& [key, old_idx] : row_of) {  // map iteration: canonical order
      remap[old_idx] = next;
      p.rows.push_back(key);
      ++next;
    }
  }
  for (auto& entries : p.block_entries)
    for (auto& e : entries) e.row = remap[e.row];
  for (auto& e : p.free_entries) e.row = remap[e.row];
  for (std::size_t r = 0; r < p.rows.size(); ++r)
    p.b[r] = lhs.at(p.rows[r].u, p.rows[r].v).coefficient(p.rows[r].mono);

  // Structured infeasibility: a nonzero target coefficient nothing can match.
  {
    std::vector<bool> touched(p.rows.size(), false);
    for (const auto& entries : p.block_entries)
      for (const auto& e : entries) touched[e.row] = true;
    for (const auto& e : p.free_entries) touched[e.row] = true;
    for (std::size_t r = 0; r < p.rows.size(); ++r)
      if (!touched[r] && !p.b[r].is_zero()) p.impossible_rows.push_back(r);
  }
  return p;
}

inline void SdpProblem::dump(std::ostream& os, const VarTable& vars) const {
  os << "sdp-problem t=" << t << " nvars=" << nvars << " target_degree=" << target_degree
     << (homogeneous ? " homogeneous" : "") << "\n";
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    os << "block " << k << " dim=" << blocks[k].dim << " weight=" << to_string(blocks[k].weight, vars)
       << " basis=";
    for (std::size_t i = 0; i < blocks[k].basis.size(); ++i)
      os << (i ? "," : "") << to_string(blocks[k].basis[i], vars);
    os << "\n";
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << "row " << r << " [" << to_string(rows[r].mono, vars) << "; e" << rows[r].u << rows[r].v
       << "]:";
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (const auto& e : block_entries[k])
        if (e.row == r) os << " " << e.c.str() << "*Q" << k << "[" << e.i << "," << e.j << "]";
    for (const auto& e : free_entries)
      if (e.row == r) os << " " << e.c.str() << "*u" << e.var;
    os << " = " << b[r].str() << "\n";
  }
}

}  // namespace psatz
