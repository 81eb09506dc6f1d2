#pragma once

#include <algorithm>
#include <vector>

#include "psatz/monomial.hpp"

namespace psatz {

namespace detail {
inline void enumerate_monomials(std::size_t nvars, int remaining, std::size_t slot,
                                std::vector<std::uint32_t>& cur, bool exact,
                                std::vector<Monomial>& out) {
  if (slot == nvars) {
    if (!exact || remaining == 0) out.push_back(Monomial(cur));
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[slot] = static_cast<std::uint32_t>(e);
    enumerate_monomials(nvars, remaining - e, slot + 1, cur, exact, out);
  }
  cur[slot] = 0;
}
}  // namespace detail

/// All monomials of degree <= max_deg, graded-lex ordered.
inline std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_deg) {
  std::vector<Monomial> out;
  if (max_deg < 0) return out;
  std::vector<std::uint32_t> cur(nvars, 0);
  detail::enumerate_monomials(nvars, max_deg, 0, cur, /*exact=*/false, out);
  std::sort(out.begin(), out.end());
  return out;
}

/// All monomials of degree exactly deg, graded-lex ordered.
inline std::vector<Monomial> monomials_exact(std::size_t nvars, int deg) {
  std::vector<Monomial> out;
  if (deg < 0) return out;
  std::vector<std::uint32_t> cur(nvars, 0);
  detail::enumerate_monomials(nvars, deg, 0, cur, /*exact=*/true, out);
  std::sort(out.begin(), out.end());
  return out;
}

/// Spec-shaped entry point: complete basis up to max_deg, or of exact degree
/// when homogeneous_only is set (exact_deg < 0 means "use max_deg").
inline std::vector<Monomial> monomial_basis(std::size_t nvars, int max_deg,
                                            bool homogeneous_only = false, int exact_deg = -1) {
  if (homogeneous_only) return monomials_exact(nvars, exact_deg >= 0 ? exact_deg : max_deg);
  return monomials_up_to(nvars, max_deg);
}

}  // namespace psatz
