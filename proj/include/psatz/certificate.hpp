#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psatz/cones.hpp"
#include "psatz/densemat.hpp"
#include "psatz/gram.hpp"

namespace psatz {

enum class CertKind {
  scherer_hol,
  eps_shift,
  handelman,
  putinar_vasilescu,
  reznick,
  pv_nonhomog,
  polya_pv,
  polya,
  ppv_nonhomog,
  marshall,
  marshall_nonhomog,
};

inline const char* to_string(CertKind k) {
  switch (k) {
    case CertKind::scherer_hol: return "scherer_hol";
    case CertKind::eps_shift: return "eps_shift";
    case CertKind::handelman: return "handelman";
    case CertKind::putinar_vasilescu: return "putinar_vasilescu";
    case CertKind::reznick: return "reznick";
    case CertKind::pv_nonhomog: return "pv_nonhomog";
    case CertKind::polya_pv: return "polya_pv";
    case CertKind::polya: return "polya";
    case CertKind::ppv_nonhomog: return "ppv_nonhomog";
    case CertKind::marshall: return "marshall";
    case CertKind::marshall_nonhomog: return "marshall_nonhomog";
  }
  return "?";
}

enum class CertStatus { exact, numeric };

inline const char* to_string(CertStatus s) {
  return s == CertStatus::exact ? "exact" : "numeric";
}

/// One rational Gram block of a certificate. weight_index points into the
/// cone's weight list.
struct CertBlock {
  std::size_t weight_index = 0;
  std::vector<Monomial> basis;
  DenseMat<Rational> Q;
};

/// A (candidate) membership certificate: lhs = sum_k w_k (Z_k (x) I)^T Q_k (Z_k (x) I),
/// where lhs is the exact polynomial matrix the drivers certified (already
/// including any denominator power and epsilon shift).
struct Certificate {
  CertKind kind = CertKind::scherer_hol;
  int N = 0;
  Poly<Rational> denom;     // the denominator factor of the lhs (1 when none)
  PolyMatrix<Rational> lhs;
  ConeSpec cone;
  std::vector<CertBlock> blocks;
  std::vector<Rational> free_vars;  // equality-multiplier coefficients, if any

  CertStatus status = CertStatus::numeric;
  Rational residual_norm;   // exact coefficient-wise infinity norm of lhs - sum(blocks)

  // Provenance.
  std::uint64_t seed = 0;
  int solver_iterations = 0;
  double solver_margin = 0.0;
  double solver_residual = 0.0;
  int rounding_denom_exp = -1;  // blocks rounded at 10^k; -1 if rounding failed
  std::string timestamp;        // excluded from byte-for-byte comparisons

  Certificate()
      : denom(Poly<Rational>::one(1)), lhs(1, 1) {}
  Certificate(std::size_t t, std::size_t nvars)
      : denom(Poly<Rational>::one(nvars)), lhs(t, nvars) {}
};

}  // namespace psatz
