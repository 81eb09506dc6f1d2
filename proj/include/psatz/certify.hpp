#pragma once

#include <chrono>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "psatz/certificate.hpp"
#include "psatz/cones.hpp"
#include "psatz/gram.hpp"
#include "psatz/sdp.hpp"
#include "psatz/verify.hpp"

namespace psatz {

struct CertifyOptions {
  int D = 2;                  // SOS multiplier degree bound (even)
  int N_min = 0;
  int N_max = -1;             // -1: heuristic cap d/2 + D (no guarantee intended)
  Rational eps = Rational(0);
  Rational lambda = Rational(1);
  bool lambda_given = true;   // CLI sets false when defaulting; a warning is recorded
  SdpOptions sdp;
  RoundingSchedule rounding;
  int jobs = 1;               // per-N solves run in waves of this size
  bool plausibility_check = true;
  SampleOptions sample;       // box/seed/count for the plausibility report
};

enum class CertifyStatus { exact, numeric, infeasible_evidence, inconclusive };

inline const char* to_string(CertifyStatus s) {
  switch (s) {
    case CertifyStatus::exact: return "exact";
    case CertifyStatus::numeric: return "numeric";
    case CertifyStatus::infeasible_evidence: return "infeasible_evidence";
    case CertifyStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct NAttempt {
  int N = 0;
  std::string outcome;
  bool structured_infeasible = false;
  bool feasible = false;
  bool exact = false;
  bool evidence_valid = false;
  double evidence_margin = 0.0;
  double solver_margin = 0.0;
  double solver_residual = 0.0;
  int iterations = 0;
};

struct CertifyResult {
  CertifyStatus status = CertifyStatus::inconclusive;
  std::optional<Certificate> certificate;
  std::vector<NAttempt> attempts;
  std::vector<double> dual_evidence;
  int evidence_N = -1;
  std::string message;  // warnings + plausibility report lines
};

namespace detail {

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline int even_ceil(int d) { return d % 2 == 0 ? d : d + 1; }

struct MembershipOutcome {
  NAttempt attempt;
  std::optional<Certificate> cert;
  std::vector<double> evidence;
};

/// One (lhs, cone) membership attempt: assemble, solve, round, verify.
inline MembershipOutcome attempt_membership(CertKind kind, int N, const PolyMatrix<Rational>& lhs,
                                            const Poly<Rational>& denom_poly, const ConeSpec& cone,
                                            const CertifyOptions& opt) {
  MembershipOutcome out;
  out.attempt.N = N;

  SdpProblem p = assemble(lhs, cone);
  if (p.structurally_infeasible()) {
    out.attempt.structured_infeasible = true;
    out.attempt.outcome = "structured_infeasible";
    return out;
  }

  const SdpSolution sol = solve(p, opt.sdp);
  out.attempt.iterations = sol.iterations;
  out.attempt.solver_margin = sol.margin;
  out.attempt.solver_residual = sol.max_residual;

  if (sol.status == SolveStatus::infeasible_evidence) {
    const auto ev = check_dual_evidence(p, sol.dual_y);
    out.attempt.evidence_valid = ev.valid;
    out.attempt.evidence_margin = ev.margin;
    out.attempt.outcome = ev.valid ? "infeasible_evidence" : "inconclusive";
    if (ev.valid) out.evidence = sol.dual_y;
    return out;
  }
  if (sol.status == SolveStatus::inconclusive) {
    out.attempt.outcome = "inconclusive";
    return out;
  }

  out.attempt.feasible = true;
  RoundResult rr = round_project(sol, p, opt.rounding);

  Certificate cert(lhs.size(), lhs.nvars());
  cert.kind = kind;
  cert.N = N;
  cert.denom = denom_poly;
  cert.lhs = lhs;
  cert.cone = cone;
  cert.seed = opt.sdp.seed;
  cert.solver_iterations = sol.iterations;
  cert.solver_margin = sol.margin;
  cert.solver_residual = sol.max_residual;
  cert.rounding_denom_exp = rr.exact ? rr.denom_exp_used : -1;
  cert.timestamp = iso_timestamp();
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    CertBlock blk;
    blk.weight_index = p.blocks[k].weight_index;
    blk.basis = p.blocks[k].basis;
    if (k < rr.Q.size()) {
      blk.Q = rr.Q[k];
    } else {
      // Rounding produced nothing usable; keep a plainly rounded Gram so the
      // numeric certificate is still inspectable.
      const std::size_t d = p.blocks[k].dim;
      blk.Q = DenseMat<Rational>(d, d);
      mpz_class denom(1000000);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          blk.Q(i, j) = round_to_denominator(
              0.5 * (sol.Q[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                     sol.Q[k](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))),
              denom);
    }
    cert.blocks.push_back(std::move(blk));
  }
  cert.free_vars = rr.free_vars;
  cert.free_vars.resize(p.free_var_count, Rational(0));

  const ExactReport rep = verify_certificate(lhs, cert);
  cert.status = rep.status;
  cert.residual_norm = rep.residual_poly_norm;
  out.attempt.exact = rep.status == CertStatus::exact;
  out.attempt.outcome = out.attempt.exact ? "feasible(exact)" : "feasible(numeric)";
  out.cert = std::move(cert);
  return out;
}

/// Runs attempt_membership over the N range (in waves of opt.jobs), returning
/// at the smallest feasible N. make_lhs_cone(N) supplies the per-N data.
template <class MakeFn>
CertifyResult run_n_loop(CertKind kind, int n_min, int n_max, const CertifyOptions& opt,
                         MakeFn make_lhs_cone) {
  CertifyResult res;
  const int jobs = std::max(1, opt.jobs);
  for (int wave = n_min; wave <= n_max; wave += jobs) {
    const int wave_end = std::min(n_max, wave + jobs - 1);
    std::vector<std::future<MembershipOutcome>> futs;
    for (int N = wave; N <= wave_end; ++N)
      futs.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                [&, N] {
                                  auto [lhs, denom_poly, cone] = make_lhs_cone(N);
                                  return attempt_membership(kind, N, lhs, denom_poly, cone, opt);
                                }));
    for (int N = wave; N <= wave_end; ++N) {
      MembershipOutcome out = futs[static_cast<std::size_t>(N - wave)].get();
      const bool feasible = out.attempt.feasible;
      if (out.attempt.evidence_valid) {
        res.dual_evidence = out.evidence;
        res.evidence_N = N;
      }
      res.attempts.push_back(std::move(out.attempt));
      if (feasible) {
        res.certificate = std::move(out.cert);
        res.status = res.certificate->status == CertStatus::exact ? CertifyStatus::exact
                                                                  : CertifyStatus::numeric;
        return res;
      }
    }
  }
  // No feasible N: infeasible only when every attempt was rigorously refuted.
  bool all_refuted = !res.attempts.empty();
  for (const auto& a : res.attempts)
    if (!(a.structured_infeasible || a.evidence_valid)) all_refuted = false;
  res.status = all_refuted ? CertifyStatus::infeasible_evidence : CertifyStatus::inconclusive;
  return res;
}

/// Positivity plausibility: sample K(gens) and report the smallest eigenvalue
/// of F seen. A negative report flags a doomed run early; it decides nothing.
inline void plausibility_report(CertifyResult& res, const PolyMatrix<Rational>& F,
                                const GeneratorSet& gens, const CertifyOptions& opt) {
  if (!opt.plausibility_check) return;
  SampleOptions so = opt.sample;
  so.count = std::min<std::size_t>(so.count, 200);
  so.max_attempts = 20000;
  const auto sample = sample_K(gens, so);
  std::ostringstream os;
  if (sample.points.empty()) {
    os << "plausibility: no K(G) samples found in box [" << so.lo << "," << so.hi
       << "] (possibly empty)";
  } else {
    const auto Fd = to_double_matrix(F);
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& x : sample.points) {
      const auto vals = Fd.evaluate(std::span<const double>(x));
      const auto t = static_cast<Eigen::Index>(F.size());
      Eigen::MatrixXd m(t, t);
      for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < t; ++j)
          m(i, j) = vals[static_cast<std::size_t>(i * t + j)];
      min_eig = std::min(min_eig, detail::sym_min_eig(m));
    }
    os << "plausibility: min eig of F over " << sample.points.size() << " K(G) samples = "
       << min_eig;
  }
  if (!res.message.empty()) res.message += "\n";
  res.message += os.str();
}

inline void require_even_homogeneous_gens(const GeneratorSet& gens, const char* who) {
  for (const auto& g : gens.scalar_gens) {
    if (g.is_zero()) continue;
    const auto info = g.degree_info();
    if (!info.is_homogeneous || !info.is_even_degree)
      throw std::invalid_argument(std::string(who) +
                                  ": scalar generators must be homogeneous of even degree");
  }
}

inline void require_even_degree_gens(const GeneratorSet& gens, const char* who) {
  for (const auto& g : gens.scalar_gens)
    if (!g.is_zero() && g.degree() % 2 != 0)
      throw std::invalid_argument(std::string(who) + ": generators must have even degree");
  for (const auto& g : gens.matrix_gens)
    if (!g.is_zero() && g.degree() % 2 != 0)
      throw std::invalid_argument(std::string(who) + ": generators must have even degree");
}

inline int default_n_max(int d, const CertifyOptions& opt) {
  // The d/2 + e1/2 + e2/2 + e3 bookkeeping in the underlying proofs motivates
  // a cap of this shape; it is a heuristic, not a guarantee.
  return opt.N_max >= 0 ? opt.N_max : d / 2 + std::max(2, opt.D);
}

/// Dehomogenizes a certificate produced in n+1 variables back to n variables
/// (X_0 := 1), deduplicating weights that collapse together. Exactness is
/// preserved: substitution is a ring homomorphism.
inline Certificate dehomogenize_certificate(const Certificate& hc) {
  Certificate c(hc.lhs.size(), hc.lhs.nvars() - 1);
  c.kind = hc.kind;
  c.N = hc.N;
  c.denom = hc.denom.dehomogenized();
  c.lhs = hc.lhs.dehomogenized();
  c.seed = hc.seed;
  c.solver_iterations = hc.solver_iterations;
  c.solver_margin = hc.solver_margin;
  c.solver_residual = hc.solver_residual;
  c.rounding_denom_exp = hc.rounding_denom_exp;
  c.timestamp = hc.timestamp;
  c.free_vars = hc.free_vars;

  c.cone = hc.cone;
  c.cone.homogeneous = false;
  c.cone.target_degree = c.lhs.degree();
  c.cone.weights.clear();
  c.cone.equality_mults.clear();
  for (const auto& h : hc.cone.equality_mults) c.cone.equality_mults.push_back(h.dehomogenized());

  std::vector<std::size_t> remap(hc.cone.weights.size());
  for (std::size_t i = 0; i < hc.cone.weights.size(); ++i) {
    const auto w = hc.cone.weights[i].dehomogenized();
    std::size_t found = c.cone.weights.size();
    for (std::size_t j = 0; j < c.cone.weights.size(); ++j)
      if (c.cone.weights[j] == w) {
        found = j;
        break;
      }
    if (found == c.cone.weights.size()) c.cone.weights.push_back(w);
    remap[i] = found;
  }

  for (const auto& blk : hc.blocks) {
    CertBlock nb;
    nb.weight_index = remap[blk.weight_index];
    nb.Q = blk.Q;
    nb.basis.reserve(blk.basis.size());
    for (const auto& m : blk.basis) {
      std::vector<std::uint32_t> e(m.exponents().begin() + 1, m.exponents().end());
      nb.basis.push_back(Monomial(std::move(e)));
    }
    c.blocks.push_back(std::move(nb));
  }

  const ExactReport rep = verify_certificate(c.lhs, c);
  c.status = rep.status;
  c.residual_norm = rep.residual_poly_norm;
  return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Drivers. Every driver scalarizes matrix generators first and searches the
// scalar-weight shapes; positivity hypotheses stay with the caller and are
// only probed by the plausibility sampler.

/// Archimedean quadratic-module membership: F = sum_k w_k (SOS matrix),
/// weights {1, g_1, ..., g_m}. Callers wanting the Archimedean guarantee can
/// pre-apply add_ball().
inline CertifyResult scherer_hol(const PolyMatrix<Rational>& F, const GeneratorSet& gens_in,
                                 const CertifyOptions& opt = {}) {
  F.require_symmetric("scherer_hol");
  const auto gens = scalarized(gens_in);
  const int target = detail::even_ceil(std::max(std::max(F.degree(), 0), opt.D));
  const auto cone = build_cone(ConeKind::putinar, gens, opt.D, 0, target, /*homogeneous=*/false);
  auto res = detail::run_n_loop(CertKind::scherer_hol, 0, 0, opt, [&](int) {
    return std::make_tuple(F, Poly<Rational>::one(F.nvars()), cone);
  });
  detail::plausibility_report(res, F, gens_in, opt);
  if (res.status == CertifyStatus::inconclusive && !res.attempts.empty())
    res.message += (res.message.empty() ? "" : "\n") + std::string("retry with larger D");
  return res;
}

/// Cor.-style epsilon shift: certifies F + eps*I through the same shape.
inline CertifyResult eps_shift(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                               const CertifyOptions& opt) {
  if (!(opt.eps > Rational(0))) throw std::invalid_argument("eps_shift: eps must be > 0");
  F.require_symmetric("eps_shift");
  PolyMatrix<Rational> shifted =
      F + PolyMatrix<Rational>::constant_identity_times(F.size(), F.nvars(), opt.eps);
  auto res = scherer_hol(shifted, gens, opt);
  if (res.certificate) res.certificate->kind = CertKind::eps_shift;
  for (auto& a : res.attempts) (void)a;
  return res;
}

/// Semiring (Handelman-type) membership over compact polyhedra: weights are
/// products of the generators. Requires a linear generator.
inline CertifyResult handelman(const PolyMatrix<Rational>& F, const GeneratorSet& gens_in,
                               const CertifyOptions& opt = {}) {
  F.require_symmetric("handelman");
  const auto gens = scalarized(gens_in);
  bool has_linear = false;
  for (const auto& g : gens.scalar_gens)
    if (g.degree() == 1) has_linear = true;
  if (!has_linear)
    throw std::invalid_argument("handelman: generator set has no linear member");
  const int target = detail::even_ceil(std::max(std::max(F.degree(), 0), opt.D));
  const auto cone = build_cone(ConeKind::semiring, gens, opt.D, 0, target, /*homogeneous=*/false);
  auto res = detail::run_n_loop(CertKind::handelman, 0, 0, opt, [&](int) {
    return std::make_tuple(F, Poly<Rational>::one(F.nvars()), cone);
  });
  // Compactness-of-K(G-hat) plausibility: samples of the linear relaxation
  // should stay well inside the sampling box.
  if (opt.plausibility_check) {
    GeneratorSet lin(gens.nvars);
    for (const auto& g : gens.scalar_gens)
      if (g.degree() <= 1) lin.scalar_gens.push_back(g);
    SampleOptions so = opt.sample;
    so.count = std::min<std::size_t>(so.count, 200);
    so.max_attempts = 20000;
    const auto sample = sample_K(lin, so);
    double maxabs = 0.0;
    for (const auto& x : sample.points)
      for (double v : x) maxabs = std::max(maxabs, std::abs(v));
    std::ostringstream os;
    os << "plausibility: K(G-hat) samples " << sample.points.size() << ", max |x_i| = " << maxabs
       << " (box " << so.hi << "); compactness is the caller's hypothesis";
    res.message += (res.message.empty() ? "" : "\n") + os.str();
  }
  detail::plausibility_report(res, F, gens_in, opt);
  return res;
}

namespace detail {

inline CertifyResult homogeneous_denominator_driver(CertKind kind, const PolyMatrix<Rational>& F,
                                                    const GeneratorSet& gens_in,
                                                    const CertifyOptions& opt) {
  F.require_symmetric(to_string(kind));
  if (F.is_zero()) throw std::invalid_argument(std::string(to_string(kind)) + ": F must be nonzero");
  if (!F.is_homogeneous())
    throw std::invalid_argument(std::string(to_string(kind)) + ": F must be homogeneous");
  const int d = F.degree();
  if (d % 2 != 0)
    throw std::invalid_argument(std::string(to_string(kind)) + ": F must have even degree");
  const auto gens = scalarized(gens_in);
  require_even_homogeneous_gens(gens, to_string(kind));

  const std::size_t n = F.nvars();
  const bool polya_family = kind == CertKind::polya_pv || kind == CertKind::polya;
  const bool marshall_family = kind == CertKind::marshall;
  if (marshall_family) {
    if (!(opt.eps > Rational(0)))
      throw std::invalid_argument("marshall: eps must be > 0");
    if (!(opt.lambda > Rational(0)))
      throw std::invalid_argument("marshall: lambda must be > 0");
  }

  const Poly<Rational> base = polya_family ? sum_of_vars_poly<Rational>(n)
                                           : sum_of_squares_poly<Rational>(n);
  const DenomKind denom_kind = polya_family ? DenomKind::sum_lin : DenomKind::sum_sq;
  const ConeKind cone_kind = polya_family ? ConeKind::polya_pv : ConeKind::putinar;

  int n_min = std::max(0, opt.N_min);
  if (marshall_family) n_min = std::max(n_min, d / 2);
  int n_max = std::max(n_min, default_n_max(d, opt));

  auto make = [&](int N) {
    if (marshall_family) {
      // sigma^{N-d/2} (F + eps/lambda^d * sigma^{d/2} I)
      Rational lam_pow(1);
      for (int i = 0; i < d; ++i) lam_pow *= opt.lambda;
      const Rational shift = opt.eps / lam_pow;
      PolyMatrix<Rational> inner = F;
      const Poly<Rational> sig_half = base.pow(static_cast<unsigned>(d / 2));
      inner += PolyMatrix<Rational>::identity(F.size(), n).scaled_by_poly(sig_half.scaled(shift));
      const Poly<Rational> denom_poly = base.pow(static_cast<unsigned>(N - d / 2));
      PolyMatrix<Rational> lhs = inner.scaled_by_poly(denom_poly);
      auto cone = build_cone(cone_kind, gens, opt.D, N - d / 2, 2 * N, /*homogeneous=*/true,
                             denom_kind);
      return std::make_tuple(std::move(lhs), denom_poly, std::move(cone));
    }
    const Poly<Rational> denom_poly = base.pow(static_cast<unsigned>(N));
    PolyMatrix<Rational> lhs = F.scaled_by_poly(denom_poly);
    const int target = d + N * (polya_family ? 1 : 2);
    auto cone = build_cone(cone_kind, gens, opt.D, N, target, /*homogeneous=*/true, denom_kind);
    return std::make_tuple(std::move(lhs), denom_poly, std::move(cone));
  };

  auto res = run_n_loop(kind, n_min, n_max, opt, make);
  if (marshall_family && !opt.lambda_given)
    res.message += (res.message.empty() ? "" : "\n") +
                   std::string("warning: lambda defaulted to 1; it scales eps only");
  plausibility_report(res, F, gens_in, opt);
  if (res.status == CertifyStatus::inconclusive && !res.attempts.empty()) {
    std::ostringstream os;
    os << "no feasible N in [" << n_min << "," << n_max << "]; statuses:";
    for (const auto& a : res.attempts) os << " N=" << a.N << ":" << a.outcome;
    res.message += (res.message.empty() ? "" : "\n") + os.str();
  }
  return res;
}

inline CertifyResult nonhomog_wrapper(CertKind kind, CertKind inner_kind,
                                      const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                                      const CertifyOptions& opt) {
  F.require_symmetric(to_string(kind));
  if (F.is_zero()) throw std::invalid_argument(std::string(to_string(kind)) + ": F must be nonzero");
  if (F.degree() % 2 != 0)
    throw std::invalid_argument(std::string(to_string(kind)) + ": F must have even degree");
  require_even_degree_gens(gens, to_string(kind));

  const PolyMatrix<Rational> Fh = F.homogenized();
  const GeneratorSet gens_h = gens.homogenized();
  CertifyOptions inner_opt = opt;
  inner_opt.plausibility_check = false;
  auto res = homogeneous_denominator_driver(inner_kind, Fh, gens_h, inner_opt);
  if (res.certificate) {
    auto c = dehomogenize_certificate(*res.certificate);
    c.kind = kind;
    res.certificate = std::move(c);
    res.status = res.certificate->status == CertStatus::exact ? CertifyStatus::exact
                                                              : CertifyStatus::numeric;
  }
  plausibility_report(res, F, gens, opt);
  return res;
}

}  // namespace detail

/// (sum X_i^2)^N F in M(G)^t for homogeneous F of even degree.
inline CertifyResult putinar_vasilescu(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                                       const CertifyOptions& opt = {}) {
  return detail::homogeneous_denominator_driver(CertKind::putinar_vasilescu, F, gens, opt);
}

/// (sum X_i^2)^N F is a sum of matrix squares (gens = empty).
inline CertifyResult reznick(const PolyMatrix<Rational>& F, const CertifyOptions& opt = {}) {
  GeneratorSet empty(F.nvars());
  auto res = detail::homogeneous_denominator_driver(CertKind::reznick, F, empty, opt);
  return res;
}

/// (1 + sum X_i^2)^N F via homogenize -> certify -> X_0 := 1.
inline CertifyResult pv_nonhomog(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                                 const CertifyOptions& opt = {}) {
  return detail::nonhomog_wrapper(CertKind::pv_nonhomog, CertKind::putinar_vasilescu, F, gens, opt);
}

/// (sum X_i)^N F with monomial-times-generator-product weights (nonnegative
/// coefficients by construction).
inline CertifyResult polya_pv(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                              const CertifyOptions& opt = {}) {
  return detail::homogeneous_denominator_driver(CertKind::polya_pv, F, gens, opt);
}

/// (sum X_i)^N F with pure monomial weights (gens = empty).
inline CertifyResult polya(const PolyMatrix<Rational>& F, const CertifyOptions& opt = {}) {
  GeneratorSet empty(F.nvars());
  return detail::homogeneous_denominator_driver(CertKind::polya, F, empty, opt);
}

/// (1 + sum X_i)^N F via homogenize -> polya_pv -> X_0 := 1.
inline CertifyResult ppv_nonhomog(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                                  const CertifyOptions& opt = {}) {
  return detail::nonhomog_wrapper(CertKind::ppv_nonhomog, CertKind::polya_pv, F, gens, opt);
}

/// sigma^{N-d/2} (F + eps/lambda^d sigma^{d/2} I) in M(G)^t.
inline CertifyResult marshall(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                              const CertifyOptions& opt) {
  return detail::homogeneous_denominator_driver(CertKind::marshall, F, gens, opt);
}

/// (1+sigma)^{N-d/2} (F + eps/lambda^d (1+sigma)^{d/2} I) via homogenization.
inline CertifyResult marshall_nonhomog(const PolyMatrix<Rational>& F, const GeneratorSet& gens,
                                       const CertifyOptions& opt) {
  return detail::nonhomog_wrapper(CertKind::marshall_nonhomog, CertKind::marshall, F, gens, opt);
}

/// Dispatch by kind (CLI entry point).
inline CertifyResult run_driver(CertKind kind, const PolyMatrix<Rational>& F,
                                const GeneratorSet& gens, const CertifyOptions& opt) {
  switch (kind) {
    case CertKind::scherer_hol: return scherer_hol(F, gens, opt);
    case CertKind::eps_shift: return eps_shift(F, gens, opt);
    case CertKind::handelman: return handelman(F, gens, opt);
    case CertKind::putinar_vasilescu: return putinar_vasilescu(F, gens, opt);
    case CertKind::reznick: return reznick(F, opt);
    case CertKind::pv_nonhomog: return pv_nonhomog(F, gens, opt);
    case CertKind::polya_pv: return polya_pv(F, gens, opt);
    case CertKind::polya: return polya(F, opt);
    case CertKind::ppv_nonhomog: return ppv_nonhomog(F, gens, opt);
    case CertKind::marshall: return marshall(F, gens, opt);
    case CertKind::marshall_nonhomog: return marshall_nonhomog(F, gens, opt);
  }
  throw std::invalid_argument("run_driver: unknown kind");
}

}  // namespace psatz
