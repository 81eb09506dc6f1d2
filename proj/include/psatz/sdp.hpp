#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "psatz/gram.hpp"

namespace psatz {

struct SdpOptions {
  double tol_r = 1e-8;   // residual tolerance (relative to problem scale)
  double tol_e = 1e-9;   // eigenvalue tolerance for "psd enough"
  int max_iter = 200;
  std::uint64_t seed = 0;  // recorded in the solution; the algorithm is deterministic
  std::ostream* log = nullptr;  // one line per iteration: iter, lambda, residual
};

enum class SolveStatus { feasible, infeasible_evidence, inconclusive };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible_evidence: return "infeasible_evidence";
    case SolveStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct SdpSolution {
  SolveStatus status = SolveStatus::inconclusive;
  std::vector<Eigen::MatrixXd> Q;   // per block, symmetric
  std::vector<double> free_vars;
  double margin = 0.0;              // achieved max-margin lambda (Q - lambda I psd)
  double max_residual = std::numeric_limits<double>::infinity();
  double min_eig = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::uint64_t seed = 0;
  double problem_scale = 1.0;
  bool used_fallback = false;
  // Infeasibility evidence (original row scaling): sum_j y_j C_{k,j} < 0 on
  // every block with y^T b > 0.
  std::vector<double> dual_y;
  double dual_block_margin = 0.0;
  double dual_objective = 0.0;
};

struct DualEvidence {
  bool valid = false;
  double margin = 0.0;
};

// ---------------------------------------------------------------------------
// Normalized double-precision view of an SdpProblem. Row scales are computed
// in exact arithmetic, so scaling the whole problem by a rational constant
// yields bitwise-identical normalized data.

namespace detail {

struct NormTrip {
  std::size_t row, i, j;
  double c;  // multiplies the independent upper-triangular variable Q[i][j]
};

struct NormalizedSdp {
  std::size_t m = 0;
  std::vector<std::size_t> dims;
  std::vector<std::vector<NormTrip>> block_trips;
  std::vector<NormTrip> free_trips;  // (row, var, c)
  std::size_t n_free = 0;
  Eigen::VectorXd b;
  Eigen::VectorXd trace_col;  // per row: sum over blocks of tr(C_{k,row})
  std::vector<double> row_scale;
  double bmax = 0.0;
};

inline NormalizedSdp normalize(const SdpProblem& p) {
  NormalizedSdp nd;
  nd.m = p.rows.size();
  nd.n_free = p.free_var_count;
  for (const auto& bl : p.blocks) nd.dims.push_back(bl.dim);

  std::vector<Rational> scale(nd.m, Rational(0));
  auto bump = [&](std::size_t row, const Rational& c) {
    Rational a = c.abs();
    if (scale[row] < a) scale[row] = a;
  };
  for (const auto& entries : p.block_entries)
    for (const auto& e : entries) bump(e.row, e.c);
  for (const auto& e : p.free_entries) bump(e.row, e.c);
  for (auto& s : scale)
    if (s.is_zero()) s = Rational(1);

  nd.block_trips.resize(p.blocks.size());
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    nd.block_trips[k].reserve(p.block_entries[k].size());
    for (const auto& e : p.block_entries[k])
      nd.block_trips[k].push_back({e.row, e.i, e.j, (e.c / scale[e.row]).to_double()});
  }
  for (const auto& e : p.free_entries)  // free trips store the var index in i
    nd.free_trips.push_back({e.row, e.var, 0, (e.c / scale[e.row]).to_double()});

  nd.b.resize(static_cast<Eigen::Index>(nd.m));
  for (std::size_t r = 0; r < nd.m; ++r) nd.b[static_cast<Eigen::Index>(r)] = (p.b[r] / scale[r]).to_double();
  nd.bmax = nd.m ? nd.b.cwiseAbs().maxCoeff() : 0.0;

  nd.trace_col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd.m));
  for (const auto& trips : nd.block_trips)
    for (const auto& t : trips)
      if (t.i == t.j) nd.trace_col[static_cast<Eigen::Index>(t.row)] += t.c;

  nd.row_scale.reserve(nd.m);
  for (const auto& s : scale) nd.row_scale.push_back(s.to_double());
  return nd;
}

inline Eigen::MatrixXd dense_constraint(const NormalizedSdp& nd, std::size_t k, std::size_t row) {
  const auto n = static_cast<Eigen::Index>(nd.dims[k]);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : nd.block_trips[k]) {
    if (t.row != row) continue;
    const auto i = static_cast<Eigen::Index>(t.i), j = static_cast<Eigen::Index>(t.j);
    if (i == j) C(i, i) += t.c;
    else {
      C(i, j) += 0.5 * t.c;
      C(j, i) += 0.5 * t.c;
    }
  }
  return C;
}

// <C_row, S> for symmetric S, using the upper-triangular coefficient
// convention (equals sum c * S(i,j) over stored triplets).
inline double constraint_dot(const NormalizedSdp& nd, std::size_t k, std::size_t row,
                             const Eigen::MatrixXd& S) {
  double acc = 0.0;
  for (const auto& t : nd.block_trips[k])
    if (t.row == row) acc += t.c * S(static_cast<Eigen::Index>(t.i), static_cast<Eigen::Index>(t.j));
  return acc;
}

inline Eigen::VectorXd apply_A(const NormalizedSdp& nd, const std::vector<Eigen::MatrixXd>& X,
                               const Eigen::VectorXd& xf) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd.m));
  for (std::size_t k = 0; k < nd.block_trips.size(); ++k)
    for (const auto& t : nd.block_trips[k])
      out[static_cast<Eigen::Index>(t.row)] +=
          t.c * X[k](static_cast<Eigen::Index>(t.i), static_cast<Eigen::Index>(t.j));
  // xf[0] is the margin variable, remaining entries are the problem's free vars
  if (xf.size() > 0) out += nd.trace_col * xf[0];
  for (const auto& t : nd.free_trips)
    out[static_cast<Eigen::Index>(t.row)] += t.c * xf[static_cast<Eigen::Index>(t.i) + 1];
  return out;
}

inline double sym_min_eig(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double sym_max_eig(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Largest step alpha (<= 1) keeping S + alpha * dS positive definite, with
// fraction-to-boundary tau.
inline double max_psd_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& dS, double tau) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd A = L.triangularView<Eigen::Lower>().solve(dS);
  Eigen::MatrixXd M = L.triangularView<Eigen::Lower>().solve(A.transpose()).transpose();
  M = 0.5 * (M + M.transpose());
  const double nu = sym_min_eig(M);
  if (nu >= 0.0) return 1.0;
  return std::min(1.0, -tau / nu);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Independent audit: recomputes residual and eigenvalues from the problem
// data and a candidate (Q, free_vars); never reads solver state.

struct SolutionAudit {
  double max_residual = std::numeric_limits<double>::infinity();
  double min_eig = -std::numeric_limits<double>::infinity();
  double problem_scale = 1.0;
};

inline SolutionAudit audit_solution(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& Q,
                                    const std::vector<double>& free_vars) {
  const auto nd = detail::normalize(p);
  SolutionAudit a;
  a.problem_scale = std::max(1.0, nd.bmax);
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd.n_free) + 1);
  for (std::size_t f = 0; f < free_vars.size() && f < nd.n_free; ++f)
    xf[static_cast<Eigen::Index>(f) + 1] = free_vars[f];
  const Eigen::VectorXd r = nd.b - detail::apply_A(nd, Q, xf);
  a.max_residual = nd.m ? r.cwiseAbs().maxCoeff() : 0.0;
  a.min_eig = 0.0;
  for (std::size_t k = 0; k < Q.size(); ++k) {
    const double e = detail::sym_min_eig(Q[k]);
    if (k == 0 || e < a.min_eig) a.min_eig = e;
  }
  return a;
}

/// Recomputes sum_j y_j C_{k,j} eigenvalues and y^T b from the original
/// (unnormalized) problem data. valid implies no psd-feasible point exists
/// for this block structure: any feasible Q would give
/// 0 < y^T b = sum_k <sum_j y_j C_{k,j}, Q_k> + (B^T y)^T u <= 0.
inline DualEvidence check_dual_evidence(const SdpProblem& p, const std::vector<double>& y) {
  if (y.size() != p.rows.size())
    throw std::invalid_argument("check_dual_evidence: y dimension mismatch");
  DualEvidence ev;
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, std::abs(v));
  double cmax = 0.0;

  double yb = 0.0;
  for (std::size_t r = 0; r < p.rows.size(); ++r) yb += y[r] * p.b[r].to_double();

  // Free-variable columns must be annihilated, otherwise u could flip the sign.
  std::vector<double> bty(p.free_var_count, 0.0);
  for (const auto& e : p.free_entries) {
    const double c = e.c.to_double();
    cmax = std::max(cmax, std::abs(c));
    bty[e.var] += y[e.row] * c;
  }

  double min_block_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(p.blocks[k].dim);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : p.block_entries[k]) {
      const double c = e.c.to_double();
      cmax = std::max(cmax, std::abs(c));
      const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
      if (i == j) M(i, i) += y[e.row] * c;
      else {
        M(i, j) += 0.5 * y[e.row] * c;
        M(j, i) += 0.5 * y[e.row] * c;
      }
    }
    min_block_margin = std::min(min_block_margin, -detail::sym_max_eig(M));
  }
  if (p.blocks.empty()) min_block_margin = 0.0;

  const double ref = std::max(1.0, ymax * cmax);
  const double delta = 1e-12 * ref;
  double free_viol = 0.0;
  for (double v : bty) free_viol = std::max(free_viol, std::abs(v));

  ev.margin = std::min(min_block_margin / ref, yb);
  ev.valid = yb > delta && min_block_margin > delta && free_viol <= 1e-9 * ref;
  return ev;
}

// ---------------------------------------------------------------------------
// Solver

namespace detail {

/// Alternating projection between the affine constraint set and the psd cone.
/// Used when the interior-point Schur systems degenerate; produces boundary
/// points rather than interior ones.
inline bool projection_fallback(const NormalizedSdp& nd, std::vector<Eigen::MatrixXd>& X,
                                Eigen::VectorXd& xf, int iters, double tol) {
  const auto m = static_cast<Eigen::Index>(nd.m);
  // Gram matrix of the constraint map (including margin + free columns).
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < nd.block_trips.size(); ++k) {
    const auto& trips = nd.block_trips[k];
    for (std::size_t a = 0; a < trips.size(); ++a)
      for (std::size_t b2 = 0; b2 < trips.size(); ++b2) {
        if (trips[a].i != trips[b2].i || trips[a].j != trips[b2].j) continue;
        const double f = trips[a].i == trips[a].j ? 1.0 : 0.5;
        G(static_cast<Eigen::Index>(trips[a].row), static_cast<Eigen::Index>(trips[b2].row)) +=
            f * trips[a].c * trips[b2].c;
      }
  }
  G += nd.trace_col * nd.trace_col.transpose();
  for (const auto& a : nd.free_trips)
    for (const auto& b2 : nd.free_trips)
      if (a.i == b2.i)
        G(static_cast<Eigen::Index>(a.row), static_cast<Eigen::Index>(b2.row)) += a.c * b2.c;
  G.diagonal().array() += 1e-12 * std::max(1.0, G.diagonal().maxCoeff());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success) return false;

  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd r = nd.b - apply_A(nd, X, xf);
    if (r.cwiseAbs().maxCoeff() <= tol) {
      // Residual met; clamp once more so eigenvalues are clean, then stop if
      // the clamp does not break the residual.
      bool all_psd = true;
      for (auto& Xk : X)
        if (sym_min_eig(Xk) < -tol) all_psd = false;
      if (all_psd) return true;
    }
    const Eigen::VectorXd z = ldlt.solve(r);
    // X update: dX_k = sum_j z_j C_{k,j}
    for (std::size_t k = 0; k < X.size(); ++k)
      for (const auto& t : nd.block_trips[k]) {
        const double f = t.i == t.j ? 1.0 : 0.5;
        const double add = f * t.c * z[static_cast<Eigen::Index>(t.row)];
        X[k](static_cast<Eigen::Index>(t.i), static_cast<Eigen::Index>(t.j)) += add;
        if (t.i != t.j) X[k](static_cast<Eigen::Index>(t.j), static_cast<Eigen::Index>(t.i)) += add;
      }
    xf[0] += nd.trace_col.dot(z);
    for (const auto& t : nd.free_trips)
      xf[static_cast<Eigen::Index>(t.i) + 1] += t.c * z[static_cast<Eigen::Index>(t.row)];
    // psd projection
    for (auto& Xk : X) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Xk);
      if (es.info() != Eigen::Success) return false;
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      Xk = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      Xk = 0.5 * (Xk + Xk.transpose());
    }
  }
  return false;
}

}  // namespace detail

/// Primal-dual interior-point solve of the block psd feasibility problem in
/// max-margin form: maximize lambda s.t. A(X) + lambda*tr-col + B u = b with
/// X psd (so Q = X + lambda I satisfies the original constraints). Nesterov-
/// Todd scaling, one Mehrotra-style adaptive centering solve per iteration,
/// dense Schur complement. Deterministic for fixed inputs.
inline SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {}) {
  if (p.blocks.empty() && p.rows.empty())
    throw std::invalid_argument("solve: structurally empty problem");
  if (p.structurally_infeasible())
    throw std::invalid_argument("solve: problem is structurally infeasible; check impossible_rows");
  if (p.blocks.empty())
    throw std::invalid_argument("solve: no psd blocks");

  const auto nd = detail::normalize(p);
  const std::size_t nb = nd.dims.size();
  const auto m = static_cast<Eigen::Index>(nd.m);
  const auto nf = static_cast<Eigen::Index>(nd.n_free) + 1;  // margin var first

  SdpSolution sol;
  sol.seed = opt.seed;
  sol.problem_scale = std::max(1.0, nd.bmax);

  std::vector<Eigen::MatrixXd> X(nb), Z(nb);
  double total_dim = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const auto n = static_cast<Eigen::Index>(nd.dims[k]);
    const double xi = std::max(1.0, nd.bmax);
    X[k] = xi * Eigen::MatrixXd::Identity(n, n);
    Z[k] = Eigen::MatrixXd::Identity(n, n);
    total_dim += static_cast<double>(n);
  }
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  if (nd.m == 0) {  // no constraints: trivially feasible with identity blocks
    sol.status = SolveStatus::feasible;
    sol.Q = X;
    sol.free_vars.assign(nd.n_free, 0.0);
    sol.margin = 1.0;
    sol.max_residual = 0.0;
    sol.min_eig = 1.0;
    return sol;
  }

  // c^T x = -lambda (we maximize the margin).
  Eigen::VectorXd cf = Eigen::VectorXd::Zero(nf);
  cf[0] = -1.0;

  // Free columns as a dense m x nf matrix (nf is small: margin + multipliers).
  Eigen::MatrixXd AF = Eigen::MatrixXd::Zero(m, nf);
  AF.col(0) = nd.trace_col;
  for (const auto& t : nd.free_trips)
    AF(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.i) + 1) += t.c;

  std::vector<double> best_y;
  double best_ev_score = 0.0;

  // Best primal iterate seen (feasibility-first score); the path can lose
  // residual digits after its best point on boundary-feasible problems.
  std::vector<Eigen::MatrixXd> best_X;
  Eigen::VectorXd best_xf;
  double best_score = std::numeric_limits<double>::infinity();

  double prev_mu = std::numeric_limits<double>::infinity();
  int stall = 0;
  bool need_fallback = false;

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // Residuals.
    const Eigen::VectorXd rp = nd.b - detail::apply_A(nd, X, xf);
    std::vector<Eigen::MatrixXd> Rd(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto n = static_cast<Eigen::Index>(nd.dims[k]);
      Eigen::MatrixXd Aty = Eigen::MatrixXd::Zero(n, n);
      for (const auto& t : nd.block_trips[k]) {
        const auto i = static_cast<Eigen::Index>(t.i), j = static_cast<Eigen::Index>(t.j);
        const double add = (i == j ? 1.0 : 0.5) * t.c * y[static_cast<Eigen::Index>(t.row)];
        Aty(i, j) += add;
        if (i != j) Aty(j, i) += add;
      }
      Rd[k] = -Aty - Z[k];
    }
    const Eigen::VectorXd rf = cf - AF.transpose() * y;

    double gap = 0.0;
    for (std::size_t k = 0; k < nb; ++k) gap += (X[k].array() * Z[k].array()).sum();
    const double mu = gap / total_dim;

    const double pinf = rp.cwiseAbs().maxCoeff() / sol.problem_scale;
    double dinf = rf.cwiseAbs().maxCoeff();
    for (const auto& R : Rd) dinf = std::max(dinf, R.cwiseAbs().maxCoeff());
    const double lambda = xf[0];
    const double pobj = -lambda;
    const double dobj = nd.b.dot(y);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opt.log)
      (*opt.log) << "iter " << iter << " lambda " << lambda << " residual " << pinf << " gap "
                 << relgap << "\n";

    {
      // score: residual dominates; once residual is fine, prefer larger margin
      const double score = pinf <= 0.5 * opt.tol_r ? -lambda : 1e6 * (1.0 + pinf);
      if (score < best_score) {
        best_score = score;
        best_X = X;
        best_xf = xf;
      }
    }

    // Record a dual infeasibility-evidence candidate while the dual iterate
    // is still interior. Validated exactly at exit.
    if (dobj > 1e-10 && dinf < 1e-7) {
      double zmin = std::numeric_limits<double>::infinity();
      for (const auto& Zk : Z) zmin = std::min(zmin, detail::sym_min_eig(Zk));
      const double score = std::min(zmin, dobj);
      if (score > best_ev_score) {
        best_ev_score = score;
        best_y.assign(static_cast<std::size_t>(m), 0.0);
        for (Eigen::Index r = 0; r < m; ++r)
          best_y[static_cast<std::size_t>(r)] = y[r] / nd.row_scale[static_cast<std::size_t>(r)];
      }
    }

    if (pinf < 0.1 * opt.tol_r && dinf < 1e-9 && relgap < 1e-10) break;
    if (mu < 1e-14 && pinf < 0.1 * opt.tol_r) break;
    if (prev_mu / mu < 1.0 + 1e-3 && pinf < opt.tol_r) ++stall;
    else stall = 0;
    if (stall >= 5) break;
    prev_mu = mu;

    // NT scaling. A failed factorization near the boundary gets one
    // eigenvalue-clamp retry before giving up on the iteration.
    std::vector<Eigen::MatrixXd> W(nb), Zinv(nb);
    bool scale_ok = true;
    auto clamp_spd = [](Eigen::MatrixXd& S) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      if (es.info() != Eigen::Success) return false;
      const double floor_v = std::max(1e-14, 1e-14 * es.eigenvalues().cwiseAbs().maxCoeff());
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor_v);
      S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      S = 0.5 * (S + S.transpose());
      return true;
    };
    for (std::size_t k = 0; k < nb; ++k) {
      Eigen::LLT<Eigen::MatrixXd> lx(X[k]), lz(Z[k]);
      if (lx.info() != Eigen::Success) {
        if (!clamp_spd(X[k])) { scale_ok = false; break; }
        lx.compute(X[k]);
      }
      if (lz.info() != Eigen::Success) {
        if (!clamp_spd(Z[k])) { scale_ok = false; break; }
        lz.compute(Z[k]);
      }
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        scale_ok = false;
        break;
      }
      Eigen::MatrixXd Lx = lx.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Lx,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv.minCoeff() <= 0.0 || !std::isfinite(sv.minCoeff())) {
        scale_ok = false;
        break;
      }
      Eigen::MatrixXd G = Lx * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
      W[k] = G * G.transpose();
      const auto n = static_cast<Eigen::Index>(nd.dims[k]);
      Zinv[k] = lz.solve(Eigen::MatrixXd::Identity(n, n));
      Zinv[k] = 0.5 * (Zinv[k] + Zinv[k].transpose());
    }
    if (!scale_ok) {
      need_fallback = true;
      break;
    }

    // Schur complement M_jl = sum_k <C_{k,j}, W_k C_{k,l} W_k>.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    std::vector<std::vector<std::size_t>> rows_in_block(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      std::vector<bool> seen(nd.m, false);
      for (const auto& t : nd.block_trips[k])
        if (!seen[t.row]) {
          seen[t.row] = true;
          rows_in_block[k].push_back(t.row);
        }
    }
    for (std::size_t k = 0; k < nb; ++k) {
      for (const std::size_t j : rows_in_block[k]) {
        const Eigen::MatrixXd Cj = detail::dense_constraint(nd, k, j);
        const Eigen::MatrixXd S = W[k] * Cj * W[k];
        for (const std::size_t l : rows_in_block[k]) {
          if (l < j) continue;
          M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) +=
              detail::constraint_dot(nd, k, l, S);
        }
      }
    }
    M = M.selfadjointView<Eigen::Upper>();

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + nf, m + nf);
    K.topLeftCorner(m, m) = M;
    K.topRightCorner(m, nf) = AF;
    K.bottomLeftCorner(nf, m) = AF.transpose();
    Eigen::MatrixXd K_reg = K;
    const double reg = 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
    K_reg.topLeftCorner(m, m).diagonal().array() += reg;
    K_reg.bottomRightCorner(nf, nf).diagonal().array() -= reg;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K_reg);

    // Solve against the unregularized system with the regularized factor as a
    // preconditioner; the refinement recovers the digits the barrier
    // ill-conditioning eats near a singular optimum.
    auto kkt_solve = [&](const Eigen::VectorXd& rhs) {
      Eigen::VectorXd x = lu.solve(rhs);
      for (int ref = 0; ref < 3; ++ref) {
        const Eigen::VectorXd rr = rhs - K * x;
        if (!rr.allFinite()) break;
        if (rr.cwiseAbs().maxCoeff() <= 1e-16 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) break;
        x += lu.solve(rr);
      }
      return x;
    };

    auto solve_direction = [&](double sigma_mu)
        -> std::optional<std::tuple<std::vector<Eigen::MatrixXd>, std::vector<Eigen::MatrixXd>,
                                    Eigen::VectorXd, Eigen::VectorXd>> {
      // Rc = sigma*mu*Z^{-1} - X; dX + W dZ W = Rc; dZ = Rd - A^T dy.
      Eigen::VectorXd h(m + nf);
      for (Eigen::Index r = 0; r < m; ++r) h[r] = rp[r];
      for (std::size_t k = 0; k < nb; ++k) {
        const Eigen::MatrixXd T = (sigma_mu * Zinv[k] - X[k]) - W[k] * Rd[k] * W[k];
        for (const std::size_t j : rows_in_block[k])
          h[static_cast<Eigen::Index>(j)] -= detail::constraint_dot(nd, k, j, T);
      }
      h.tail(nf) = rf;
      const Eigen::VectorXd sol_v = kkt_solve(h);
      if (!sol_v.allFinite()) return std::nullopt;
      const Eigen::VectorXd dy = sol_v.head(m);
      const Eigen::VectorXd dxf = sol_v.tail(nf);
      std::vector<Eigen::MatrixXd> dZ(nb), dX(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const auto n = static_cast<Eigen::Index>(nd.dims[k]);
        Eigen::MatrixXd Atdy = Eigen::MatrixXd::Zero(n, n);
        for (const auto& t : nd.block_trips[k]) {
          const auto i = static_cast<Eigen::Index>(t.i), j = static_cast<Eigen::Index>(t.j);
          const double add = (i == j ? 1.0 : 0.5) * t.c * dy[static_cast<Eigen::Index>(t.row)];
          Atdy(i, j) += add;
          if (i != j) Atdy(j, i) += add;
        }
        dZ[k] = Rd[k] - Atdy;
        dZ[k] = 0.5 * (dZ[k] + dZ[k].transpose());
        dX[k] = (sigma_mu * Zinv[k] - X[k]) - W[k] * dZ[k] * W[k];
        dX[k] = 0.5 * (dX[k] + dX[k].transpose());
        if (!dX[k].allFinite() || !dZ[k].allFinite()) return std::nullopt;
      }
      return std::make_tuple(std::move(dX), std::move(dZ), dy, dxf);
    };

    // Predictor (affine) to pick the centering weight.
    auto aff = solve_direction(0.0);
    if (!aff) {
      need_fallback = true;
      break;
    }
    double ap_aff = 1.0, ad_aff = 1.0;
    {
      const auto& [dX, dZ, dy, dxf] = *aff;
      for (std::size_t k = 0; k < nb; ++k) {
        ap_aff = std::min(ap_aff, detail::max_psd_step(X[k], dX[k], 1.0));
        ad_aff = std::min(ad_aff, detail::max_psd_step(Z[k], dZ[k], 1.0));
      }
      double gap_aff = 0.0;
      for (std::size_t k = 0; k < nb; ++k)
        gap_aff += ((X[k] + ap_aff * dX[k]).array() * (Z[k] + ad_aff * dZ[k]).array()).sum();
      const double mu_aff = std::max(gap_aff / total_dim, 0.0);
      const double ratio = mu > 0 ? mu_aff / mu : 0.0;
      double sigma = ratio * ratio * ratio;
      sigma = std::clamp(sigma, 1e-4, 0.9);

      auto dir = solve_direction(sigma * mu);
      if (!dir) {
        need_fallback = true;
        break;
      }
      const auto& [dX2, dZ2, dy2, dxf2] = *dir;
      const double tau = 0.98;
      double ap = 1.0, ad = 1.0;
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, detail::max_psd_step(X[k], dX2[k], tau));
        ad = std::min(ad, detail::max_psd_step(Z[k], dZ2[k], tau));
      }
      if (ap < 1e-8 && ad < 1e-8) {
        need_fallback = true;
        break;
      }
      for (std::size_t k = 0; k < nb; ++k) {
        X[k] += ap * dX2[k];
        X[k] = 0.5 * (X[k] + X[k].transpose());
        Z[k] += ad * dZ2[k];
        Z[k] = 0.5 * (Z[k] + Z[k].transpose());
      }
      xf += ap * dxf2;
      y += ad * dy2;
    }
  }
  sol.iterations = iter;

  // Assemble the candidate solution Q = X + lambda I.
  const double lambda = xf[0];
  sol.margin = lambda;
  sol.Q.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const auto n = static_cast<Eigen::Index>(nd.dims[k]);
    sol.Q[k] = X[k] + lambda * Eigen::MatrixXd::Identity(n, n);
  }
  sol.free_vars.assign(nd.n_free, 0.0);
  for (std::size_t f = 0; f < nd.n_free; ++f) sol.free_vars[f] = xf[static_cast<Eigen::Index>(f) + 1];

  auto finish_feasible = [&](bool fallback_used) {
    const auto audit = audit_solution(p, sol.Q, sol.free_vars);
    sol.max_residual = audit.max_residual;
    sol.min_eig = audit.min_eig;
    if (audit.max_residual <= opt.tol_r * sol.problem_scale && audit.min_eig >= -opt.tol_e) {
      sol.status = SolveStatus::feasible;
      sol.used_fallback = fallback_used;
      return true;
    }
    return false;
  };

  // The final iterate is often usable even when the loop exited on a
  // degenerate Schur system (boundary-feasible problems converge to margin 0).
  if (finish_feasible(false)) return sol;
  (void)need_fallback;

  // Retry from the best iterate along the path.
  if (!best_X.empty()) {
    const double bl = best_xf[0];
    for (std::size_t k = 0; k < nb; ++k) {
      const auto n = static_cast<Eigen::Index>(nd.dims[k]);
      sol.Q[k] = best_X[k] + bl * Eigen::MatrixXd::Identity(n, n);
    }
    for (std::size_t f = 0; f < nd.n_free; ++f)
      sol.free_vars[f] = best_xf[static_cast<Eigen::Index>(f) + 1];
    sol.margin = bl;
    if (finish_feasible(false)) return sol;
    // restore the final iterate for the fallback below
    for (std::size_t k = 0; k < nb; ++k) {
      const auto n = static_cast<Eigen::Index>(nd.dims[k]);
      sol.Q[k] = X[k] + lambda * Eigen::MatrixXd::Identity(n, n);
    }
    for (std::size_t f = 0; f < nd.n_free; ++f)
      sol.free_vars[f] = xf[static_cast<Eigen::Index>(f) + 1];
    sol.margin = lambda;
  }

  // Infeasibility evidence.
  if (!best_y.empty()) {
    const auto ev = check_dual_evidence(p, best_y);
    if (ev.valid) {
      sol.status = SolveStatus::infeasible_evidence;
      sol.dual_y = best_y;
      sol.dual_block_margin = ev.margin;
      double dobj = 0.0;
      for (std::size_t r = 0; r < best_y.size(); ++r) dobj += best_y[r] * p.b[r].to_double();
      sol.dual_objective = dobj;
      const auto audit = audit_solution(p, sol.Q, sol.free_vars);
      sol.max_residual = audit.max_residual;
      sol.min_eig = audit.min_eig;
      return sol;
    }
  }

  // Projection fallback for degenerate-but-feasible problems.
  {
    std::vector<Eigen::MatrixXd> Xp = sol.Q;
    Eigen::VectorXd xfp = xf;
    if (detail::projection_fallback(nd, Xp, xfp, 400, 0.05 * opt.tol_r * sol.problem_scale)) {
      sol.Q = Xp;
      sol.free_vars.assign(nd.n_free, 0.0);
      for (std::size_t f = 0; f < nd.n_free; ++f)
        sol.free_vars[f] = xfp[static_cast<Eigen::Index>(f) + 1];
      sol.margin = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        const double e = detail::sym_min_eig(sol.Q[k]);
        if (k == 0 || e < sol.margin) sol.margin = e;
      }
      if (finish_feasible(true)) return sol;
    }
  }

  sol.status = SolveStatus::inconclusive;
  const auto audit = audit_solution(p, sol.Q, sol.free_vars);
  sol.max_residual = audit.max_residual;
  sol.min_eig = audit.min_eig;
  return sol;
}

}  // namespace psatz
