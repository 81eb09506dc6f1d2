#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "psatz/certificate.hpp"
#include "psatz/densemat.hpp"
#include "psatz/gram.hpp"
#include "psatz/sdp.hpp"

namespace psatz {

// ---------------------------------------------------------------------------
// Exact rational psd check

struct PsdReport {
  bool psd = false;
  std::vector<Rational> pivots;  // in elimination order
};

/// LDL^T with symmetric (diagonal) pivoting in exact rationals. psd iff every
/// pivot is >= 0 and each zero pivot's remaining row is identically zero --
/// rational arithmetic admits no "almost zero".
inline PsdReport psd_rational(DenseMat<Rational> M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("psd_rational: matrix must be square");
  const std::size_t n = M.rows();
  if (!M.is_symmetric()) throw std::invalid_argument("psd_rational: matrix must be symmetric");
  PsdReport rep;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;

  for (std::size_t step = 0; step < n; ++step) {
    // Pick the largest remaining diagonal entry as pivot.
    std::size_t best = step;
    for (std::size_t i = step + 1; i < n; ++i)
      if (M(idx[i], idx[i]).abs() > M(idx[best], idx[best]).abs()) best = i;
    std::swap(idx[step], idx[best]);
    const std::size_t pi = idx[step];
    const Rational d = M(pi, pi);

    if (d.is_zero()) {
      // All remaining diagonal entries are zero (pivoting picked the largest).
      // psd requires the whole remaining submatrix to vanish.
      for (std::size_t i = step; i < n; ++i)
        for (std::size_t j = step; j < n; ++j)
          if (!M(idx[i], idx[j]).is_zero()) {
            rep.psd = false;
            rep.pivots.push_back(d);
            return rep;
          }
      for (std::size_t i = step; i < n; ++i) rep.pivots.push_back(Rational(0));
      rep.psd = true;
      return rep;
    }
    if (d.sign() < 0) {
      rep.pivots.push_back(d);
      rep.psd = false;
      return rep;
    }
    rep.pivots.push_back(d);
    for (std::size_t i = step + 1; i < n; ++i) {
      const Rational f = M(idx[i], pi) / d;
      if (f.is_zero()) continue;
      for (std::size_t j = step + 1; j < n; ++j)
        M(idx[i], idx[j]) -= f * M(pi, idx[j]);
    }
    for (std::size_t i = step + 1; i < n; ++i) {
      M(idx[i], pi) = Rational(0);
      M(pi, idx[i]) = Rational(0);
    }
  }
  rep.psd = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Exact least-change projection onto the constraint subspace

namespace detail {

/// Factorization of a symmetric psd rational matrix G (P^T G P = L D L^T)
/// reused across right-hand sides. Zero pivots are skipped; solve() returns
/// nullopt when the system is inconsistent at a skipped pivot.
class RationalLdlSolver {
 public:
  explicit RationalLdlSolver(DenseMat<Rational> G) : M_(std::move(G)), n_(M_.rows()) {
    idx_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) idx_[i] = i;
    lower_.assign(n_, {});
    d_.assign(n_, Rational(0));
    for (std::size_t step = 0; step < n_; ++step) {
      std::size_t best = step;
      for (std::size_t i = step + 1; i < n_; ++i)
        if (M_(idx_[i], idx_[i]).abs() > M_(idx_[best], idx_[best]).abs()) best = i;
      std::swap(idx_[step], idx_[best]);
      const std::size_t pi = idx_[step];
      const Rational d = M_(pi, pi);
      d_[step] = d;
      if (d.is_zero()) continue;  // psd: entire remaining row is zero as well
      auto& col = lower_[step];
      col.reserve(n_ - step - 1);
      for (std::size_t i = step + 1; i < n_; ++i) {
        const Rational f = M_(idx_[i], pi) / d;
        col.push_back(f);
        if (f.is_zero()) continue;
        for (std::size_t j = step + 1; j < n_; ++j)
          M_(idx_[i], idx_[j]) -= f * M_(pi, idx_[j]);
      }
    }
  }

  std::optional<std::vector<Rational>> solve(const std::vector<Rational>& rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("RationalLdlSolver: rhs size mismatch");
    std::vector<Rational> w(n_);
    for (std::size_t i = 0; i < n_; ++i) w[i] = rhs[idx_[i]];
    // Forward solve L w' = w.
    for (std::size_t step = 0; step < n_; ++step) {
      if (d_[step].is_zero()) {
        if (!w[step].is_zero()) return std::nullopt;  // inconsistent
        continue;
      }
      const auto& col = lower_[step];
      for (std::size_t i = 0; i < col.size(); ++i)
        if (!col[i].is_zero()) w[step + 1 + i] -= col[i] * w[step];
    }
    // Diagonal.
    for (std::size_t i = 0; i < n_; ++i)
      if (!d_[i].is_zero()) w[i] /= d_[i];
      else w[i] = Rational(0);
    // Backward solve L^T z = w.
    for (std::size_t step = n_; step-- > 0;) {
      if (d_[step].is_zero()) {
        w[step] = Rational(0);
        continue;
      }
      const auto& col = lower_[step];
      for (std::size_t i = 0; i < col.size(); ++i)
        if (!col[i].is_zero()) w[step] -= col[i] * w[step + 1 + i];
    }
    std::vector<Rational> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[idx_[i]] = w[i];
    return out;
  }

 private:
  DenseMat<Rational> M_;
  std::size_t n_;
  std::vector<std::size_t> idx_;
  std::vector<std::vector<Rational>> lower_;  // column multipliers per step
  std::vector<Rational> d_;
};

}  // namespace detail

namespace detail {

/// Best rational approximation of x with denominator <= max_den (continued
/// fractions); nullopt when no convergent lands within tol.
inline std::optional<Rational> rationalize(double x, long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // h_{-2}/k_{-2}, h_{-1}/k_{-1}
  double frac = x;
  for (int it = 0; it < 64; ++it) {
    const double a_f = std::floor(frac);
    if (std::abs(a_f) > 1e12) break;
    const long a = static_cast<long>(a_f);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (std::abs(q2) > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double rem = frac - a_f;
    if (std::abs(rem) < 1e-14) break;
    frac = 1.0 / rem;
    if (!std::isfinite(frac)) break;
  }
  if (q1 == 0) return std::nullopt;
  Rational r(p1, q1);
  if (std::abs(r.to_double() - x) <= tol) return r;
  return std::nullopt;
}

/// Rational kernel candidates for each block of a float solution: numeric
/// kernel basis -> RREF (canonical for the subspace) -> small-denominator
/// rationalization. Vectors that do not rationalize cleanly are dropped;
/// everything downstream is gated by exact checks, so this is heuristic-safe.
inline std::vector<std::vector<std::vector<Rational>>> rational_kernels(
    const std::vector<Eigen::MatrixXd>& Q, double rel_threshold = 1e-6, double rat_tol = 2e-5) {
  std::vector<std::vector<std::vector<Rational>>> out(Q.size());
  for (std::size_t k = 0; k < Q.size(); ++k) {
    const auto n = Q[k].rows();
    if (n == 0) continue;
    Eigen::MatrixXd S = 0.5 * (Q[k] + Q[k].transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) continue;
    const double emax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> kernel_cols;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(es.eigenvalues()[i]) < rel_threshold * emax) kernel_cols.push_back(i);
    if (kernel_cols.empty()) continue;

    Eigen::MatrixXd B(static_cast<Eigen::Index>(kernel_cols.size()), n);
    for (std::size_t r = 0; r < kernel_cols.size(); ++r)
      B.row(static_cast<Eigen::Index>(r)) = es.eigenvectors().col(kernel_cols[r]).transpose();

    // Numeric reduced row echelon form: canonical basis of the kernel space.
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < n && row < B.rows(); ++col) {
      Eigen::Index piv = row;
      for (Eigen::Index i = row + 1; i < B.rows(); ++i)
        if (std::abs(B(i, col)) > std::abs(B(piv, col))) piv = i;
      if (std::abs(B(piv, col)) < 1e-7) continue;
      B.row(row).swap(B.row(piv));
      B.row(row) /= B(row, col);
      for (Eigen::Index i = 0; i < B.rows(); ++i)
        if (i != row) B.row(i) -= B(i, col) * B.row(row);
      ++row;
    }
    for (Eigen::Index r = 0; r < row; ++r) {
      std::vector<Rational> v(static_cast<std::size_t>(n));
      bool ok = true;
      for (Eigen::Index c = 0; c < n && ok; ++c) {
        auto q = rationalize(B(r, c), 64, rat_tol);
        if (!q) ok = false;
        else v[static_cast<std::size_t>(c)] = *q;
      }
      if (ok) out[k].push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

struct RoundingSchedule {
  std::vector<int> denom_exponents = {3, 6, 9, 12};  // denominators 10^k
};

struct RoundResult {
  bool exact = false;               // constraints met exactly and all blocks psd
  std::vector<DenseMat<Rational>> Q;
  std::vector<Rational> free_vars;
  int denom_exp_used = -1;
  std::vector<PsdReport> psd_reports;
  double projection_distance = 0.0;  // float estimate of the least-change update
  bool used_facial_reduction = false;
};

/// Rounds a float solution to rationals on a denominator schedule, then
/// projects exactly back onto the coefficient-matching subspace via the
/// normal equations (minimum Frobenius-norm update), and keeps the first
/// schedule entry whose corrected blocks are rationally psd. Boundary
/// solutions get a second, facially-reduced attempt: the numeric Gram kernel
/// is rationalized and pinned with exact Q v = 0 constraints before the
/// projection, which keeps the correction inside the optimal face.
inline RoundResult round_project(const SdpSolution& sol, const SdpProblem& p,
                                 const RoundingSchedule& schedule = {}) {
  const std::size_t nb = p.blocks.size();
  if (sol.Q.size() != nb) throw std::invalid_argument("round_project: solution/problem mismatch");

  // Variable layout: per block upper-triangular entries, then free vars.
  struct VarRef {
    std::size_t block, i, j;  // block == nb means free var, index in i
  };
  std::vector<VarRef> vars;
  std::vector<std::size_t> block_var_base(nb, 0);
  for (std::size_t k = 0; k < nb; ++k) {
    block_var_base[k] = vars.size();
    const std::size_t d = p.blocks[k].dim;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) vars.push_back({k, i, j});
  }
  const std::size_t free_base = vars.size();
  for (std::size_t f = 0; f < p.free_var_count; ++f) vars.push_back({nb, f, 0});
  const std::size_t nv = vars.size();

  auto var_of = [&](std::size_t k, std::size_t i, std::size_t j) {
    const std::size_t d = p.blocks[k].dim;
    // index of (i,j), i<=j in the packed upper triangle relative to the block
    return block_var_base[k] + i * d - i * (i - 1) / 2 + (j - i);
  };

  // Sparse rows of the constraint map over this variable layout.
  const std::size_t m = p.rows.size();
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rowsA(m);
  for (std::size_t k = 0; k < nb; ++k)
    for (const auto& e : p.block_entries[k]) rowsA[e.row].push_back({var_of(k, e.i, e.j), e.c});
  for (const auto& e : p.free_entries) rowsA[e.row].push_back({free_base + e.var, e.c});

  // Weight of each variable in the Frobenius metric: off-diagonals count twice.
  std::vector<Rational> invw(nv, Rational(1));
  for (std::size_t v = 0; v < free_base; ++v)
    if (vars[v].i != vars[v].j) invw[v] = Rational(1, 2);

  auto make_solver = [&](const std::vector<std::vector<std::pair<std::size_t, Rational>>>& rows) {
    const std::size_t mm = rows.size();
    DenseMat<Rational> G(mm, mm);
    for (std::size_t r = 0; r < mm; ++r)
      for (std::size_t s = r; s < mm; ++s) {
        Rational acc(0);
        for (const auto& [va, ca] : rows[r])
          for (const auto& [vb, cb] : rows[s])
            if (va == vb) acc += ca * cb * invw[va];
        G(r, s) = acc;
        if (s != r) G(s, r) = std::move(acc);
      }
    return detail::RationalLdlSolver{std::move(G)};
  };
  const detail::RationalLdlSolver solver = make_solver(rowsA);

  // Facially reduced systems (lazy): plain rows plus exact Q v = 0 pins for
  // every rationalized kernel vector, one system per distinct kernel guess.
  // Each guess is gated by the exact checks below, so trying several
  // eigenvalue thresholds is sound.
  struct FacialSystem {
    std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
    std::optional<detail::RationalLdlSolver> solver;
  };
  std::vector<FacialSystem> facial;
  bool tried_kernels = false;
  auto ensure_facial = [&]() {
    if (tried_kernels) return;
    tried_kernels = true;
    // (eigenvalue threshold, rationalization tolerance) ladder. Clustered
    // near-zero eigenvalues mix their eigenvectors at roughly the cluster
    // gap ratio, so the looser tolerances are needed for half-converged
    // boundary solutions.
    const std::pair<double, double> ladder[] = {
        {1e-9, 1e-5}, {1e-9, 3e-3}, {3e-7, 3e-3}, {1e-4, 3e-3}};
    std::vector<std::vector<std::vector<std::vector<Rational>>>> seen;
    for (const auto& [threshold, rat_tol] : ladder) {
      const auto kernels = detail::rational_kernels(sol.Q, threshold, rat_tol);
      std::size_t nvec = 0;
      for (const auto& ks : kernels) nvec += ks.size();
      if (nvec == 0) continue;
      bool dup = false;
      for (const auto& s : seen) dup = dup || s == kernels;
      if (dup) continue;
      seen.push_back(kernels);
      FacialSystem fs;
      fs.rows = rowsA;
      for (std::size_t k = 0; k < nb; ++k) {
        const std::size_t d = p.blocks[k].dim;
        for (const auto& v : kernels[k])
          for (std::size_t i = 0; i < d; ++i) {
            std::vector<std::pair<std::size_t, Rational>> row;
            for (std::size_t j = 0; j < d; ++j)
              if (!v[j].is_zero()) row.push_back({var_of(k, std::min(i, j), std::max(i, j)), v[j]});
            if (!row.empty()) fs.rows.push_back(std::move(row));
          }
      }
      if (fs.rows.size() > m) {
        fs.solver.emplace(make_solver(fs.rows));
        facial.push_back(std::move(fs));
      }
    }
  };

  // One projection attempt from the given rounded point; returns true when
  // the corrected point satisfies the constraints exactly.
  auto project = [&](const std::vector<std::vector<std::pair<std::size_t, Rational>>>& rows,
                     const detail::RationalLdlSolver& lsolver, RoundResult& cur) {
    auto value_of = [&](std::size_t v) -> const Rational& {
      const auto& ref = vars[v];
      if (ref.block == nb) return cur.free_vars[ref.i];
      return cur.Q[ref.block](ref.i, ref.j);
    };
    const std::size_t mm = rows.size();
    std::vector<Rational> resid(mm, Rational(0));
    bool already_exact = true;
    for (std::size_t r = 0; r < mm; ++r) {
      Rational acc(0);
      for (const auto& [v, c] : rows[r]) acc += c * value_of(v);
      resid[r] = (r < m ? p.b[r] : Rational(0)) - acc;
      if (!resid[r].is_zero()) already_exact = false;
    }
    if (already_exact) return true;
    auto z = lsolver.solve(resid);
    if (!z) return false;
    std::vector<Rational> delta(nv, Rational(0));
    for (std::size_t r = 0; r < mm; ++r) {
      if ((*z)[r].is_zero()) continue;
      for (const auto& [v, c] : rows[r]) delta[v] += invw[v] * c * (*z)[r];
    }
    double dist2 = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (delta[v].is_zero()) continue;
      const auto& ref = vars[v];
      if (ref.block == nb) {
        cur.free_vars[ref.i] += delta[v];
      } else {
        cur.Q[ref.block](ref.i, ref.j) += delta[v];
        if (ref.i != ref.j) cur.Q[ref.block](ref.j, ref.i) += delta[v];
      }
      const double a = delta[v].to_double();
      dist2 += (ref.block != nb && ref.i != ref.j) ? 2 * a * a : a * a;
    }
    cur.projection_distance = std::sqrt(dist2);
    for (std::size_t r = 0; r < m; ++r) {
      Rational acc(0);
      for (const auto& [v, c] : rows[r]) acc += c * value_of(v);
      if (!(acc == p.b[r])) return false;
    }
    return true;
  };

  auto round_point = [&](int exp) {
    mpz_class denom(1);
    for (int i = 0; i < exp; ++i) denom *= 10;
    RoundResult cur;
    cur.denom_exp_used = exp;
    cur.Q.reserve(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      const std::size_t d = p.blocks[k].dim;
      DenseMat<Rational> Qk(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
          const double x =
              0.5 * (sol.Q[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                     sol.Q[k](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
          Qk(i, j) = round_to_denominator(x, denom);
          Qk(j, i) = Qk(i, j);
        }
      cur.Q.push_back(std::move(Qk));
    }
    cur.free_vars.resize(p.free_var_count);
    for (std::size_t f = 0; f < p.free_var_count; ++f)
      cur.free_vars[f] =
          round_to_denominator(f < sol.free_vars.size() ? sol.free_vars[f] : 0.0, denom);
    return cur;
  };

  auto check_psd = [&](RoundResult& cur) {
    bool all_psd = true;
    cur.psd_reports.clear();
    cur.psd_reports.reserve(nb);
    for (const auto& Qk : cur.Q) {
      cur.psd_reports.push_back(psd_rational(Qk));
      if (!cur.psd_reports.back().psd) all_psd = false;
    }
    cur.exact = all_psd;
    return all_psd;
  };

  RoundResult best;
  bool have_best = false;
  for (int exp : schedule.denom_exponents) {
    RoundResult cur = round_point(exp);
    if (project(rowsA, solver, cur) && check_psd(cur)) return cur;
    best = std::move(cur);
    have_best = true;

    // Facially reduced retries from a fresh rounding of the same denominator.
    ensure_facial();
    for (const auto& fs : facial) {
      RoundResult fr = round_point(exp);
      fr.used_facial_reduction = true;
      if (project(fs.rows, *fs.solver, fr) && check_psd(fr)) return fr;
    }
  }
  if (!have_best && !schedule.denom_exponents.empty())
    best = round_point(schedule.denom_exponents.back());
  return best;
}

// ---------------------------------------------------------------------------
// Certificate verification

struct ExactReport {
  CertStatus status = CertStatus::numeric;
  Rational residual_poly_norm;          // max |coefficient| of lhs - sum(blocks)
  std::vector<PsdReport> block_reports;
  int rounding_denom_exp = -1;
  double projection_distance = 0.0;
};

/// Recomputes the certificate identity from scratch in exact arithmetic:
/// expands every block, subtracts the expected lhs, and checks every Gram
/// matrix with psd_rational. Never reads solver statistics.
inline ExactReport verify_certificate(const PolyMatrix<Rational>& lhs, const Certificate& cert) {
  lhs.require_symmetric("verify_certificate");
  const std::size_t t = lhs.size();
  const std::size_t n = lhs.nvars();

  PolyMatrix<Rational> total(t, n);
  for (const auto& blk : cert.blocks) {
    if (blk.weight_index >= cert.cone.weights.size())
      throw std::invalid_argument("verify_certificate: block weight not in the declared cone");
    const auto& w = cert.cone.weights[blk.weight_index];
    if (w.nvars() != n)
      throw std::invalid_argument("verify_certificate: weight/lhs variable count mismatch");
    if (blk.Q.rows() != blk.basis.size() * t || blk.Q.cols() != blk.Q.rows())
      throw std::invalid_argument("verify_certificate: Gram size does not match basis");
    if (!blk.Q.is_symmetric())
      throw std::invalid_argument("verify_certificate: Gram matrix not symmetric");
    total += expand_block(w, blk.basis, blk.Q, t);
  }
  // Equality-multiplier contribution, if the certificate carries one.
  if (!cert.free_vars.empty()) {
    // Free vars parameterize h * H with H symmetric; reconstructing them needs
    // the same enumeration assemble() used.
    std::size_t f = 0;
    for (const auto& h : cert.cone.equality_mults) {
      if (h.is_zero()) continue;
      const int rem = cert.cone.target_degree - h.degree();
      if (rem < 0) continue;
      const auto mults = cert.cone.homogeneous ? monomials_exact(n, rem) : monomials_up_to(n, rem);
      for (const auto& g : mults)
        for (std::size_t u = 0; u < t; ++u)
          for (std::size_t v = u; v < t; ++v) {
            if (f >= cert.free_vars.size())
              throw std::invalid_argument("verify_certificate: free variable count mismatch");
            const Rational& c = cert.free_vars[f++];
            if (!c.is_zero()) {
              Poly<Rational> term(n);
              term.add_term(g, c);
              term = term * h;
              auto cur = total.at(u, v);
              cur += term;
              total.set(u, v, cur);
              if (v != u) {
                auto curl = total.at(v, u);
                curl += term;
                total.set(v, u, std::move(curl));
              }
            }
          }
    }
    if (f != cert.free_vars.size())
      throw std::invalid_argument("verify_certificate: free variable count mismatch");
  }

  ExactReport rep;
  rep.rounding_denom_exp = cert.rounding_denom_exp;
  PolyMatrix<Rational> diff = lhs - total;
  Rational norm(0);
  for (std::size_t u = 0; u < t; ++u)
    for (std::size_t v = 0; v < t; ++v)
      for (const auto& [mmono, c] : diff.at(u, v).terms()) {
        const Rational a = c.abs();
        if (a > norm) norm = a;
      }
  rep.residual_poly_norm = norm;

  bool all_psd = true;
  for (const auto& blk : cert.blocks) {
    rep.block_reports.push_back(psd_rational(blk.Q));
    if (!rep.block_reports.back().psd) all_psd = false;
  }
  rep.status = (norm.is_zero() && all_psd) ? CertStatus::exact : CertStatus::numeric;
  return rep;
}

}  // namespace psatz
