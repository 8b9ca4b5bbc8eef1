#include "dictid/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "dictid/errors.hpp"

namespace dictid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOptTol = 1e-9;   // reduced-cost tolerance
constexpr double kFeasTol = 1e-9;  // residual tolerance (relative)
constexpr double kPivTol = 1e-11;  // smallest acceptable pivot magnitude

enum class VarStatus { Basic, AtLower, AtUpper };

// Dense bounded-variable revised simplex, minimize c^T x s.t. A x = b,
// lo <= x <= hi. Every variable must have at least one finite bound.
// Phase I uses one artificial per row. Pricing is Dantzig (most improving
// reduced cost, ties by lowest index) and switches to Bland's rule (lowest
// eligible index entering, lowest variable index among ratio-test ties
// leaving) during degenerate stalls, which keeps the pivot sequence
// deterministic and cycle-free.
class Simplex {
 public:
  Simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
          const Eigen::VectorXd& c, const Eigen::VectorXd& lo,
          const Eigen::VectorXd& hi)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())) {
    total_ = n_ + m_;
    A_.resize(m_, total_);
    A_.leftCols(n_) = A;
    A_.rightCols(m_).setZero();
    b_ = b;
    cost_.resize(total_);
    cost_.head(n_) = c;
    cost_.tail(m_).setZero();
    lo_.resize(total_);
    hi_.resize(total_);
    lo_.head(n_) = lo;
    hi_.head(n_) = hi;
    lo_.tail(m_).setZero();
    hi_.tail(m_).setConstant(kInf);
    status_.assign(total_, VarStatus::AtLower);
    value_.assign(total_, 0.0);
  }

  // Returns false when Phase I cannot reach feasibility.
  bool solve_feasibility() {
    // Nonbasic structurals start at the finite bound nearest zero.
    for (int j = 0; j < n_; ++j) {
      const bool lo_fin = std::isfinite(lo_(j)), hi_fin = std::isfinite(hi_(j));
      if (!lo_fin && !hi_fin)
        fail(errc::kSolverError, "free variables are not supported");
      if (lo_fin && (!hi_fin || std::abs(lo_(j)) <= std::abs(hi_(j)))) {
        status_[j] = VarStatus::AtLower;
        value_[j] = lo_(j);
      } else {
        status_[j] = VarStatus::AtUpper;
        value_[j] = hi_(j);
      }
    }
    // Artificial columns absorb the initial residual with +-1 signs.
    Eigen::VectorXd r = b_;
    for (int j = 0; j < n_; ++j)
      if (value_[j] != 0.0) r -= A_.col(j) * value_[j];
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const int aj = n_ + i;
      A_(i, aj) = (r(i) >= 0.0) ? 1.0 : -1.0;
      basis_[i] = aj;
      status_[aj] = VarStatus::Basic;
    }
    binv_ = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) binv_(i, i) = A_(i, n_ + i);
    refresh_basic_values();

    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(total_);
    phase1_cost.tail(m_).setOnes();
    const double art_sum = run(phase1_cost);
    if (!bounded_)
      fail(errc::kSolverError, "phase-1 objective cannot be unbounded");
    const double scale = 1.0 + b_.cwiseAbs().maxCoeff();
    if (art_sum > kFeasTol * scale * 10) return false;
    // Pin artificials to zero for Phase II.
    for (int i = 0; i < m_; ++i) hi_(n_ + i) = 0.0;
    return true;
  }

  // Phase II. Returns true when optimal, false when unbounded.
  bool solve_optimality() {
    run(cost_);
    return bounded_;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x(n_);
    for (int j = 0; j < n_; ++j) x(j) = value_[j];
    return x;
  }

  // Simplex multipliers of the last run (y = B^-T c_B).
  Eigen::VectorXd duals(const Eigen::VectorXd* c_override = nullptr) const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i)
      cb(i) = c_override ? (*c_override)(basis_[i]) : cost_(basis_[i]);
    return binv_.transpose() * cb;
  }

  Eigen::VectorXd duals_phase2() const { return duals(); }

 private:
  void refresh_basic_values() {
    Eigen::VectorXd rhs = b_;
    for (int j = 0; j < total_; ++j)
      if (status_[j] != VarStatus::Basic && value_[j] != 0.0)
        rhs -= A_.col(j) * value_[j];
    Eigen::VectorXd xb = binv_ * rhs;
    for (int i = 0; i < m_; ++i) value_[basis_[i]] = xb(i);
  }

  void refactorize() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basis_[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible())
      fail(errc::kSolverError, "singular basis during refactorization");
    binv_ = lu.inverse();
    refresh_basic_values();
  }

  // Pivots to optimality for the given cost vector; returns the final
  // objective. Sets bounded_.
  double run(const Eigen::VectorXd& c) {
    bounded_ = true;
    const long max_iter = 20000 + 200L * total_;
    long since_refactor = 0;
    int consecutive_tiny = 0;
    long degenerate_streak = 0;
    bool bland_mode = false;
    for (long iter = 0;; ++iter) {
      if (iter > max_iter)
        fail(errc::kSolverError, "iteration limit exceeded");
      if (++since_refactor >= 128) {
        refactorize();
        since_refactor = 0;
      }
      const Eigen::VectorXd y = duals(&c);

      int enter = -1;
      int dir = 0;
      double best_improvement = kOptTol;
      for (int j = 0; j < total_; ++j) {
        if (status_[j] == VarStatus::Basic) continue;
        if (lo_(j) == hi_(j)) continue;  // pinned (retired artificials)
        const double red = c(j) - y.dot(A_.col(j));
        const double improvement =
            (status_[j] == VarStatus::AtLower) ? -red : red;
        if (improvement <= kOptTol) continue;
        if (bland_mode) {
          enter = j;
          dir = (status_[j] == VarStatus::AtLower) ? +1 : -1;
          break;  // Bland: lowest eligible index
        }
        if (improvement > best_improvement) {
          best_improvement = improvement;
          enter = j;
          dir = (status_[j] == VarStatus::AtLower) ? +1 : -1;
        }
      }
      if (enter < 0) {
        double obj = 0.0;
        for (int j = 0; j < total_; ++j)
          if (value_[j] != 0.0) obj += c(j) * value_[j];
        return obj;
      }

      const Eigen::VectorXd w = binv_ * A_.col(enter);

      // Ratio test: largest step t >= 0 for x_enter moving by dir * t.
      double t_own = hi_(enter) - lo_(enter);  // own bound flip
      double t_min = t_own;
      int leave = -1;  // -1 = bound flip
      for (int i = 0; i < m_; ++i) {
        const double delta = -dir * w(i);  // d x_B(i) / d t
        const int bi = basis_[i];
        double ratio = kInf;
        if (delta > kPivTol) {
          if (std::isfinite(hi_(bi))) ratio = (hi_(bi) - value_[bi]) / delta;
        } else if (delta < -kPivTol) {
          if (std::isfinite(lo_(bi))) ratio = (value_[bi] - lo_(bi)) / (-delta);
        } else {
          continue;
        }
        if (ratio < 0.0) ratio = 0.0;  // degenerate
        if (!std::isfinite(t_min)) {
          if (std::isfinite(ratio)) {
            t_min = ratio;
            leave = i;
          }
          continue;
        }
        const double tie = 1e-12 * (1.0 + t_min);
        if (ratio < t_min - tie) {
          t_min = ratio;
          leave = i;
        } else if (ratio <= t_min + tie && leave >= 0 && basis_[i] < basis_[leave]) {
          leave = i;  // Bland tie-break on variable index
        }
      }
      if (!std::isfinite(t_min)) {
        bounded_ = false;
        return -kInf;
      }

      if (leave >= 0 && std::abs(w(leave)) < kPivTol) {
        // Stale inverse can produce a near-zero pivot; retry once on a
        // fresh factorization.
        if (consecutive_tiny++ > 0)
          fail(errc::kSolverError, "degenerate pivot");
        refactorize();
        since_refactor = 0;
        continue;
      }
      consecutive_tiny = 0;

      // Degenerate stalls hand control to Bland's rule; any real step
      // restores Dantzig pricing.
      if (t_min <= 1e-13) {
        if (++degenerate_streak > 2 * m_ + 16) bland_mode = true;
      } else {
        degenerate_streak = 0;
        bland_mode = false;
      }

      // Apply the step.
      const double t = t_min;
      for (int i = 0; i < m_; ++i) value_[basis_[i]] += -dir * w(i) * t;
      value_[enter] = (status_[enter] == VarStatus::AtLower ? lo_(enter) : hi_(enter)) +
                      dir * t;

      if (leave < 0) {
        // Bound flip; snap exactly.
        status_[enter] = (status_[enter] == VarStatus::AtLower) ? VarStatus::AtUpper
                                                                : VarStatus::AtLower;
        value_[enter] = (status_[enter] == VarStatus::AtLower) ? lo_(enter) : hi_(enter);
        continue;
      }

      const int out = basis_[leave];
      const double delta_out = -dir * w(leave);
      status_[out] = (delta_out > 0) ? VarStatus::AtUpper : VarStatus::AtLower;
      value_[out] = (delta_out > 0) ? hi_(out) : lo_(out);

      basis_[leave] = enter;
      status_[enter] = VarStatus::Basic;

      // Product-form update of B^-1.
      const double piv = w(leave);
      binv_.row(leave) /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave) continue;
        const double f = w(i);
        if (f != 0.0) binv_.row(i) -= f * binv_.row(leave);
      }
    }
  }

  int m_, n_, total_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_, cost_, lo_, hi_;
  Eigen::MatrixXd binv_;
  std::vector<int> basis_;
  std::vector<VarStatus> status_;
  std::vector<double> value_;
  bool bounded_ = true;
};

// Orthonormal basis of the column space of A (modified Gram-Schmidt).
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd Q(n, std::min<int>(n, static_cast<int>(A.cols())));
  int r = 0;
  for (Eigen::Index j = 0; j < A.cols() && r < n; ++j) {
    Eigen::VectorXd v = A.col(j);
    const double orig = v.norm();
    if (orig == 0.0) continue;
    for (int q = 0; q < r; ++q) v -= Q.col(q).dot(v) * Q.col(q);
    // second pass for numerical orthogonality
    for (int q = 0; q < r; ++q) v -= Q.col(q).dot(v) * Q.col(q);
    if (v.norm() > 1e-10 * orig) Q.col(r++) = v / v.norm();
  }
  return Q.leftCols(r);
}

}  // namespace

LPSolution min_inf_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(A.rows());
  const int M = static_cast<int>(A.cols());
  if (v.size() != n)
    fail(errc::kDimensionMismatch, "A has " + std::to_string(n) + " rows but v has " +
                                       std::to_string(v.size()) + " entries");

  LPSolution sol;
  if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) {
    sol.status = LPStatus::Optimal;
    sol.value = 0.0;
    sol.witness = Eigen::VectorXd::Zero(M);
    return sol;
  }

  // Range membership decides feasibility up front; the residual direction
  // doubles as an infeasibility certificate (A^T z ~ 0, <v,z> > 0).
  const Eigen::MatrixXd Q = range_basis(A);
  const Eigen::VectorXd res = v - Q * (Q.transpose() * v);
  if (res.cwiseAbs().maxCoeff() > kFeasTol * (1.0 + v.cwiseAbs().maxCoeff())) {
    sol.status = LPStatus::Infeasible;
    sol.value = std::numeric_limits<double>::infinity();
    sol.dual_certificate = res / res.norm();
    return sol;
  }

  // Homogenized LP: max tau s.t. A u - tau v = 0, u in [-1,1]^M, tau >= 0.
  Eigen::MatrixXd Ac(n, M + 1);
  Ac.leftCols(M) = A;
  Ac.col(M) = -v;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M + 1);
  c(M) = -1.0;  // minimize -tau
  Eigen::VectorXd lo(M + 1), hi(M + 1);
  lo.head(M).setConstant(-1.0);
  hi.head(M).setConstant(1.0);
  lo(M) = 0.0;
  hi(M) = kInf;

  Simplex sx(Ac, b, c, lo, hi);
  if (!sx.solve_feasibility())
    fail(errc::kSolverError, "homogenized problem reported infeasible");
  if (!sx.solve_optimality())
    fail(errc::kSolverError, "homogenized problem reported unbounded");

  const Eigen::VectorXd x = sx.primal();
  const double tau = x(M);
  if (!(tau > 1e-300))
    fail(errc::kSolverError, "vanishing homogenization variable");

  Eigen::VectorXd d = x.head(M) / tau;
  // One least-squares correction to tighten A d = v.
  Eigen::VectorXd r = v - A * d;
  if (r.cwiseAbs().maxCoeff() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    d += cod.solve(r);
    r = v - A * d;
  }
  if (r.cwiseAbs().maxCoeff() > kFeasTol * (1.0 + v.cwiseAbs().maxCoeff()))
    fail(errc::kSolverError, "witness residual exceeds tolerance");

  sol.status = LPStatus::Optimal;
  sol.witness = d;
  sol.value = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  sol.dual_certificate = sx.duals_phase2();
  return sol;
}

LPSolution basis_pursuit(const Dictionary& D, const Eigen::VectorXd& y) {
  const int d = D.dim();
  const int K = D.natoms();
  if (y.size() != d)
    fail(errc::kDimensionMismatch, "y has " + std::to_string(y.size()) +
                                       " entries, dictionary dimension is " +
                                       std::to_string(d));

  Eigen::MatrixXd Ac(d, 2 * K);
  Ac.leftCols(K) = D.atoms;
  Ac.rightCols(K) = -D.atoms;
  Eigen::VectorXd c = Eigen::VectorXd::Ones(2 * K);
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(2 * K);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2 * K, kInf);

  Simplex sx(Ac, y, c, lo, hi);
  LPSolution sol;
  if (!sx.solve_feasibility()) {
    sol.status = LPStatus::Infeasible;
    sol.value = std::numeric_limits<double>::infinity();
    return sol;
  }
  if (!sx.solve_optimality())
    fail(errc::kSolverError, "basis pursuit reported unbounded");

  const Eigen::VectorXd xs = sx.primal();
  Eigen::VectorXd x = xs.head(K) - xs.tail(K);
  const double resid = (D.atoms * x - y).cwiseAbs().maxCoeff();
  if (resid > kFeasTol * (1.0 + y.cwiseAbs().maxCoeff()))
    fail(errc::kSolverError, "witness residual exceeds tolerance");

  sol.status = LPStatus::Optimal;
  sol.witness = x;
  sol.value = x.lpNorm<1>();
  sol.dual_certificate = sx.duals_phase2();
  return sol;
}

}  // namespace dictid
