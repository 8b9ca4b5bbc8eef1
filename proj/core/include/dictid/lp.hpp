#pragma once

#include <Eigen/Core>

#include "dictid/model.hpp"

namespace dictid {

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Optimal;
  double value = 0.0;            // +inf when Infeasible (min_inf_norm)
  Eigen::VectorXd witness;       // primal solution (empty when Infeasible)
  Eigen::VectorXd dual_certificate;  // z with <v,z>/||A^T z||_1 = value when
                                     // Optimal and A has full row rank; for an
                                     // Infeasible system, z witnesses v not in
                                     // range(A): A^T z ~ 0 while <v,z> > 0.

  const char* status_name() const {
    switch (status) {
      case LPStatus::Optimal: return "optimal";
      case LPStatus::Infeasible: return "infeasible";
      default: return "unbounded";
    }
  }
};

/// min ||d||_inf subject to A d = v. Solved in homogenized form
/// (max tau s.t. A u = tau v, |u_i| <= 1) by a dense revised simplex with
/// Bland's anti-cycling rule; deterministic pivoting, feasibility and
/// optimality tolerances 1e-9. An n x 0 matrix is accepted (feasible only
/// for v = 0). Numerical failure raises SolverError instead of returning a
/// wrong Optimal.
LPSolution min_inf_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& v);

/// min ||x||_1 subject to D x = y via the standard split x = x+ - x-.
LPSolution basis_pursuit(const Dictionary& D, const Eigen::VectorXd& y);

}  // namespace dictid
