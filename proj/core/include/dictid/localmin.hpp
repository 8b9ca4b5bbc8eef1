#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "dictid/model.hpp"

namespace dictid {

/// A tangent direction to the constrained factorization manifold at (D, X):
/// C = Z - diag(M0 Z) with Z zero-diagonal (so D*C is tangent to the
/// unit-column manifold), V in the null space of D (V = 0 for a basis), and
/// the induced coefficient velocity Xprime = -C X + V.
struct TangentDirection {
  Eigen::MatrixXd Z;       // K x K, zero diagonal
  Eigen::MatrixXd C;       // K x K admissible
  Eigen::MatrixXd V;       // K x N, D V = 0
  Eigen::MatrixXd Xprime;  // K x N
};

/// Errors: NotZeroDiagonal when diag(Z) != 0 exactly; NotInNullSpace when
/// ||D V||_inf exceeds 1e-10 * (1 + ||V||_inf).
TangentDirection make_direction(const Dictionary& d, const CoefficientMatrix& x,
                                const Eigen::MatrixXd& Z, const Eigen::MatrixXd& V);

/// U = sign(X) X^T - M0^T diag(||x^k||_1).
Eigen::MatrixXd u_matrix(const Dictionary& d, const CoefficientMatrix& x);

struct OneSidedDerivatives {
  double plus = 0.0;   // right derivative of eps -> ||X + eps Xprime||_1 at 0
  double minus = 0.0;  // left derivative; plus >= minus always
};

OneSidedDerivatives directional_derivatives(const CoefficientMatrix& x,
                                            const TangentDirection& dir);

struct NscResult {
  double lhs = 0.0;  // |<Z,U>_F + <V, sign X>_F|
  double rhs = 0.0;  // ||(Z X + V)_Lambda||_1
  bool satisfied = false;
};

/// Errors: DegenerateDirection when Z X + V == 0.
NscResult nsc_check(const Dictionary& d, const CoefficientMatrix& x,
                    const TangentDirection& dir);

struct DecouplingGap {
  double coupled = 0.0;        // |<Z,U>_F| / ||(Z X)_Lambda||_1
  double decoupled_max = 0.0;  // max_k per-row LP value
};

DecouplingGap decoupling_gap(const Dictionary& d, const CoefficientMatrix& x,
                             const Eigen::MatrixXd& Z);

/// Walks the basis-case cost along the normalized curve
/// D(eps) = normalize(D (I + eps C)), X(eps) = D(eps)^-1 (D X) and returns
/// ||X(eps)||_1 - ||X||_1 per eps. Errors: SingularPerturbedDictionary when
/// D(eps) loses invertibility; PreconditionFailed when D is not a basis.
std::vector<double> curve_probe(const Dictionary& d, const CoefficientMatrix& x,
                                const TangentDirection& dir,
                                const std::vector<double>& epsilons);

/// Random zero-diagonal direction: i.i.d. standard Gaussian off-diagonal
/// entries, Frobenius-normalized.
Eigen::MatrixXd random_zero_diag(int K, std::uint64_t seed);

/// Orthonormal basis of the null space of D as a K x (K - rank) matrix
/// (empty for a basis). Overcomplete tangent directions take V as linear
/// combinations of these columns.
Eigen::MatrixXd null_space_basis(const Dictionary& d);

}  // namespace dictid
