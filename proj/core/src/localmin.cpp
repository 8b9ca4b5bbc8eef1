#include "dictid/localmin.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dictid/conditions.hpp"
#include "dictid/errors.hpp"
#include "dictid/rng.hpp"

namespace dictid {

namespace {

// l1 norm of M restricted to the exact-zero set of X.
double l1_on_zero_set(const Eigen::MatrixXd& M, const CoefficientMatrix& x) {
  double s = 0.0;
  for (int k = 0; k < x.rows(); ++k)
    for (int n : x.zero_cols[k]) s += std::abs(M(k, n));
  return s;
}

}  // namespace

TangentDirection make_direction(const Dictionary& d, const CoefficientMatrix& x,
                                const Eigen::MatrixXd& Z, const Eigen::MatrixXd& V) {
  const int K = d.natoms();
  if (Z.rows() != K || Z.cols() != K)
    fail(errc::kDimensionMismatch, "Z must be K x K");
  if (V.rows() != K || V.cols() != x.cols())
    fail(errc::kDimensionMismatch, "V must be K x N");
  if (x.rows() != K)
    fail(errc::kDimensionMismatch, "dictionary/coefficient size mismatch");
  for (int k = 0; k < K; ++k)
    if (Z(k, k) != 0.0)
      fail(errc::kNotZeroDiagonal, "Z(" + std::to_string(k) + "," + std::to_string(k) +
                                       ") = " + std::to_string(Z(k, k)));
  const double vmax = V.size() ? V.cwiseAbs().maxCoeff() : 0.0;
  const double dv = V.size() ? (d.atoms * V).cwiseAbs().maxCoeff() : 0.0;
  if (dv > 1e-10 * (1.0 + vmax))
    fail(errc::kNotInNullSpace, "||D V||_inf = " + std::to_string(dv));

  TangentDirection t;
  t.Z = Z;
  t.V = V;
  const Eigen::MatrixXd M0 = gram_parts(d).M0;
  t.C = Z;
  t.C -= Eigen::MatrixXd((M0 * Z).diagonal().asDiagonal());
  t.Xprime = -t.C * x.X + V;
  return t;
}

Eigen::MatrixXd u_matrix(const Dictionary& d, const CoefficientMatrix& x) {
  if (d.natoms() != x.rows())
    fail(errc::kDimensionMismatch, "dictionary/coefficient size mismatch");
  const int K = x.rows();
  Eigen::VectorXd row_l1(K);
  for (int k = 0; k < K; ++k) row_l1(k) = x.X.row(k).lpNorm<1>();
  const Eigen::MatrixXd M0 = gram_parts(d).M0;
  return sign_of(x.X) * x.X.transpose() -
         M0.transpose() * Eigen::MatrixXd(row_l1.asDiagonal());
}

OneSidedDerivatives directional_derivatives(const CoefficientMatrix& x,
                                            const TangentDirection& dir) {
  if (dir.Xprime.rows() != x.rows() || dir.Xprime.cols() != x.cols())
    fail(errc::kDimensionMismatch, "direction does not match X");
  const double zero_part = l1_on_zero_set(dir.Xprime, x);
  const double sign_part = (dir.Xprime.array() * sign_of(x.X).array()).sum();
  return {zero_part + sign_part, -zero_part + sign_part};
}

NscResult nsc_check(const Dictionary& d, const CoefficientMatrix& x,
                    const TangentDirection& dir) {
  const Eigen::MatrixXd T = dir.Z * x.X + dir.V;
  if (T.cwiseAbs().maxCoeff() == 0.0)
    fail(errc::kDegenerateDirection, "Z X + V vanishes");
  const Eigen::MatrixXd U = u_matrix(d, x);
  NscResult r;
  r.lhs = std::abs((dir.Z.array() * U.array()).sum() +
                   (dir.V.array() * sign_of(x.X).array()).sum());
  r.rhs = l1_on_zero_set(T, x);
  r.satisfied = r.lhs < r.rhs;
  return r;
}

DecouplingGap decoupling_gap(const Dictionary& d, const CoefficientMatrix& x,
                             const Eigen::MatrixXd& Z) {
  const Eigen::MatrixXd ZX = Z * x.X;
  const double denom = l1_on_zero_set(ZX, x);
  if (denom == 0.0)
    fail(errc::kDegenerateDirection, "(Z X)_Lambda vanishes");
  const Eigen::MatrixXd U = u_matrix(d, x);
  DecouplingGap g;
  g.coupled = std::abs((Z.array() * U.array()).sum()) / denom;
  const IdentifiabilityReport rep = check_conditions(d, x);
  g.decoupled_max = 0.0;
  for (double v : rep.k_values) g.decoupled_max = std::max(g.decoupled_max, v);
  return g;
}

std::vector<double> curve_probe(const Dictionary& d, const CoefficientMatrix& x,
                                const TangentDirection& dir,
                                const std::vector<double>& epsilons) {
  if (!d.is_basis())
    fail(errc::kPreconditionFailed, "curve_probe requires a basis dictionary");
  const int K = d.natoms();
  const Eigen::MatrixXd Y = d.atoms * x.X;
  const double base_cost = x.X.cwiseAbs().sum();
  std::vector<double> deltas;
  deltas.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (eps == 0.0) {
      deltas.push_back(0.0);  // the curve passes through (D, X) itself
      continue;
    }
    Eigen::MatrixXd P =
        d.atoms * (Eigen::MatrixXd::Identity(K, K) + eps * dir.C);
    for (int k = 0; k < K; ++k) {
      const double n = P.col(k).norm();
      if (n < 1e-14)
        fail(errc::kSingularPerturbedDictionary,
             "column " + std::to_string(k) + " collapses at eps " + std::to_string(eps));
      P.col(k) /= n;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(P);
    if (!lu.isInvertible())
      fail(errc::kSingularPerturbedDictionary,
           "perturbed dictionary singular at eps " + std::to_string(eps));
    const Eigen::MatrixXd Xe = lu.solve(Y);
    deltas.push_back(Xe.cwiseAbs().sum() - base_cost);
  }
  return deltas;
}

Eigen::MatrixXd null_space_basis(const Dictionary& d) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(d.atoms);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() == 1 && kernel.cwiseAbs().maxCoeff() == 0.0)
    return Eigen::MatrixXd(d.natoms(), 0);  // trivial null space (basis)
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d.natoms(), kernel.cols());
  return q;
}

Eigen::MatrixXd random_zero_diag(int K, std::uint64_t seed) {
  if (K < 2) fail(errc::kDomainError, "need K >= 2 for a nonzero zero-diagonal matrix");
  CounterRng rng(seed);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(K, K);
  std::uint64_t ctr = 0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      if (i != j) Z(i, j) = rng.gaussian(ctr++);
  const double f = Z.norm();
  if (f > 0) Z /= f;
  return Z;
}

}  // namespace dictid
