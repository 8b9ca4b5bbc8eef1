#pragma once

#include <Eigen/Core>
#include <vector>

namespace dictid {

/// d x K matrix of unit l2-norm columns (atoms). K >= d is required; the
/// basis case K == d is tracked explicitly because several results only
/// apply to bases.
struct Dictionary {
  Eigen::MatrixXd atoms;       // d x K
  bool full_row_rank = false;  // columns span R^d

  int dim() const { return static_cast<int>(atoms.rows()); }
  int natoms() const { return static_cast<int>(atoms.cols()); }
  bool is_basis() const { return atoms.rows() == atoms.cols(); }
  bool is_complete() const { return full_row_rank; }

  /// Validates unit column norms (tolerance 1e-12) and K >= d.
  static Dictionary from_columns(const Eigen::MatrixXd& m);
};

/// Scales each column to unit l2 norm. Errors with ZeroColumn(k) when a
/// column norm is below 1e-14.
Dictionary normalize_columns(const Eigen::MatrixXd& m);

/// Off-diagonal Gram data: M0 = D^T D - I (zero diagonal), and per-atom
/// columns mbar[k] = column k of M0 with the k-th (zero) entry removed,
/// entries ordered by ascending atom index skipping k.
struct GramParts {
  Eigen::MatrixXd M0;                  // K x K, zero diagonal
  std::vector<Eigen::VectorXd> mbar;   // K vectors of length K-1
};

GramParts gram_parts(const Dictionary& d);

/// mu_p(D) = max_k || mbar_k ||_p. For p = inf this is the classical
/// coherence max_{k != l} |<a_k, a_l>|.
double coherence(const Dictionary& d, double p);

/// K x N coefficient matrix with exact-zero support bookkeeping. An entry
/// belongs to the zero set iff it is exactly 0.0; samplers and loaders emit
/// literal zeros, never thresholded small values.
struct CoefficientMatrix {
  Eigen::MatrixXd X;                           // K x N
  std::vector<std::vector<int>> nonzero_cols;  // per row k: Lambda^k, ascending
  std::vector<std::vector<int>> zero_cols;     // per row k: Lambda-bar^k, ascending

  int rows() const { return static_cast<int>(X.rows()); }
  int cols() const { return static_cast<int>(X.cols()); }

  static CoefficientMatrix from_matrix(const Eigen::MatrixXd& m);
};

/// Per-row block decomposition. Xk / Xbark are X with row k deleted and
/// columns restricted to the nonzero / zero column sets of row k; the row
/// order of both (and of uk, vk) is ascending atom index skipping k,
/// matching GramParts::mbar.
struct RowBlocks {
  int k = 0;
  Eigen::RowVectorXd xk;        // row k of X, length N
  Eigen::RowVectorXd sk;        // signs of xk over Lambda^k
  Eigen::MatrixXd Xk;           // (K-1) x |Lambda^k|
  Eigen::MatrixXd Xbark;        // (K-1) x |Lambda-bar^k|
  Eigen::VectorXd vk;           // Xk * sk^T
  Eigen::VectorXd uk;           // vk - diag(||x^l||_1)_{l != k} * mbar_k
  std::vector<int> nonzero_cols;
  std::vector<int> zero_cols;
};

/// k is 0-based. Empty Lambda^k or Lambda-bar^k yields 0-column blocks.
RowBlocks row_blocks(const CoefficientMatrix& x, const Dictionary& d, int k);

/// gamma(X) = max_k ||x^k||_1 (0 for an empty matrix).
double gamma(const CoefficientMatrix& x);

/// beta_p(X) = max_k ||v_k||_p.
double beta(const CoefficientMatrix& x, const Dictionary& d, double p);

/// ||v||_p with p in [1, inf]; p = INFINITY gives the max norm.
double lp_norm(const Eigen::VectorXd& v, double p);

/// Dual exponent p' with 1/p + 1/p' = 1.
double dual_exponent(double p);

/// sign with sign(0) = 0, applied entrywise.
Eigen::MatrixXd sign_of(const Eigen::MatrixXd& m);

}  // namespace dictid
