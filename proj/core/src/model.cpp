#include "dictid/model.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "dictid/errors.hpp"

namespace dictid {

namespace {

bool has_full_row_rank(const Eigen::MatrixXd& m) {
  if (m.rows() > m.cols()) return false;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-12);
  return qr.rank() == m.rows();
}

}  // namespace

Dictionary Dictionary::from_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1)
    fail(errc::kDimensionMismatch, "dictionary must be nonempty");
  if (m.cols() < m.rows())
    fail(errc::kDimensionMismatch,
         "dictionary needs at least as many atoms as dimensions (K >= d)");
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double n = m.col(k).norm();
    if (std::abs(n - 1.0) > 1e-12)
      fail(errc::kDomainError, "column " + std::to_string(k) +
                                   " has l2 norm " + std::to_string(n) +
                                   ", expected 1 within 1e-12");
  }
  Dictionary d;
  d.atoms = m;
  d.full_row_rank = has_full_row_rank(m);
  return d;
}

Dictionary normalize_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1)
    fail(errc::kDimensionMismatch, "matrix must be nonempty");
  if (m.cols() < m.rows())
    fail(errc::kDimensionMismatch,
         "dictionary needs at least as many atoms as dimensions (K >= d)");
  Eigen::MatrixXd out = m;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double n = m.col(k).norm();
    if (n < 1e-14)
      fail(errc::kZeroColumn, "column " + std::to_string(k) + " has norm < 1e-14");
    out.col(k) /= n;
  }
  Dictionary d;
  d.atoms = out;
  d.full_row_rank = has_full_row_rank(out);
  return d;
}

GramParts gram_parts(const Dictionary& d) {
  const int K = d.natoms();
  GramParts g;
  g.M0 = d.atoms.transpose() * d.atoms;
  g.M0.diagonal().setZero();
  g.mbar.reserve(K);
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd col(K - 1);
    int idx = 0;
    for (int l = 0; l < K; ++l)
      if (l != k) col(idx++) = g.M0(l, k);
    g.mbar.push_back(std::move(col));
  }
  return g;
}

double coherence(const Dictionary& d, double p) {
  if (!(p >= 1.0))  // also rejects NaN
    fail(errc::kDomainError, "norm exponent p must satisfy p >= 1");
  const GramParts g = gram_parts(d);
  double mu = 0.0;
  for (const auto& m : g.mbar) mu = std::max(mu, lp_norm(m, p));
  return mu;
}

CoefficientMatrix CoefficientMatrix::from_matrix(const Eigen::MatrixXd& m) {
  CoefficientMatrix c;
  c.X = m;
  c.nonzero_cols.assign(m.rows(), {});
  c.zero_cols.assign(m.rows(), {});
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    for (Eigen::Index n = 0; n < m.cols(); ++n) {
      if (m(k, n) == 0.0)
        c.zero_cols[k].push_back(static_cast<int>(n));
      else
        c.nonzero_cols[k].push_back(static_cast<int>(n));
    }
  }
  return c;
}

RowBlocks row_blocks(const CoefficientMatrix& x, const Dictionary& d, int k) {
  const int K = x.rows();
  if (d.natoms() != K)
    fail(errc::kDimensionMismatch, "dictionary has " + std::to_string(d.natoms()) +
                                       " atoms, coefficient matrix has " +
                                       std::to_string(K) + " rows");
  if (k < 0 || k >= K)
    fail(errc::kDimensionMismatch, "row index " + std::to_string(k) + " out of range");

  RowBlocks rb;
  rb.k = k;
  rb.xk = x.X.row(k);
  rb.nonzero_cols = x.nonzero_cols[k];
  rb.zero_cols = x.zero_cols[k];

  const int ng = static_cast<int>(rb.nonzero_cols.size());
  const int nb = static_cast<int>(rb.zero_cols.size());
  rb.sk.resize(ng);
  rb.Xk.resize(K - 1, ng);
  rb.Xbark.resize(K - 1, nb);

  // row map: atom l -> block row (ascending l, skipping k)
  for (int j = 0; j < ng; ++j) {
    const int n = rb.nonzero_cols[j];
    rb.sk(j) = x.X(k, n) > 0 ? 1.0 : -1.0;
    int idx = 0;
    for (int l = 0; l < K; ++l)
      if (l != k) rb.Xk(idx++, j) = x.X(l, n);
  }
  for (int j = 0; j < nb; ++j) {
    const int n = rb.zero_cols[j];
    int idx = 0;
    for (int l = 0; l < K; ++l)
      if (l != k) rb.Xbark(idx++, j) = x.X(l, n);
  }

  rb.vk = rb.Xk * rb.sk.transpose();

  const GramParts g = gram_parts(d);
  Eigen::VectorXd weights(K - 1);
  int idx = 0;
  for (int l = 0; l < K; ++l)
    if (l != k) weights(idx++) = x.X.row(l).lpNorm<1>();
  rb.uk = rb.vk - weights.cwiseProduct(g.mbar[k]);
  return rb;
}

double gamma(const CoefficientMatrix& x) {
  double g = 0.0;
  for (int k = 0; k < x.rows(); ++k) g = std::max(g, x.X.row(k).lpNorm<1>());
  return g;
}

double beta(const CoefficientMatrix& x, const Dictionary& d, double p) {
  double b = 0.0;
  for (int k = 0; k < x.rows(); ++k) b = std::max(b, lp_norm(row_blocks(x, d, k).vk, p));
  return b;
}

double lp_norm(const Eigen::VectorXd& v, double p) {
  if (!(p >= 1.0)) fail(errc::kDomainError, "norm exponent p must satisfy p >= 1");
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.lpNorm<Eigen::Infinity>();
  if (p == 1.0) return v.lpNorm<1>();
  if (p == 2.0) return v.norm();
  return std::pow(v.array().abs().pow(p).sum(), 1.0 / p);
}

double dual_exponent(double p) {
  if (!(p >= 1.0)) fail(errc::kDomainError, "norm exponent p must satisfy p >= 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

Eigen::MatrixXd sign_of(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
}

}  // namespace dictid
