#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dictid/model.hpp"

namespace dictid {

enum class TriState { Yes, No, Inconclusive };
const char* tristate_name(TriState t);

/// How to evaluate the inscribed-ball radius of a zonotope A*Q.
///   ExactFacets  - enumerate facet normals (orthogonal complements of
///                  (n-1)-subsets of columns); exact; requires p = 2, n <= 3.
///   EpsCover     - lower-bound via a deterministic eps-cover of the unit
///                  sphere (certified for p = 2, per the crude operator-norm
///                  bound sum_i ||A_i||_2); for p != 2 a plain sampled
///                  estimate, flagged uncertified. seed adds extra random
///                  probe directions; 0 keeps the cover purely deterministic.
struct RadiusMode {
  enum Kind { ExactFacets, EpsCover } kind = ExactFacets;
  double eps = 0.05;
  std::uint64_t seed = 0;

  static RadiusMode exact_facets() { return {}; }
  static RadiusMode eps_cover(double eps, std::uint64_t seed = 0) {
    return {EpsCover, eps, seed};
  }
};

struct RadiusResult {
  double value = 0.0;
  bool certified_lower_bound = false;
};

/// Radius of the largest l_p ball inscribed in the zonotope A*Q, i.e.
/// inf_z ||A^T z||_1 / ||z||_{p'}. Rank-deficient A gives 0.
RadiusResult radius(const Eigen::MatrixXd& A, double p, const RadiusMode& mode);

struct Theorem3Result {
  bool holds = false;
  double margin = 0.0;  // (alpha - beta)/gamma - mu
  double alpha = 0.0, beta = 0.0, gamma = 0.0, mu = 0.0;
  double p = 2.0;
  bool alpha_certified = false;
};

/// Decoupled coherence test: holds iff mu_p(D) < (alpha_p(X) - beta_p(X)) / gamma(X).
Theorem3Result theorem3_check(const Dictionary& d, const CoefficientMatrix& x,
                              double p, const RadiusMode& mode);

struct IdentifiabilityReport {
  std::vector<double> k_values;  // per-row LP values; +inf allowed
  TriState nc = TriState::Inconclusive;
  TriState sc = TriState::Inconclusive;
  double beta = 0.0, gamma = 0.0, mu = 0.0;
  double p = 2.0;
  double tol_strict = 1e-7;
  std::optional<double> alpha;
  std::optional<Theorem3Result> theorem3;
  // LP dual certificates per row (z achieving the sup ratio, or an
  // infeasibility direction); empty vector when the row value is 0.
  std::vector<Eigen::VectorXd> k_certificates;

  std::string to_json() const;
};

/// Per-row LP values k_values[k] = min ||d||_inf s.t. Xbar_k d = u_k
/// (+inf when infeasible), with the strictness band:
///   max < 1 - tol_strict        -> SC yes (hence NC yes)
///   max > 1 + tol_strict        -> NC no (hence SC no)
///   otherwise                   -> both inconclusive
/// beta/gamma/mu are recorded at p = 2; alpha and theorem3 are left unset
/// (see full_report).
IdentifiabilityReport check_conditions(const Dictionary& d, const CoefficientMatrix& x,
                                       double tol_strict = 1e-7);

/// check_conditions plus alpha_p and the theorem-3 verdict at the given p.
IdentifiabilityReport full_report(const Dictionary& d, const CoefficientMatrix& x,
                                  double p, double tol_strict, const RadiusMode& mode);

}  // namespace dictid
