#include "dictid/conditions.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "dictid/errors.hpp"
#include "dictid/lp.hpp"
#include "dictid/rng.hpp"
#include "json.hpp"

namespace dictid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int column_rank(const Eigen::MatrixXd& A) {
  if (A.cols() == 0 || A.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  return static_cast<int>(qr.rank());
}

double l1_of_atz(const Eigen::MatrixXd& A, const Eigen::VectorXd& z) {
  return (A.transpose() * z).lpNorm<1>();
}

double radius_exact_facets(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  if (column_rank(A) < n) return 0.0;
  double best = kInf;
  if (n == 1) {
    best = A.cwiseAbs().sum();
  } else if (n == 2) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double nx = A(0, j), ny = A(1, j);
      const double nn = std::hypot(nx, ny);
      if (nn == 0.0) continue;
      Eigen::Vector2d z(-ny / nn, nx / nn);
      best = std::min(best, l1_of_atz(A, z));
    }
  } else {  // n == 3
    for (Eigen::Index i = 0; i < A.cols(); ++i) {
      const Eigen::Vector3d a = A.col(i);
      for (Eigen::Index j = i + 1; j < A.cols(); ++j) {
        const Eigen::Vector3d b = A.col(j);
        Eigen::Vector3d z = a.cross(b);
        const double zn = z.norm();
        // skip degenerate (near-collinear) column pairs
        if (zn <= 1e-12 * a.norm() * b.norm()) continue;
        best = std::min(best, l1_of_atz(A, z / zn));
      }
    }
  }
  return std::isfinite(best) ? best : 0.0;
}

// Deterministic cover of the unit l2 sphere in R^n built from grid points on
// the cube boundary, radially projected. Covering radius <= sqrt(n-1)/g.
struct SphereCover {
  std::vector<Eigen::VectorXd> points;
  double covering_radius = 0.0;
};

SphereCover build_cover(int n, double eps) {
  SphereCover cover;
  if (n == 1) {
    cover.points.push_back(Eigen::VectorXd::Constant(1, 1.0));
    cover.points.push_back(Eigen::VectorXd::Constant(1, -1.0));
    cover.covering_radius = 0.0;
    return cover;
  }
  const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n - 1)) / eps));
  const double per_face = std::pow(static_cast<double>(g), n - 1);
  if (2.0 * n * per_face > 5e6)
    fail(errc::kUnsupportedMode,
         "eps-cover in dimension " + std::to_string(n) + " at eps " +
             std::to_string(eps) + " would need too many points");
  cover.covering_radius = std::sqrt(static_cast<double>(n - 1)) / g;

  std::vector<int> idx(n - 1, 0);
  Eigen::VectorXd pt(n);
  for (int axis = 0; axis < n; ++axis) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        int f = 0;
        for (int a = 0; a < n; ++a) {
          if (a == axis) {
            pt(a) = sgn ? -1.0 : 1.0;
          } else {
            pt(a) = -1.0 + (2.0 * idx[f] + 1.0) / g;
            ++f;
          }
        }
        cover.points.push_back(pt / pt.norm());
        int carry = 0;
        while (carry < n - 1 && ++idx[carry] == g) idx[carry++] = 0;
        if (carry == n - 1) break;
      }
    }
  }
  return cover;
}

RadiusResult radius_eps_cover(const Eigen::MatrixXd& A, double p, double eps,
                              std::uint64_t seed) {
  const int n = static_cast<int>(A.rows());
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(errc::kDomainError, "cover eps must be in (0,1)");
  const double pdual = dual_exponent(p);

  SphereCover cover = build_cover(n, eps);
  double best = kInf;
  for (const auto& z : cover.points) {
    const double denom = (p == 2.0) ? 1.0 : lp_norm(z, pdual);
    best = std::min(best, l1_of_atz(A, z) / denom);
  }
  if (seed != 0) {
    CounterRng rng(derive_seed(seed, 0xC0FFEE));
    const int extra = 256;
    Eigen::VectorXd z(n);
    for (int s = 0; s < extra; ++s) {
      for (int i = 0; i < n; ++i) z(i) = rng.gaussian(static_cast<std::uint64_t>(s) * n + i);
      const double zn = z.norm();
      if (zn == 0.0) continue;
      z /= zn;
      const double denom = (p == 2.0) ? 1.0 : lp_norm(z, pdual);
      best = std::min(best, l1_of_atz(A, z) / denom);
    }
  }

  RadiusResult out;
  if (p == 2.0) {
    double delta = 0.0;  // crude bound on ||A^T||_{2->1}
    for (Eigen::Index j = 0; j < A.cols(); ++j) delta += A.col(j).norm();
    out.value = std::max(0.0, best - delta * cover.covering_radius);
    out.certified_lower_bound = true;
  } else {
    out.value = std::isfinite(best) ? best : 0.0;
    out.certified_lower_bound = false;
  }
  return out;
}

nlohmann::json tristate_json(TriState t) { return tristate_name(t); }

}  // namespace

const char* tristate_name(TriState t) {
  switch (t) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    default: return "inconclusive";
  }
}

RadiusResult radius(const Eigen::MatrixXd& A, double p, const RadiusMode& mode) {
  if (!(p >= 1.0)) fail(errc::kDomainError, "norm exponent p must satisfy p >= 1");
  if (A.rows() < 1) fail(errc::kDimensionMismatch, "radius needs at least one row");
  if (mode.kind == RadiusMode::ExactFacets) {
    if (p != 2.0)
      fail(errc::kUnsupportedMode, "ExactFacets radius supports p = 2 only");
    if (A.rows() > 3)
      fail(errc::kUnsupportedMode, "ExactFacets radius supports n <= 3 only");
    return {radius_exact_facets(A), true};
  }
  return radius_eps_cover(A, p, mode.eps, mode.seed);
}

Theorem3Result theorem3_check(const Dictionary& d, const CoefficientMatrix& x,
                              double p, const RadiusMode& mode) {
  if (d.natoms() != x.rows())
    fail(errc::kDimensionMismatch, "dictionary/coefficient size mismatch");
  Theorem3Result r;
  r.p = p;
  r.mu = coherence(d, p);
  r.gamma = gamma(x);
  r.beta = beta(x, d, p);
  r.alpha = kInf;
  r.alpha_certified = true;
  for (int k = 0; k < x.rows(); ++k) {
    const RadiusResult rr = radius(row_blocks(x, d, k).Xbark, p, mode);
    r.alpha = std::min(r.alpha, rr.value);
    r.alpha_certified = r.alpha_certified && rr.certified_lower_bound;
  }
  if (x.rows() == 0) r.alpha = 0.0;
  r.holds = r.beta + r.mu * r.gamma < r.alpha;
  if (r.gamma > 0.0)
    r.margin = (r.alpha - r.beta) / r.gamma - r.mu;
  else
    r.margin = r.beta < r.alpha ? kInf : -kInf;
  return r;
}

IdentifiabilityReport check_conditions(const Dictionary& d, const CoefficientMatrix& x,
                                       double tol_strict) {
  if (d.natoms() != x.rows())
    fail(errc::kDimensionMismatch, "dictionary has " + std::to_string(d.natoms()) +
                                       " atoms, coefficient matrix has " +
                                       std::to_string(x.rows()) + " rows");
  IdentifiabilityReport rep;
  rep.tol_strict = tol_strict;
  rep.p = 2.0;
  const int K = x.rows();
  rep.k_values.resize(K);
  rep.k_certificates.resize(K);
  double maxval = 0.0;
  for (int k = 0; k < K; ++k) {
    const RowBlocks rb = row_blocks(x, d, k);
    const LPSolution sol = min_inf_norm(rb.Xbark, rb.uk);
    rep.k_values[k] = sol.value;  // +inf when infeasible
    rep.k_certificates[k] = sol.dual_certificate;
    maxval = std::max(maxval, sol.value);
  }
  if (maxval < 1.0 - tol_strict) {
    rep.sc = TriState::Yes;
    rep.nc = TriState::Yes;
  } else if (maxval > 1.0 + tol_strict) {
    rep.sc = TriState::No;
    rep.nc = TriState::No;
  } else {
    rep.sc = TriState::Inconclusive;
    rep.nc = TriState::Inconclusive;
  }
  rep.gamma = gamma(x);
  rep.beta = beta(x, d, 2.0);
  rep.mu = coherence(d, 2.0);
  return rep;
}

IdentifiabilityReport full_report(const Dictionary& d, const CoefficientMatrix& x,
                                  double p, double tol_strict, const RadiusMode& mode) {
  IdentifiabilityReport rep = check_conditions(d, x, tol_strict);
  const Theorem3Result t3 = theorem3_check(d, x, p, mode);
  rep.p = p;
  rep.mu = t3.mu;
  rep.beta = t3.beta;
  rep.alpha = t3.alpha;
  rep.theorem3 = t3;
  return rep;
}

std::string IdentifiabilityReport::to_json() const {
  nlohmann::json j;
  j["k_values"] = nlohmann::json::array();
  for (double v : k_values) {
    if (std::isinf(v))
      j["k_values"].push_back("inf");
    else
      j["k_values"].push_back(v);
  }
  j["nc"] = tristate_json(nc);
  j["sc"] = tristate_json(sc);
  j["alpha"] = alpha ? nlohmann::json(*alpha) : nlohmann::json(nullptr);
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["mu"] = mu;
  j["p"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
  if (theorem3) {
    j["theorem3"] = {{"holds", theorem3->holds},
                     {"margin", std::isinf(theorem3->margin)
                                    ? nlohmann::json(theorem3->margin > 0 ? "inf" : "-inf")
                                    : nlohmann::json(theorem3->margin)},
                     {"alpha_certified", theorem3->alpha_certified}};
  } else {
    j["theorem3"] = nullptr;
  }
  j["tolerances"] = {{"tol_strict", tol_strict}};
  return j.dump(2);
}

}  // namespace dictid
