#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dictid/model.hpp"

namespace dictid::bg {

/// Bernoulli-Gaussian model: entries x = xi * g with xi ~ Bernoulli(p) and
/// g standard Gaussian, i.i.d. Zeros are emitted as literal 0.0.
struct BGParams {
  double p = 0.5;
  int K = 1;
  long N = 1;
  std::uint64_t seed = 0;
};

/// Deterministic in (p, K, N, seed); entry (k, n) is a pure function of the
/// seed and its flat index, so the output is identical however the work is
/// split across threads.
CoefficientMatrix sample(const BGParams& params);

/// Single Bernoulli-Gaussian vector of length n (row-model helper for the
/// Monte Carlo validators).
Eigen::VectorXd sample_vector(double p, long n, std::uint64_t seed);
Eigen::MatrixXd sample_matrix(double p, long rows, long cols, std::uint64_t seed);

/// Theoretical quantities derived from (p, K, N, eps): the support-size
/// window [M_l, M_u] and the alpha/beta/gamma levels entering the main
/// probability bound.
struct BoundInputs {
  double eps = 0.0;
  double M_l = 0.0, M_u = 0.0;
  double alpha_n = 0.0, beta_n = 0.0, gamma_n = 0.0;

  static BoundInputs from(double p, int K, long N, double eps);
};

struct TailBound {
  double threshold = 0.0;
  double prob_bound = 0.0;
};

/// P(||x||_1 > N p (sqrt(2/pi) + eps)) <= 2 exp(-N p eps^2 / (2 + sqrt(2) eps))
/// for a length-N Bernoulli-Gaussian vector.
TailBound bound_gamma(double p, long N, double eps);

/// Union bound over the K rows of a K x N matrix (factor 2K instead of 2).
double bound_gamma_union(double p, long N, int K, double eps);

/// P(|row zero set| outside [M_l, M_u]) <= 2 exp(-2 N (1-p)^2 eps^2).
TailBound bound_support_size(double p, long N, double eps);

struct OpRayBounds {
  TailBound op;   // sum_i ||A_i||_2 > M sqrt(pL) (1 + eps)
  TailBound ray;  // ||A^T z||_1 <= M p (sqrt(2/pi) - eps), fixed unit z
};

/// Concentration for an L x M Bernoulli-Gaussian matrix: the crude operator
/// bound sum of column norms, and the lower tail of ||A^T z||_1.
OpRayBounds bound_operator_and_ray(double p, long L, long M, double eps);

struct BetaBound {
  double beta_n = 0.0;      // N p sqrt(((K-1)/N + eps) (1 + eps/p - eps))
  double prob_bound = 0.0;  // 2 exp(-N p eps^2 / (6 (K-1)/N + 2 eps))
};

BetaBound bound_beta(double p, int K, long N, double eps);

/// P(||B s||_2^2 >= L n p (1 + eps)) <= 2 exp(-L p eps^2 / (6 + 2 eps)) for
/// an L x n Bernoulli-Gaussian matrix and fixed sign vector s.
TailBound bound_bs_squared(double p, long L, long n, double eps);

struct Theorem4Result {
  bool identifiable_whp = false;
  std::optional<double> eps_star;
  double failure_prob_bound = 1.0;
  std::string reason;  // empty on success
};

/// Full high-probability pipeline for a basis with coherence mu2:
/// feasibility gates, the largest feasible eps in (0, 1/5) by bisection
/// (tolerance 1e-10), and the final failure probability bound clamped to
/// [0, 1]. p outside (0, 4/5) or N <= pi K / (2 (1-p)^2) raise
/// PreconditionFailed; a coherence above the asymptotic level returns
/// identifiable_whp = false with reason "asymptotic-coherence".
Theorem4Result theorem4(double p, int K, long N, double mu2);

enum class BoundId { Gamma, Support, BallOp, BallRay, Beta };

BoundId bound_id_from_name(const std::string& name);  // UnknownBoundId on miss
const char* bound_id_name(BoundId id);

/// Interpretation per bound: Gamma/Support use a length-M vector (p, M, eps);
/// BallOp/BallRay an L x M matrix; Beta an L x M matrix with a random sign
/// vector of length M.
struct BoundParams {
  double p = 0.5;
  long L = 1;
  long M = 1;
  double eps = 0.1;
};

struct ValidationResult {
  BoundId bound_id = BoundId::Gamma;
  BoundParams params;
  long trials = 0;
  double empirical_freq = 0.0;
  double theoretical_bound = 0.0;
  bool pass = false;

  std::string to_json() const;
};

/// Monte Carlo check that the empirical tail frequency stays below the
/// theoretical bound plus a 3-sigma sampling slack. trials >= 100.
ValidationResult validate_bound(BoundId id, const BoundParams& params, long trials,
                                std::uint64_t seed, int threads = 0);

}  // namespace dictid::bg
