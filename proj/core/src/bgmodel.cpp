#include "dictid/bgmodel.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "dictid/errors.hpp"
#include "dictid/rng.hpp"
#include "dictid/threads.hpp"
#include "json.hpp"

namespace dictid::bg {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
constexpr double kSqrt2 = 1.4142135623730950488;

void check_p(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    fail(errc::kDomainError, "Bernoulli parameter p must lie in (0,1)");
}

void check_eps(double eps) {
  if (!(eps > 0.0)) fail(errc::kDomainError, "eps must be positive");
}

// Entry j of a Bernoulli-Gaussian stream: counters (3j, 3j+1, 3j+2) supply
// the indicator and the Box-Muller pair. Exact 0.0 for inactive entries.
double bg_entry(const CounterRng& rng, double p, std::uint64_t j) {
  if (rng.uniform01(3 * j) >= p) return 0.0;
  const double u1 = rng.uniform_pos(3 * j + 1);
  const double u2 = rng.uniform01(3 * j + 2);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace

CoefficientMatrix sample(const BGParams& params) {
  check_p(params.p);
  if (params.K < 1 || params.N < 1)
    fail(errc::kDomainError, "K and N must be positive");
  CounterRng rng(params.seed);
  Eigen::MatrixXd X(params.K, params.N);
  for (int k = 0; k < params.K; ++k)
    for (long n = 0; n < params.N; ++n)
      X(k, n) = bg_entry(rng, params.p,
                         static_cast<std::uint64_t>(k) * params.N + n);
  return CoefficientMatrix::from_matrix(X);
}

Eigen::VectorXd sample_vector(double p, long n, std::uint64_t seed) {
  check_p(p);
  CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (long j = 0; j < n; ++j) v(j) = bg_entry(rng, p, j);
  return v;
}

Eigen::MatrixXd sample_matrix(double p, long rows, long cols, std::uint64_t seed) {
  check_p(p);
  CounterRng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      m(r, c) = bg_entry(rng, p, static_cast<std::uint64_t>(r) * cols + c);
  return m;
}

BoundInputs BoundInputs::from(double p, int K, long N, double eps) {
  check_p(p);
  check_eps(eps);
  BoundInputs b;
  b.eps = eps;
  b.M_l = N * (1.0 - p) * (1.0 - eps);
  b.M_u = N * (1.0 - p) * (1.0 + eps);
  b.alpha_n = N * p * (1.0 - p) * (1.0 - eps) * (kSqrt2OverPi - 2.0 * eps - eps * eps);
  b.beta_n = N * p *
             std::sqrt(((static_cast<double>(K) - 1.0) / N + eps) * (1.0 + eps / p - eps));
  b.gamma_n = N * p * (kSqrt2OverPi + eps);
  return b;
}

TailBound bound_gamma(double p, long N, double eps) {
  check_p(p);
  check_eps(eps);
  TailBound t;
  t.threshold = N * p * (kSqrt2OverPi + eps);
  t.prob_bound = 2.0 * std::exp(-(N * p * eps * eps) / (2.0 + kSqrt2 * eps));
  return t;
}

double bound_gamma_union(double p, long N, int K, double eps) {
  return K * bound_gamma(p, N, eps).prob_bound;
}

TailBound bound_support_size(double p, long N, double eps) {
  check_p(p);
  check_eps(eps);
  TailBound t;
  t.threshold = N * (1.0 - p) * eps;  // half-width of the window around N(1-p)
  t.prob_bound = 2.0 * std::exp(-2.0 * N * (1.0 - p) * (1.0 - p) * eps * eps);
  return t;
}

OpRayBounds bound_operator_and_ray(double p, long L, long M, double eps) {
  check_p(p);
  check_eps(eps);
  if (L < 1 || M < 1) fail(errc::kDomainError, "L and M must be positive");
  OpRayBounds b;
  const double tail = 2.0 * std::exp(-(M * p * eps * eps) / (2.0 + kSqrt2 * eps));
  b.op.threshold = M * std::sqrt(p * static_cast<double>(L)) * (1.0 + eps);
  b.op.prob_bound = tail;
  b.ray.threshold = M * p * (kSqrt2OverPi - eps);
  b.ray.prob_bound = tail;
  return b;
}

BetaBound bound_beta(double p, int K, long N, double eps) {
  check_p(p);
  check_eps(eps);
  if (K < 2) fail(errc::kDomainError, "beta bound needs K >= 2");
  BetaBound b;
  b.beta_n = BoundInputs::from(p, K, N, eps).beta_n;
  b.prob_bound =
      2.0 * std::exp(-(N * p * eps * eps) /
                     (6.0 * (static_cast<double>(K) - 1.0) / N + 2.0 * eps));
  return b;
}

TailBound bound_bs_squared(double p, long L, long n, double eps) {
  check_p(p);
  check_eps(eps);
  if (L < 1 || n < 1) fail(errc::kDomainError, "L and n must be positive");
  TailBound t;
  t.threshold = static_cast<double>(L) * n * p * (1.0 + eps);
  t.prob_bound = 2.0 * std::exp(-(L * p * eps * eps) / (6.0 + 2.0 * eps));
  return t;
}

Theorem4Result theorem4(double p, int K, long N, double mu2) {
  if (!(p > 0.0) || !(p < 0.8))
    fail(errc::kPreconditionFailed, "p must satisfy 0 < p < 4/5, got " + std::to_string(p));
  if (K < 1) fail(errc::kPreconditionFailed, "K must be positive");
  const double pi = 3.14159265358979323846;
  const double n_floor = pi * K / (2.0 * (1.0 - p) * (1.0 - p));
  if (!(static_cast<double>(N) > n_floor))
    fail(errc::kPreconditionFailed,
         "N must exceed pi*K/(2(1-p)^2) = " + std::to_string(n_floor));
  if (!(mu2 >= 0.0)) fail(errc::kPreconditionFailed, "mu2 must be nonnegative");

  Theorem4Result res;
  const double mu_asymptotic = 1.0 - p - std::sqrt(pi * K / (2.0 * N));
  if (mu2 >= mu_asymptotic) {
    res.identifiable_whp = false;
    res.failure_prob_bound = 1.0;
    res.reason = "asymptotic-coherence";
    return res;
  }

  // Largest eps in (0, 1/5) keeping the coherence budget satisfied; the
  // budget is decreasing in eps and feasible at eps -> 0 by the gate above.
  const auto feasible = [&](double eps) {
    const double budget = (1.0 - p) * (1.0 - 5.0 * eps) -
                          std::sqrt(pi / 2.0 *
                                    (static_cast<double>(K) / N + eps) *
                                    (1.0 + eps / p));
    return mu2 <= budget;
  };
  double lo = 0.0, hi = 0.2;
  double eps_star;
  if (feasible(hi)) {
    eps_star = hi;
  } else {
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
    eps_star = lo;
  }
  res.eps_star = eps_star;

  if (eps_star <= 0.0) {
    res.identifiable_whp = false;
    res.failure_prob_bound = 1.0;
    res.reason = "no-feasible-eps";
    return res;
  }

  const double expo = 0.5 * K * std::log(9.0 * K / (eps_star * eps_star * p)) -
                      N * p * (1.0 - p) * eps_star * eps_star * (1.0 - 2.0 * eps_star) / 2.0;
  const double raw = 4.0 * K * std::exp(expo);
  res.failure_prob_bound = std::isfinite(raw) ? std::min(1.0, std::max(0.0, raw)) : 1.0;
  res.identifiable_whp = res.failure_prob_bound < 1.0;
  if (!res.identifiable_whp) res.reason = "vacuous-bound";
  return res;
}

BoundId bound_id_from_name(const std::string& name) {
  if (name == "gamma") return BoundId::Gamma;
  if (name == "support") return BoundId::Support;
  if (name == "ball-op") return BoundId::BallOp;
  if (name == "ball-ray") return BoundId::BallRay;
  if (name == "beta") return BoundId::Beta;
  fail(errc::kUnknownBoundId, "unknown bound id '" + name + "'");
}

const char* bound_id_name(BoundId id) {
  switch (id) {
    case BoundId::Gamma: return "gamma";
    case BoundId::Support: return "support";
    case BoundId::BallOp: return "ball-op";
    case BoundId::BallRay: return "ball-ray";
    default: return "beta";
  }
}

namespace {

// Tail event indicator for one trial, per bound.
bool trial_event(BoundId id, const BoundParams& q, std::uint64_t trial_seed) {
  switch (id) {
    case BoundId::Gamma: {
      const Eigen::VectorXd x = sample_vector(q.p, q.M, trial_seed);
      return x.lpNorm<1>() > q.M * q.p * (kSqrt2OverPi + q.eps);
    }
    case BoundId::Support: {
      CounterRng rng(trial_seed);
      long zeros = 0;
      for (long j = 0; j < q.M; ++j)
        if (rng.uniform01(3 * static_cast<std::uint64_t>(j)) >= q.p) ++zeros;
      const double ml = q.M * (1.0 - q.p) * (1.0 - q.eps);
      const double mu = q.M * (1.0 - q.p) * (1.0 + q.eps);
      return zeros < ml || zeros > mu;
    }
    case BoundId::BallOp: {
      const Eigen::MatrixXd A = sample_matrix(q.p, q.L, q.M, derive_seed(trial_seed, 1));
      double colsum = 0.0;
      for (long j = 0; j < q.M; ++j) colsum += A.col(j).norm();
      return colsum > q.M * std::sqrt(q.p * static_cast<double>(q.L)) * (1.0 + q.eps);
    }
    case BoundId::BallRay: {
      // z drawn independently of A, unit l2 norm
      CounterRng zr(derive_seed(trial_seed, 2));
      Eigen::VectorXd z(q.L);
      for (long i = 0; i < q.L; ++i) z(i) = zr.gaussian(i);
      const double zn = z.norm();
      z = (zn > 0) ? Eigen::VectorXd(z / zn) : Eigen::VectorXd::Unit(q.L, 0);
      const Eigen::MatrixXd A = sample_matrix(q.p, q.L, q.M, derive_seed(trial_seed, 1));
      return (A.transpose() * z).lpNorm<1>() <= q.M * q.p * (kSqrt2OverPi - q.eps);
    }
    case BoundId::Beta: {
      CounterRng sr(derive_seed(trial_seed, 2));
      Eigen::VectorXd s(q.M);
      for (long j = 0; j < q.M; ++j) s(j) = sr.uniform01(j) < 0.5 ? -1.0 : 1.0;
      const Eigen::MatrixXd B = sample_matrix(q.p, q.L, q.M, derive_seed(trial_seed, 1));
      const double bs2 = (B * s).squaredNorm();
      return bs2 >= static_cast<double>(q.L) * q.M * q.p * (1.0 + q.eps);
    }
  }
  return false;
}

double theoretical_for(BoundId id, const BoundParams& q) {
  switch (id) {
    case BoundId::Gamma: return bound_gamma(q.p, q.M, q.eps).prob_bound;
    case BoundId::Support: return bound_support_size(q.p, q.M, q.eps).prob_bound;
    case BoundId::BallOp: return bound_operator_and_ray(q.p, q.L, q.M, q.eps).op.prob_bound;
    case BoundId::BallRay: return bound_operator_and_ray(q.p, q.L, q.M, q.eps).ray.prob_bound;
    case BoundId::Beta: return bound_bs_squared(q.p, q.L, q.M, q.eps).prob_bound;
  }
  return 1.0;
}

}  // namespace

ValidationResult validate_bound(BoundId id, const BoundParams& params, long trials,
                                std::uint64_t seed, int threads) {
  if (trials < 100) fail(errc::kDomainError, "validate_bound needs trials >= 100");
  check_p(params.p);
  check_eps(params.eps);

  std::vector<unsigned char> hit(trials, 0);
  parallel_for(
      trials,
      [&](std::int64_t t) {
        hit[t] = trial_event(id, params, derive_seed(seed, static_cast<std::uint64_t>(t)))
                     ? 1
                     : 0;
      },
      threads);
  long count = 0;
  for (long t = 0; t < trials; ++t) count += hit[t];

  ValidationResult r;
  r.bound_id = id;
  r.params = params;
  r.trials = trials;
  r.empirical_freq = static_cast<double>(count) / trials;
  r.theoretical_bound = theoretical_for(id, params);
  const double b = std::min(1.0, std::max(0.0, r.theoretical_bound));
  const double slack = 3.0 * std::sqrt(b * (1.0 - b) / trials);
  r.pass = r.theoretical_bound >= 1.0 || r.empirical_freq <= b + slack;
  return r;
}

std::string ValidationResult::to_json() const {
  nlohmann::json j;
  j["bound_id"] = bound_id_name(bound_id);
  j["params"] = {{"p", params.p}, {"L", params.L}, {"M", params.M}, {"eps", params.eps}};
  j["trials"] = trials;
  j["empirical_freq"] = empirical_freq;
  j["theoretical_bound"] = theoretical_bound;
  j["pass"] = pass;
  return j.dump(2);
}

}  // namespace dictid::bg
