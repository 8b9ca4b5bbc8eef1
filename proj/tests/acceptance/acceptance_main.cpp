// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run all criteria with no arguments or a single one with --criterion N.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dictid/bgmodel.hpp"
#include "dictid/conditions.hpp"
#include "dictid/experiments.hpp"
#include "dictid/io.hpp"
#include "dictid/localmin.hpp"
#include "dictid/lp.hpp"
#include "dictid/model.hpp"
#include "dictid/rng.hpp"
#include "dictid/threads.hpp"
#include "oracles.hpp"

using namespace dictid;

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535588;

struct Checker {
  int failures = 0;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      std::printf("    FAILED: %s\n", what.c_str());
    }
  }
};

Dictionary mixed_basis(int K, std::uint64_t seed, double mix) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(K, K);
  CounterRng rng(seed);
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < K; ++i)
      if (i != j)
        m(i, j) = mix * (2.0 * rng.uniform01(static_cast<std::uint64_t>(j) * K + i) - 1.0);
  return normalize_columns(m);
}

Eigen::MatrixXd zero_v(const CoefficientMatrix& x) {
  return Eigen::MatrixXd::Zero(x.rows(), x.cols());
}

Eigen::MatrixXd embed_row(int K, int row, const Eigen::VectorXd& zbar) {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(K, K);
  int idx = 0;
  for (int l = 0; l < K; ++l)
    if (l != row) Z(row, l) = zbar(idx++);
  return Z;
}

// ---------------------------------------------------------------- criterion 1
// LP duality: min_inf_norm value matches the facet + dense-sampling estimate
// of sup_z <v,z>/||A^T z||_1 within 1e-6 on 200 random full-row-rank systems.
int criterion_1() {
  Checker ck;
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 200; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3);
    const int M = n + static_cast<int>(seed % (7 - n));
    if (M > 6 || M < n) continue;
    const Eigen::MatrixXd A = oracles::random_uniform(n, M, 50000 + seed);
    if (oracles::smallest_singular_value(A) < 0.05) continue;
    CounterRng rng(60000 + seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.gaussian(i);
    const LPSolution s = min_inf_norm(A, v);
    ck.require(s.status == LPStatus::Optimal, "instance " + std::to_string(tested) + " not optimal");
    if (s.status != LPStatus::Optimal) continue;
    const double oracle = oracles::sup_ratio(A, v, 70000 + seed);
    ck.require(std::abs(s.value - oracle) < 1e-6,
               "value " + std::to_string(s.value) + " vs oracle " + std::to_string(oracle));
    ++tested;
  }
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 2
// SC implies a strict local minimum: on 50 SC instances, 100 random tangent
// directions at eps = +-1e-3 never decrease the cost (tolerance -1e-10) and
// increase it strictly when Xprime != 0.
int criterion_2() {
  Checker ck;
  struct Inst {
    Dictionary d;
    CoefficientMatrix x;
  };
  std::vector<Inst> instances;
  std::uint64_t seed = 0;
  while (instances.size() < 50 && seed < 4000) {
    ++seed;
    const int K = (seed % 2) ? 2 : 3;
    const long N = (seed % 4 < 2) ? 50 : 500;
    const double p = (seed % 8 < 4) ? 0.3 : 0.5;
    Dictionary d = mixed_basis(K, 100 + seed, 0.2);
    CoefficientMatrix x = bg::sample({p, K, N, 200 + seed});
    if (check_conditions(d, x, 1e-7).sc != TriState::Yes) continue;
    instances.push_back({std::move(d), std::move(x)});
  }
  ck.require(instances.size() == 50, "could not assemble 50 SC instances");

  std::vector<int> bad(instances.size(), 0);
  parallel_for(static_cast<std::int64_t>(instances.size()), [&](std::int64_t i) {
    const auto& inst = instances[i];
    const double scale = inst.x.X.cwiseAbs().maxCoeff();
    for (int dir = 0; dir < 100; ++dir) {
      const Eigen::MatrixXd Z = random_zero_diag(
          inst.d.natoms(), derive_seed(900 + i, static_cast<std::uint64_t>(dir)));
      const auto t = make_direction(inst.d, inst.x, Z, zero_v(inst.x));
      const auto deltas = curve_probe(inst.d, inst.x, t, {-1e-3, 1e-3});
      const bool moving = t.Xprime.cwiseAbs().maxCoeff() > 1e-12 * scale;
      for (double delta : deltas) {
        if (delta < -1e-10) ++bad[i];
        if (moving && !(delta > 0.0)) ++bad[i];
      }
    }
  });
  int total_bad = 0;
  for (int b : bad) total_bad += b;
  ck.require(total_bad == 0, std::to_string(total_bad) + " non-increasing probes");
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 3
// NC violation yields an explicit descent direction built from the LP dual
// certificate, on 20 constructed failing instances.
int criterion_3() {
  Checker ck;
  int built = 0;
  for (std::uint64_t seed = 1; built < 20 && seed < 2000; ++seed) {
    const int K = (seed % 2) ? 2 : 3;
    const Dictionary d = normalize_columns(Eigen::MatrixXd::Identity(K, K));
    const CoefficientMatrix x = bg::sample({0.9, K, 6 + static_cast<long>(seed % 6), 3000 + seed});
    const auto rep = check_conditions(d, x, 1e-7);
    int row = -1;
    for (int k = 0; k < K; ++k)
      if (rep.k_values[k] > 1.1 && rep.k_certificates[k].size() == K - 1) row = k;
    if (row < 0) continue;
    ++built;
    const Eigen::MatrixXd Z = embed_row(K, row, rep.k_certificates[row]);
    const auto t = make_direction(d, x, Z, zero_v(x));
    const auto deltas = curve_probe(d, x, t, {-1e-4, 1e-4});
    ck.require(std::min(deltas[0], deltas[1]) < 0.0,
               "no descent at seed " + std::to_string(seed));
  }
  ck.require(built == 20, "constructed only " + std::to_string(built) + " failing instances");
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 4
// Decoupled coherence test implies SC on 500 random instances, no exceptions.
int criterion_4() {
  Checker ck;
  struct Params {
    int K;
    long N;
    double p, mix;
    std::uint64_t seed;
  };
  std::vector<Params> grid;
  std::uint64_t seed = 0;
  while (grid.size() < 500) {
    ++seed;
    const int K = 2 + static_cast<int>(seed % 3);
    const long N = (seed % 9 < 3) ? 30 : ((seed % 9 < 6) ? 100 : 300);
    const double p = 0.1 + 0.2 * static_cast<double>((seed / 2) % 5);
    const double mix =
        (seed % 4 == 0) ? 0.0 : ((seed % 4 == 1) ? 0.15 : ((seed % 4 == 2) ? 0.4 : 0.8));
    grid.push_back({K, N, p, mix, seed});
  }
  std::vector<int> held(grid.size(), 0), violated(grid.size(), 0);
  parallel_for(static_cast<std::int64_t>(grid.size()), [&](std::int64_t i) {
    const auto& g = grid[i];
    const Dictionary d = mixed_basis(g.K, 40000 + g.seed, g.mix);
    const CoefficientMatrix x = bg::sample({g.p, g.K, g.N, 41000 + g.seed});
    const auto t3 = theorem3_check(d, x, 2.0, RadiusMode::exact_facets());
    if (!t3.holds) return;
    held[i] = 1;
    const auto rep = check_conditions(d, x, 1e-7);
    if (rep.sc != TriState::Yes || rep.nc != TriState::Yes) violated[i] = 1;
  });
  int nheld = 0, nviol = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    nheld += held[i];
    nviol += violated[i];
  }
  ck.require(nviol == 0, std::to_string(nviol) + " implication counterexamples");
  ck.require(nheld > 30, "theorem3 held on only " + std::to_string(nheld) + " instances");
  std::printf("    (theorem3 held on %d / 500 instances)\n", nheld);
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 5
// Landscape reproduction: p = 0.7, N = 1000, mu = 0.05, resolution 180,
// fixed seed; exactly two strict minima, each within one cell of the planted
// pair, the global minimum among them.
int criterion_5() {
  Checker ck;
  const auto [t0, t1] = experiments::planted_angles(0.05);
  const Dictionary d0 = experiments::dictionary_from_angles(t0, t1);
  const auto x = bg::sample({0.7, 2, 1000, 20260528});
  const Eigen::MatrixXd Y = d0.atoms * x.X;
  const auto grid =
      experiments::landscape2d(Y, {t0, t1}, 180, experiments::default_sin_tol(), 0);
  const auto minima = experiments::find_local_minima(grid);
  ck.require(minima.cells.size() == 2,
             "found " + std::to_string(minima.cells.size()) + " minima, expected 2");
  const int e0 = grid.cell_of(t0), e1 = grid.cell_of(t1);
  const auto near = [&](const experiments::GridCell& c, int a, int b) {
    const auto dist = [&](int u, int v) {
      const int d = std::abs(u - v) % 180;
      return std::min(d, 180 - d);
    };
    return dist(c.i, a) <= 1 && dist(c.j, b) <= 1;
  };
  bool found_a = false, found_b = false;
  for (const auto& c : minima.cells) {
    if (near(c, e0, e1)) found_a = true;
    if (near(c, e1, e0)) found_b = true;
  }
  ck.require(found_a && found_b, "minima not at the planted cells");

  int gi = 0, gj = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 180; ++i)
    for (int j = 0; j < 180; ++j)
      if (grid.values(i, j) < best) {
        best = grid.values(i, j);
        gi = i;
        gj = j;
      }
  ck.require(near({gi, gj}, e0, e1) || near({gi, gj}, e1, e0),
             "global minimum away from the planted cells");
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 6
// Phase-transition corners and diagonal monotonicity, 100 trials per cell.
int criterion_6() {
  Checker ck;
  experiments::PhaseConfig cfg;
  cfg.mu_grid = {0.05, 0.5, 0.95};
  cfg.p_grid = {0.1, 0.5, 0.7};
  cfg.trials = 100;
  cfg.N = 1000;
  cfg.resolution = 180;
  cfg.seed = 33550336;
  const auto cells = experiments::phase_experiment(cfg);
  const auto rate = [&](double mu, double p) {
    for (const auto& c : cells)
      if (c.mu == mu && c.p == p) return c.error_rate();
    return -1.0;
  };
  const double easy = rate(0.05, 0.1);
  const double mid = rate(0.5, 0.5);
  const double hard = rate(0.95, 0.7);
  std::printf("    (error rates: easy %.3f, mid %.3f, hard %.3f)\n", easy, mid, hard);
  ck.require(easy <= 0.05, "easy corner rate " + std::to_string(easy) + " > 5%");
  ck.require(hard >= 0.50, "hard corner rate " + std::to_string(hard) + " < 50%");
  ck.require(easy <= mid && mid <= hard, "diagonal not monotone");
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 7
// Monte Carlo validation of all five concentration bounds, three parameter
// points each, 1e4 trials.
int criterion_7() {
  Checker ck;
  struct Point {
    bg::BoundId id;
    bg::BoundParams q;
  };
  const std::vector<Point> points = {
      {bg::BoundId::Gamma, {0.5, 1, 1000, 0.2}},
      {bg::BoundId::Gamma, {0.3, 1, 500, 0.15}},
      {bg::BoundId::Gamma, {0.7, 1, 2000, 0.1}},
      {bg::BoundId::Support, {0.5, 1, 1000, 0.1}},
      {bg::BoundId::Support, {0.9, 1, 500, 0.3}},
      {bg::BoundId::Support, {0.2, 1, 2000, 0.05}},
      {bg::BoundId::BallOp, {0.5, 3, 300, 0.2}},
      {bg::BoundId::BallOp, {0.3, 2, 500, 0.15}},
      {bg::BoundId::BallOp, {0.7, 5, 200, 0.1}},
      {bg::BoundId::BallRay, {0.5, 3, 300, 0.2}},
      {bg::BoundId::BallRay, {0.3, 2, 500, 0.15}},
      {bg::BoundId::BallRay, {0.7, 5, 200, 0.1}},
      {bg::BoundId::Beta, {0.5, 3, 200, 0.3}},
      {bg::BoundId::Beta, {0.3, 5, 300, 0.2}},
      {bg::BoundId::Beta, {0.7, 2, 400, 0.25}},
  };
  std::uint64_t seed = 90000;
  for (const auto& pt : points) {
    const auto r = bg::validate_bound(pt.id, pt.q, 10000, ++seed, 0);
    ck.require(r.pass, std::string(bg::bound_id_name(pt.id)) + " exceeded its bound: freq " +
                           std::to_string(r.empirical_freq) + " vs " +
                           std::to_string(r.theoretical_bound));
  }
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 8
// Asymptotic inscribed radius: mean over rows and seeds of R_2(Xbar_k) lies
// within 15% of N p (1-p) sqrt(2/pi) for K = 3, N = 2000.
int criterion_8() {
  Checker ck;
  for (const double p : {0.3, 0.5}) {
    std::vector<double> vals(20 * 3, 0.0);
    parallel_for(20, [&](std::int64_t s) {
      const auto x = bg::sample({p, 3, 2000, 777000 + static_cast<std::uint64_t>(s)});
      const Dictionary d = normalize_columns(Eigen::MatrixXd::Identity(3, 3));
      for (int k = 0; k < 3; ++k) {
        const auto rb = row_blocks(x, d, k);
        vals[s * 3 + k] = radius(rb.Xbark, 2.0, RadiusMode::exact_facets()).value;
      }
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    const double target = 2000.0 * p * (1.0 - p) * kSqrt2OverPi;
    const double rel = std::abs(mean - target) / target;
    std::printf("    (p = %.1f: mean radius %.1f vs %.1f, rel %.3f)\n", p, mean, target, rel);
    ck.require(rel <= 0.15, "relative deviation " + std::to_string(rel) + " > 15%");
  }
  return ck.failures;
}

// ---------------------------------------------------------------- criterion 9
// Zonotope containment agrees with the per-row LP verdict on 100 random
// K = 3 instances (1e-7 band around 1 excluded).
int criterion_9() {
  Checker ck;
  const Dictionary I3 = normalize_columns(Eigen::MatrixXd::Identity(3, 3));
  int checked = 0, disagreements = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double p = 0.25 + 0.1 * static_cast<double>(seed % 6);
    const long N = 10 + static_cast<long>(seed % 30);
    const auto x = bg::sample({p, 3, N, 880000 + seed});
    for (int k = 0; k < 3; ++k) {
      const auto s = experiments::zonotope_snapshot(x, I3, k);
      if (std::isfinite(s.per_k_value) && std::abs(s.per_k_value - 1.0) <= 1e-7) continue;
      ++checked;
      if (s.contains_u != (s.per_k_value < 1.0)) ++disagreements;
    }
  }
  ck.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  ck.require(checked >= 250, "only " + std::to_string(checked) + " verdicts checked");
  return ck.failures;
}

// --------------------------------------------------------------- criterion 10
// Determinism: randomized subcommands rerun with the same seed and different
// --threads give byte-identical artifacts (exercised through the real binary).
int criterion_10() {
  Checker ck;
  namespace fs = std::filesystem;
  const std::string bin = DICTID_CLI_BINARY;
  ck.require(fs::exists(bin), "CLI binary not found at " + bin);
  if (!fs::exists(bin)) return ck.failures;
  const fs::path dir = fs::temp_directory_path() / "dictid_acceptance10";
  fs::create_directories(dir);

  const auto file_of = [&](const std::string& name) { return (dir / name).string(); };
  const auto run_bin = [&](const std::string& args) {
    const int rc = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  const auto same = [&](const std::string& a, const std::string& b) {
    return io::read_text_file(a) == io::read_text_file(b);
  };

  // fixture pair for verify-localmin
  const std::string dict_csv = file_of("I3.csv");
  io::write_text_file(dict_csv, "3,3\n1,0,0\n0,1,0\n0,0,1\n");
  const std::string coeff_csv = file_of("X3.csv");
  ck.require(run_bin("sample --p 0.4 --K 3 --N 200 --seed 99 -o " + coeff_csv) == 0,
             "fixture sample failed");

  struct Cmd {
    std::string name, args;
  };
  const std::vector<Cmd> cmds = {
      {"sample", "sample --p 0.4 --K 3 --N 500 --seed 12"},
      {"landscape", "landscape --p 0.6 --N 200 --mu 0.1 --resolution 60 --seed 13"},
      {"phase", "phase --mu-grid 0.1,0.6 --p-grid 0.4 --trials 3 --N 120 --resolution 45 --seed 14"},
      {"bounds", "bounds --which ball --p 0.5 --L 3 --M 100 --eps 0.2 --validate --trials 400 --seed 15"},
      {"verify", "verify-localmin --dict " + dict_csv + " --coeff " + coeff_csv +
                     " --directions 200 --seed 16"},
  };
  for (const auto& c : cmds) {
    const std::string f1 = file_of(c.name + "_t1"), f2 = file_of(c.name + "_t2");
    const int r1 = run_bin(c.args + " --threads 1 -o " + f1);
    const int r2 = run_bin(c.args + " --threads 2 -o " + f2);
    ck.require(r1 == 0 && r2 == 0, c.name + " exited nonzero");
    if (r1 == 0 && r2 == 0)
      ck.require(same(f1, f2), c.name + " differs across thread counts");
  }
  fs::remove_all(dir);
  return ck.failures;
}

struct Criterion {
  int id;
  const char* text;
  std::function<int()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "LP duality equivalence on 200 random systems", criterion_1},
      {2, "SC implies strict local minimum along 100-direction probes", criterion_2},
      {3, "NC violation yields a certificate descent direction", criterion_3},
      {4, "coherence test implies SC on 500 random instances", criterion_4},
      {5, "landscape reproduction with exactly two planted minima", criterion_5},
      {6, "phase-transition corners and diagonal monotonicity", criterion_6},
      {7, "all five concentration bounds validated at 3 points each", criterion_7},
      {8, "inscribed radius matches N p (1-p) sqrt(2/pi) within 15%", criterion_8},
      {9, "zonotope containment agrees with the LP verdict", criterion_9},
      {10, "byte-identical artifacts across thread counts", criterion_10},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    const int failures = c.fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %2d: %s  (%.1fs)\n", failures == 0 ? "PASS" : "FAIL", c.id,
                c.text, secs);
    std::fflush(stdout);
    if (failures != 0) ++failed;
  }
  if (ran == 0) {
    std::printf("unknown criterion %d\n", only);
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
