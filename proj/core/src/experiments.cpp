#include "dictid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dictid/bgmodel.hpp"
#include "dictid/errors.hpp"
#include "dictid/lp.hpp"
#include "dictid/rng.hpp"
#include "dictid/threads.hpp"
#include "json.hpp"

namespace dictid::experiments {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double default_sin_tol() { return std::sin(kPi / 180.0) / 2.0; }

double LandscapeGrid::theta_at(int i) const { return i * kPi / resolution; }

int LandscapeGrid::cell_of(double theta) const {
  double t = std::fmod(theta, kPi);
  if (t < 0) t += kPi;
  const long idx = std::lround(t / (kPi / resolution));
  return static_cast<int>(idx % resolution);
}

LandscapeGrid landscape2d(const Eigen::MatrixXd& Y, std::pair<double, double> theta_star,
                          int resolution, double sin_tol, int threads) {
  if (Y.rows() != 2)
    fail(errc::kDimensionMismatch, "landscape2d needs 2 x N training data");
  if (resolution < 2) fail(errc::kDomainError, "resolution must be >= 2");

  LandscapeGrid grid;
  grid.resolution = resolution;
  grid.theta_star = theta_star;
  grid.sin_tol = sin_tol;
  grid.values.resize(resolution, resolution);

  const long N = Y.cols();
  std::vector<double> cs(resolution), sn(resolution);
  for (int i = 0; i < resolution; ++i) {
    cs[i] = std::cos(grid.theta_at(i));
    sn[i] = std::sin(grid.theta_at(i));
  }

  parallel_for(
      resolution,
      [&](std::int64_t i) {
        for (int j = 0; j < resolution; ++j) {
          const double det = cs[i] * sn[j] - sn[i] * cs[j];  // sin(theta_j - theta_i)
          if (std::abs(det) < sin_tol) {
            grid.values(i, j) = kInf;
            continue;
          }
          double cost = 0.0;
          for (long n = 0; n < N; ++n) {
            const double y0 = Y(0, n), y1 = Y(1, n);
            const double x0 = (sn[j] * y0 - cs[j] * y1) / det;
            const double x1 = (-sn[i] * y0 + cs[i] * y1) / det;
            cost += std::abs(x0) + std::abs(x1);
          }
          grid.values(i, j) = cost;
        }
      },
      threads);
  return grid;
}

LocalMinima find_local_minima(const LandscapeGrid& grid) {
  const int R = grid.resolution;
  bool any_finite = false;
  for (int i = 0; i < R && !any_finite; ++i)
    for (int j = 0; j < R; ++j)
      if (std::isfinite(grid.values(i, j))) {
        any_finite = true;
        break;
      }
  if (!any_finite) fail(errc::kEmptyGrid, "no finite landscape cell");

  LocalMinima out;
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < R; ++j) {
      const double v = grid.values(i, j);
      if (!std::isfinite(v)) continue;
      bool strict = true, tie = false;
      for (int di = -1; di <= 1 && strict; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double w = grid.values((i + di + R) % R, (j + dj + R) % R);
          if (v > w) {
            strict = false;
            break;
          }
          if (v == w) tie = true;
        }
      }
      if (!strict) continue;
      if (tie)
        out.plateau = true;
      else
        out.cells.push_back({i, j});
    }
  }
  return out;
}

std::pair<double, double> planted_angles(double mu) {
  if (!(mu >= 0.0) || !(mu < 1.0))
    fail(errc::kDomainError, "target coherence must lie in [0,1)");
  const double gap = std::acos(mu);
  const double theta0 = (kPi - gap) / 2.0;
  return {theta0, theta0 + gap};
}

Dictionary dictionary_from_angles(double theta0, double theta1) {
  Eigen::MatrixXd atoms(2, 2);
  atoms(0, 0) = std::cos(theta0);
  atoms(1, 0) = std::sin(theta0);
  atoms(0, 1) = std::cos(theta1);
  atoms(1, 1) = std::sin(theta1);
  return Dictionary::from_columns(atoms);
}

namespace {

int torus_dist(int a, int b, int R) {
  const int d = std::abs(a - b) % R;
  return std::min(d, R - d);
}

bool near_cell(const GridCell& c, int ei, int ej, int R) {
  return torus_dist(c.i, ei, R) <= 1 && torus_dist(c.j, ej, R) <= 1;
}

struct TrialOutcome {
  bool missed = false, spurious = false, wrong_global = false;
};

TrialOutcome classify_trial(const LandscapeGrid& grid, const LocalMinima& minima) {
  const int R = grid.resolution;
  const int e0i = grid.cell_of(grid.theta_star.first);
  const int e0j = grid.cell_of(grid.theta_star.second);

  TrialOutcome out;
  bool found_a = false, found_b = false;
  for (const auto& c : minima.cells) {
    const bool a = near_cell(c, e0i, e0j, R);
    const bool b = near_cell(c, e0j, e0i, R);
    found_a = found_a || a;
    found_b = found_b || b;
    if (!a && !b) out.spurious = true;
  }
  out.missed = !found_a || !found_b;

  // global grid minimum (first in row-major order among ties)
  int gi = -1, gj = -1;
  double best = kInf;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      if (grid.values(i, j) < best) {
        best = grid.values(i, j);
        gi = i;
        gj = j;
      }
  out.wrong_global = !(near_cell({gi, gj}, e0i, e0j, R) || near_cell({gi, gj}, e0j, e0i, R));
  return out;
}

}  // namespace

std::vector<PhaseCell> phase_experiment(const PhaseConfig& cfg) {
  if (cfg.trials < 1) fail(errc::kDomainError, "trials must be >= 1");
  if (cfg.mu_grid.empty() || cfg.p_grid.empty())
    fail(errc::kDomainError, "mu and p grids must be nonempty");
  const double sin_tol = cfg.sin_tol > 0 ? cfg.sin_tol : default_sin_tol();

  std::vector<PhaseCell> cells;
  cells.reserve(cfg.mu_grid.size() * cfg.p_grid.size());
  std::uint64_t cell_index = 0;
  for (double mu : cfg.mu_grid) {
    for (double p : cfg.p_grid) {
      const auto [t0, t1] = planted_angles(mu);
      const Dictionary d0 = dictionary_from_angles(t0, t1);

      std::vector<TrialOutcome> outcomes(cfg.trials);
      parallel_for(
          cfg.trials,
          [&](std::int64_t t) {
            const std::uint64_t trial_seed =
                derive_seed(cfg.seed, cell_index * 0x10000ull + static_cast<std::uint64_t>(t));
            const CoefficientMatrix X =
                bg::sample({p, 2, cfg.N, trial_seed});
            const Eigen::MatrixXd Y = d0.atoms * X.X;
            const LandscapeGrid grid =
                landscape2d(Y, {t0, t1}, cfg.resolution, sin_tol, 1);
            outcomes[t] = classify_trial(grid, find_local_minima(grid));
          },
          cfg.threads);

      PhaseCell cell;
      cell.mu = mu;
      cell.p = p;
      cell.trials = cfg.trials;
      for (const auto& o : outcomes) {
        cell.missed_min += o.missed;
        cell.spurious_min += o.spurious;
        cell.wrong_global += o.wrong_global;
        cell.union_errors += (o.missed || o.spurious || o.wrong_global);
      }
      cells.push_back(cell);
      ++cell_index;
    }
  }
  return cells;
}

ZonotopeSnapshot zonotope_snapshot(const CoefficientMatrix& x, const Dictionary& d, int k) {
  if (x.rows() != 3 || d.natoms() != 3)
    fail(errc::kDimensionMismatch, "zonotope snapshots need K = 3");
  const RowBlocks rb = row_blocks(x, d, k);

  ZonotopeSnapshot snap;
  snap.v_point = rb.vk;
  snap.u_point = rb.uk;

  // Oriented generators in the closed upper half plane, merged when collinear.
  std::vector<Eigen::Vector2d> gens;
  for (Eigen::Index j = 0; j < rb.Xbark.cols(); ++j) {
    Eigen::Vector2d g = rb.Xbark.col(j);
    if (g.norm() == 0.0) continue;
    if (g.y() < 0 || (g.y() == 0 && g.x() < 0)) g = -g;
    gens.push_back(g);
  }
  std::sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) {
    return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
  });
  std::vector<Eigen::Vector2d> merged;
  for (const auto& g : gens) {
    if (!merged.empty()) {
      const Eigen::Vector2d& h = merged.back();
      const double cross = h.x() * g.y() - h.y() * g.x();
      if (std::abs(cross) <= 1e-12 * h.norm() * g.norm()) {
        merged.back() += g;
        continue;
      }
    }
    merged.push_back(g);
  }

  if (merged.empty()) {
    snap.vertices.push_back(Eigen::Vector2d::Zero());
  } else {
    Eigen::Vector2d start = Eigen::Vector2d::Zero();
    for (const auto& g : merged) start -= g;
    // lower chain left to right, then the mirrored upper chain
    std::vector<Eigen::Vector2d> lower;
    lower.push_back(start);
    Eigen::Vector2d v = start;
    for (const auto& g : merged) {
      v += 2.0 * g;
      lower.push_back(v);
    }
    snap.vertices = lower;
    for (size_t j = 1; j + 1 < lower.size(); ++j) snap.vertices.push_back(-lower[j]);
  }

  // Geometric containment: inside every edge half-plane (CCW), with a
  // relative slab test for the degenerate (rank < 2) cases.
  const Eigen::Vector2d& u = snap.u_point;
  if (merged.size() >= 2) {
    bool inside = true;
    const size_t n = snap.vertices.size();
    double scale = 0.0;
    for (const auto& vtx : snap.vertices) scale = std::max(scale, vtx.norm());
    for (size_t a = 0; a < n && inside; ++a) {
      const Eigen::Vector2d& p0 = snap.vertices[a];
      const Eigen::Vector2d& p1 = snap.vertices[(a + 1) % n];
      const Eigen::Vector2d e = p1 - p0;
      const Eigen::Vector2d w = u - p0;
      if (e.x() * w.y() - e.y() * w.x() < -1e-12 * (1.0 + scale) * (1.0 + e.norm()))
        inside = false;
    }
    snap.contains_u = inside;
  } else if (merged.size() == 1) {
    const Eigen::Vector2d g = merged[0];
    const double gn2 = g.squaredNorm();
    const double t = u.dot(g) / gn2;
    const Eigen::Vector2d off = u - t * g;
    snap.contains_u = std::abs(t) <= 1.0 + 1e-12 && off.norm() <= 1e-9 * (1.0 + g.norm());
  } else {
    snap.contains_u = u.norm() <= 1e-12;
  }

  const LPSolution lp = min_inf_norm(rb.Xbark, rb.uk);
  snap.per_k_value = lp.value;
  return snap;
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(s) / 2.0;
}

double polygon_perimeter(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) s += (poly[(i + 1) % n] - poly[i]).norm();
  return s;
}

std::string ZonotopeSnapshot::to_json(const std::string& meta_json) const {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices) j["vertices"].push_back({v.x(), v.y()});
  j["v"] = {v_point.x(), v_point.y()};
  j["u"] = {u_point.x(), u_point.y()};
  j["contains_u"] = contains_u;
  j["per_k_value"] = std::isinf(per_k_value) ? nlohmann::json("inf")
                                             : nlohmann::json(per_k_value);
  if (!meta_json.empty()) j["meta"] = nlohmann::json::parse(meta_json);
  return j.dump(2);
}

}  // namespace dictid::experiments
