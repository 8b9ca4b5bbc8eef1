#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dictid/model.hpp"

namespace dictid::experiments {

/// Cost of representing Y in the 2D dictionary parameterized by angles
/// (theta0, theta1) in [0, pi) per axis, evaluated on a uniform grid.
/// Cells with |sin(theta1 - theta0)| < sin_tol hold +inf.
struct LandscapeGrid {
  int resolution = 0;
  Eigen::MatrixXd values;  // resolution x resolution; [i][j] = cost(theta_i, theta_j)
  std::pair<double, double> theta_star{0.0, 0.0};
  double sin_tol = 0.0;

  double theta_at(int i) const;    // i * pi / resolution
  int cell_of(double theta) const; // nearest grid index, modulo pi
};

/// Direct 2x2 inversion per cell (basis case); d must equal 2.
LandscapeGrid landscape2d(const Eigen::MatrixXd& Y, std::pair<double, double> theta_star,
                          int resolution, double sin_tol, int threads = 0);

struct GridCell {
  int i = 0, j = 0;
};

struct LocalMinima {
  std::vector<GridCell> cells;  // strictly below all 8 torus neighbors
  bool plateau = false;         // some finite cell ties a neighbor
};

/// Torus topology modulo pi on each axis; +inf cells are never minima;
/// plateaus are flagged, not counted. Errors: EmptyGrid when no finite cell.
LocalMinima find_local_minima(const LandscapeGrid& grid);

struct PhaseCell {
  double mu = 0.0;
  double p = 0.0;
  int trials = 0;
  int missed_min = 0;
  int spurious_min = 0;
  int wrong_global = 0;
  int union_errors = 0;  // trials with at least one error type

  double error_rate() const { return trials ? static_cast<double>(union_errors) / trials : 0.0; }
};

struct PhaseConfig {
  std::vector<double> mu_grid;
  std::vector<double> p_grid;
  int trials = 100;
  long N = 1000;
  int resolution = 180;
  double sin_tol = 0.0;  // <= 0 selects the default sin(1 degree)/2
  std::uint64_t seed = 0;
  int threads = 0;
};

/// K = d = 2 Monte Carlo over the (mu, p) grid: per trial draw X, form
/// Y = D0 X, evaluate the landscape and classify missed / spurious / wrong
/// global minima against the planted cells (+-1 cell tolerance).
/// Deterministic in the seed regardless of thread count.
std::vector<PhaseCell> phase_experiment(const PhaseConfig& cfg);

/// D0 atoms for a target coherence mu: angle gap arccos(mu) centered in
/// [0, pi); returns (theta0*, theta1*).
std::pair<double, double> planted_angles(double mu);
Dictionary dictionary_from_angles(double theta0, double theta1);

struct ZonotopeSnapshot {
  std::vector<Eigen::Vector2d> vertices;  // counterclockwise boundary of Xbar_k Q
  Eigen::Vector2d v_point;
  Eigen::Vector2d u_point;
  bool contains_u = false;   // geometric verdict
  double per_k_value = 0.0;  // LP value for cross-checking

  std::string to_json(const std::string& meta_json = "") const;
};

/// K must equal 3 so that Xbar_k maps into R^2. The polygon comes from the
/// angular-sort Minkowski walk over the columns of Xbar_k; containment of
/// u_k is decided geometrically and reported next to the per-row LP value.
ZonotopeSnapshot zonotope_snapshot(const CoefficientMatrix& x, const Dictionary& d, int k);

double polygon_area(const std::vector<Eigen::Vector2d>& poly);
double polygon_perimeter(const std::vector<Eigen::Vector2d>& poly);

/// Default singularity mask half-width for landscape grids: sin(1 deg) / 2.
double default_sin_tol();

}  // namespace dictid::experiments
