#include <cmath>

#include "dictid/bgmodel.hpp"
#include "dictid/conditions.hpp"
#include "dictid/errors.hpp"
#include "dictid/localmin.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dictid;

namespace {

Dictionary identity_dict(int K) {
  return normalize_columns(Eigen::MatrixXd::Identity(K, K));
}

// A mildly coherent basis that stays invertible.
Dictionary mixed_basis(int K, std::uint64_t seed, double mix = 0.3) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(K, K);
  CounterRng rng(seed);
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < K; ++i)
      if (i != j)
        m(i, j) = mix * (2.0 * rng.uniform01(static_cast<std::uint64_t>(j) * K + i) - 1.0);
  return normalize_columns(m);
}

Eigen::MatrixXd no_v(const CoefficientMatrix& x) {
  return Eigen::MatrixXd::Zero(x.rows(), x.cols());
}

struct ScInstance {
  Dictionary d;
  CoefficientMatrix x;
};

ScInstance make_sc_instance() {
  for (std::uint64_t seed = 1;; ++seed) {
    Dictionary d = mixed_basis(3, 5000 + seed, 0.2);
    CoefficientMatrix x = bg::sample({0.3, 3, 120, 6000 + seed});
    const auto rep = check_conditions(d, x, 1e-7);
    if (rep.sc == TriState::Yes) return {std::move(d), std::move(x)};
  }
}

struct NcFailure {
  Dictionary d;
  CoefficientMatrix x;
  int row = -1;
  Eigen::VectorXd cert;
};

NcFailure make_nc_failure() {
  for (std::uint64_t seed = 1;; ++seed) {
    Dictionary d = identity_dict(2);
    CoefficientMatrix x = bg::sample({0.9, 2, 8, 9000 + seed});
    const auto rep = check_conditions(d, x, 1e-7);
    for (int k = 0; k < 2; ++k) {
      if (rep.k_values[k] > 1.1 && rep.k_certificates[k].size() > 0) {
        return {std::move(d), std::move(x), k, rep.k_certificates[k]};
      }
    }
  }
}

Eigen::MatrixXd embed_certificate(int K, int row, const Eigen::VectorXd& zbar) {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(K, K);
  int idx = 0;
  for (int l = 0; l < K; ++l)
    if (l != row) Z(row, l) = zbar(idx++);
  return Z;
}

}  // namespace

TEST_SUITE_BEGIN("localmin");

TEST_CASE("make_direction basics") {
  const Dictionary d = identity_dict(3);
  const auto x = CoefficientMatrix::from_matrix(oracles::random_uniform(3, 5, 42));

  SUBCASE("zero inputs give the zero direction") {
    const auto t = make_direction(d, x, Eigen::MatrixXd::Zero(3, 3), no_v(x));
    CHECK(t.C.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.Xprime.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("orthonormal dictionary: C equals Z exactly") {
    const Eigen::MatrixXd Z = random_zero_diag(3, 7);
    const auto t = make_direction(d, x, Z, no_v(x));
    CHECK((t.C - Z).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("coherent basis: D C is tangent to the unit-column manifold") {
    const Dictionary db = mixed_basis(3, 99);
    const Eigen::MatrixXd Z = random_zero_diag(3, 8);
    const auto t = make_direction(db, x, Z, no_v(x));
    const Eigen::VectorXd tang =
        (db.atoms.transpose() * (db.atoms * t.C)).diagonal();
    CHECK(tang.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("diagonal entries in Z are rejected") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
    Z(1, 1) = 1e-18;
    CHECK_THROWS_AS(make_direction(d, x, Z, no_v(x)), Error);
  }
  SUBCASE("V outside the null space is rejected") {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(3, 5);
    V(0, 0) = 1.0;  // basis null space is trivial
    CHECK_THROWS_AS(make_direction(d, x, random_zero_diag(3, 9), V), Error);
  }
}

TEST_CASE("u_matrix identity for orthonormal identity coefficients") {
  const Dictionary d = identity_dict(4);
  const auto x = CoefficientMatrix::from_matrix(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::MatrixXd U = u_matrix(d, x);
  CHECK((U - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("directional derivatives") {
  const auto x = CoefficientMatrix::from_matrix((Eigen::MatrixXd(2, 2) << 1, 0, 0, -2).finished());
  const Dictionary d = identity_dict(2);

  SUBCASE("zero direction") {
    const auto t = make_direction(d, x, Eigen::MatrixXd::Zero(2, 2), no_v(x));
    const auto dd = directional_derivatives(x, t);
    CHECK(dd.plus == 0.0);
    CHECK(dd.minus == 0.0);
  }
  SUBCASE("direction supported on the zero set splits symmetrically") {
    TangentDirection t;
    t.Z = Eigen::MatrixXd::Zero(2, 2);
    t.C = t.Z;
    t.V = no_v(x);
    t.Xprime = (Eigen::MatrixXd(2, 2) << 0, 3, -4, 0).finished();  // on Lambda only
    const auto dd = directional_derivatives(x, t);
    CHECK(dd.plus == doctest::Approx(7.0));
    CHECK(dd.minus == doctest::Approx(-7.0));
  }
  SUBCASE("finite differences confirm both one-sided slopes") {
    const auto xr = bg::sample({0.5, 3, 40, 2222});
    const Dictionary db = mixed_basis(3, 2223);
    const auto t = make_direction(db, xr, random_zero_diag(3, 2224), no_v(xr));
    const auto dd = directional_derivatives(xr, t);
    CHECK(dd.plus >= dd.minus);
    const double h = 1e-6;
    const double base = xr.X.cwiseAbs().sum();
    const double fplus = ((xr.X + h * t.Xprime).cwiseAbs().sum() - base) / h;
    const double fminus = ((xr.X - h * t.Xprime).cwiseAbs().sum() - base) / (-h);
    CHECK(std::abs(dd.plus - fplus) < 1e-4);
    CHECK(std::abs(dd.minus - fminus) < 1e-4);
  }
}

TEST_CASE("nsc_check") {
  SUBCASE("orthonormal identity pair is satisfied for any direction") {
    const Dictionary d = identity_dict(4);
    const auto x = CoefficientMatrix::from_matrix(Eigen::MatrixXd::Identity(4, 4));
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const auto t = make_direction(d, x, random_zero_diag(4, s), no_v(x));
      const auto r = nsc_check(d, x, t);
      CHECK(r.lhs < 1e-12);  // U is diagonal, Z zero-diagonal
      CHECK(r.rhs > 0.0);
      CHECK(r.satisfied);
    }
  }
  SUBCASE("degenerate direction is rejected") {
    const Dictionary d = identity_dict(2);
    const auto x = CoefficientMatrix::from_matrix(Eigen::MatrixXd::Zero(2, 2));
    const auto t = make_direction(d, x, random_zero_diag(2, 3), no_v(x));
    CHECK_THROWS_AS(nsc_check(d, x, t), Error);
  }
  SUBCASE("SC instance satisfies the inequality for a 1000-direction battery") {
    const ScInstance inst = make_sc_instance();
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto t =
          make_direction(inst.d, inst.x, random_zero_diag(3, derive_seed(4242, s)), no_v(inst.x));
      const auto r = nsc_check(inst.d, inst.x, t);
      CHECK(r.satisfied);
    }
  }
  SUBCASE("NC violation: certificate direction breaks the inequality") {
    const NcFailure f = make_nc_failure();
    const Eigen::MatrixXd Z = embed_certificate(2, f.row, f.cert);
    const auto t = make_direction(f.d, f.x, Z, no_v(f.x));
    const auto r = nsc_check(f.d, f.x, t);
    CHECK_FALSE(r.satisfied);
    CHECK(r.lhs > r.rhs);
  }
}

TEST_CASE("overcomplete dictionaries: null-space directions are admitted") {
  const Dictionary d = normalize_columns(oracles::random_uniform(2, 3, 1717));
  REQUIRE(d.is_complete());
  const Eigen::MatrixXd kernel = null_space_basis(d);
  REQUIRE(kernel.cols() == 1);
  CHECK((d.atoms * kernel).cwiseAbs().maxCoeff() < 1e-12);

  const auto x = bg::sample({0.5, 3, 20, 1718});
  CounterRng rng(1719);
  Eigen::MatrixXd coeffs(1, 20);
  for (int n = 0; n < 20; ++n) coeffs(0, n) = rng.gaussian(n);
  const Eigen::MatrixXd V = kernel * coeffs;

  const auto t = make_direction(d, x, random_zero_diag(3, 1720), V);
  CHECK((t.Xprime - (-t.C * x.X + V)).cwiseAbs().maxCoeff() < 1e-14);

  // the NSC quantities and one-sided slopes stay consistent with V != 0
  const auto r = nsc_check(d, x, t);
  CHECK(r.rhs > 0.0);
  const auto dd = directional_derivatives(x, t);
  const double h = 1e-6;
  const double base = x.X.cwiseAbs().sum();
  const double fplus = ((x.X + h * t.Xprime).cwiseAbs().sum() - base) / h;
  CHECK(std::abs(dd.plus - fplus) < 1e-4);

  // a basis has the trivial null space
  CHECK(null_space_basis(identity_dict(3)).cols() == 0);
}

TEST_CASE("plus derivative ties to the nsc algebra for V = 0") {
  const auto x = bg::sample({0.5, 3, 30, 555});
  const Dictionary d = mixed_basis(3, 556);
  const Eigen::MatrixXd Z = random_zero_diag(3, 557);
  const auto t = make_direction(d, x, Z, no_v(x));
  const auto dd = directional_derivatives(x, t);
  const auto r = nsc_check(d, x, t);
  const double signed_term = -(Z.array() * u_matrix(d, x).array()).sum();
  CHECK(dd.plus == doctest::Approx(r.rhs + signed_term).epsilon(1e-10));
  CHECK(dd.minus == doctest::Approx(-r.rhs + signed_term).epsilon(1e-10));
  CHECK((dd.plus > 0 && dd.minus < 0) == (r.lhs < r.rhs));
}

TEST_CASE("decoupling_gap") {
  SUBCASE("single-row Z reproduces the row ratio") {
    const auto x = bg::sample({0.5, 3, 40, 808});
    const Dictionary d = mixed_basis(3, 809);
    CounterRng rng(810);
    Eigen::VectorXd zbar(2);
    zbar << rng.gaussian(0), rng.gaussian(1);
    const int k = 1;
    const Eigen::MatrixXd Z = embed_certificate(3, k, zbar);
    const auto g = decoupling_gap(d, x, Z);
    const RowBlocks rb = row_blocks(x, d, k);
    const double expect =
        std::abs(rb.uk.dot(zbar)) / (rb.Xbark.transpose() * zbar).lpNorm<1>();
    CHECK(g.coupled == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("random Z on an SC instance stays below one and below the max row") {
    const ScInstance inst = make_sc_instance();
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Eigen::MatrixXd Z = random_zero_diag(3, derive_seed(909, s));
      const auto g = decoupling_gap(inst.d, inst.x, Z);
      CHECK(g.coupled < 1.0);
      CHECK(g.coupled <= g.decoupled_max + 1e-9);
    }
  }
  SUBCASE("certificate embedding is tight") {
    const auto x = bg::sample({0.6, 3, 25, 1010});
    const Dictionary d = mixed_basis(3, 1011);
    const auto rep = check_conditions(d, x, 1e-7);
    int kmax = 0;
    for (int k = 1; k < 3; ++k)
      if (rep.k_values[k] > rep.k_values[kmax]) kmax = k;
    REQUIRE(std::isfinite(rep.k_values[kmax]));
    REQUIRE(rep.k_certificates[kmax].size() == 2);
    const Eigen::MatrixXd Z = embed_certificate(3, kmax, rep.k_certificates[kmax]);
    const auto g = decoupling_gap(d, x, Z);
    CHECK(std::abs(g.coupled - g.decoupled_max) <= 1e-6);
  }
}

TEST_CASE("curve_probe") {
  SUBCASE("eps = 0 gives delta 0") {
    const ScInstance inst = make_sc_instance();
    const auto t = make_direction(inst.d, inst.x, random_zero_diag(3, 1), no_v(inst.x));
    const auto deltas = curve_probe(inst.d, inst.x, t, {0.0});
    CHECK(deltas[0] == 0.0);
  }
  SUBCASE("SC instance: strictly positive cost growth both ways") {
    const ScInstance inst = make_sc_instance();
    for (std::uint64_t s = 0; s < 25; ++s) {
      const auto t =
          make_direction(inst.d, inst.x, random_zero_diag(3, derive_seed(31, s)), no_v(inst.x));
      const auto deltas = curve_probe(inst.d, inst.x, t, {-1e-3, 1e-3});
      CHECK(deltas[0] > 0.0);
      CHECK(deltas[1] > 0.0);
    }
  }
  SUBCASE("NC violation: certificate direction descends for a small step") {
    const NcFailure f = make_nc_failure();
    const Eigen::MatrixXd Z = embed_certificate(2, f.row, f.cert);
    const auto t = make_direction(f.d, f.x, Z, no_v(f.x));
    const auto deltas = curve_probe(f.d, f.x, t, {-1e-4, 1e-4});
    CHECK(std::min(deltas[0], deltas[1]) < 0.0);
  }
  SUBCASE("slope matches the one-sided derivatives to second order") {
    const ScInstance inst = make_sc_instance();
    const auto t = make_direction(inst.d, inst.x, random_zero_diag(3, 47), no_v(inst.x));
    const auto dd = directional_derivatives(inst.x, t);
    const double eps = 1e-4;
    const auto deltas = curve_probe(inst.d, inst.x, t, {eps, -eps});
    const double tol =
        10.0 * eps * eps * inst.x.X.cwiseAbs().sum() * std::max(1.0, t.C.squaredNorm());
    CHECK(std::abs(deltas[0] - eps * dd.plus) <= tol);
    CHECK(std::abs(deltas[1] - (-eps) * dd.minus) <= tol);
  }
  SUBCASE("non-basis dictionaries are rejected") {
    const Dictionary d = normalize_columns(oracles::random_uniform(2, 3, 3));
    const auto x = CoefficientMatrix::from_matrix(Eigen::MatrixXd::Identity(3, 3));
    TangentDirection t;
    t.Z = Eigen::MatrixXd::Zero(3, 3);
    t.C = t.Z;
    t.V = Eigen::MatrixXd::Zero(3, 3);
    t.Xprime = t.V;
    CHECK_THROWS_AS(curve_probe(d, x, t, {1e-3}), Error);
  }
}

TEST_SUITE_END();
