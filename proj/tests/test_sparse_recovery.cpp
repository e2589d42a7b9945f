#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spfbd/sparse_recovery.hpp"
#include "spfbd/signal_model.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace spfbd;
using namespace spfbd::test;

TEST_CASE("hard threshold: fixed point, magnitude order, exhaustive oracle") {
  CVec sparse = CVec::Zero(10);
  sparse[2] = Cplx(1.0, -2.0);
  sparse[7] = 0.5;
  const SparseVec kept = hard_threshold(sparse, 4);
  CHECK((kept.densify() - sparse).norm() == 0.0);

  CVec x(4);
  x << Cplx(3, 0), Cplx(-1, 0), Cplx(0, 2), Cplx(0.5, 0);
  const SparseVec top2 = hard_threshold(x, 2);
  CHECK(top2.support == std::vector<int>{0, 2});

  // projection property against exhaustive support enumeration
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const CVec y = random_cvec(rng, 10);
    const SparseVec proj = hard_threshold(y, 4);
    const double got = (y - proj.densify()).squaredNorm();
    double best = 1e300;
    for (const auto& supp : all_subsets(10, 4)) {
      // optimal values on a fixed support copy y there
      double dist = y.squaredNorm();
      for (int i : supp) dist -= std::norm(y[i]);
      best = std::min(best, dist);
    }
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("least squares on support") {
  const int n = 8;
  DenseMap ident(CMat::Identity(n, n));
  CVec b = CVec::Zero(n);
  b[1] = Cplx(2, 1);
  b[5] = -3.0;
  const LsqResult copy = least_squares_on_support(ident, b, {1, 5});
  CHECK((copy.solution.densify() - b).norm() <= 1e-14 * b.norm());
  CHECK(copy.residual_norm <= 1e-12 * b.norm());
  CHECK_FALSE(copy.rank_deficient);

  Rng rng(6);
  const CMat a = random_cmat(rng, 20, 8);
  DenseMap map(a);
  std::vector<int> support = {0, 1, 2, 3, 4, 5, 6, 7};

  // consistent rhs
  const CVec z0 = random_cvec(rng, 8);
  const LsqResult fit = least_squares_on_support(map, a * z0, support);
  CHECK(fit.residual_norm <= 1e-10 * (a * z0).norm());

  // random rhs against the normal-equations oracle
  const CVec rhs = random_cvec(rng, 20);
  const LsqResult ls = least_squares_on_support(map, rhs, support);
  const CVec oracle = (a.adjoint() * a).ldlt().solve(a.adjoint() * rhs);
  CHECK((ls.solution.densify() - oracle).norm() <= 1e-8 * oracle.norm());

  // residual orthogonal to every restricted column
  const CVec resid = rhs - a * ls.solution.densify();
  for (int j = 0; j < 8; ++j)
    CHECK(std::abs(a.col(j).dot(resid)) <= 1e-10 * rhs.norm());

  // duplicated column: rank deficient, minimum-norm solution flagged
  CMat dup = a;
  dup.col(1) = dup.col(0);
  DenseMap dmap(dup);
  const LsqResult mn = least_squares_on_support(dmap, rhs, support);
  CHECK(mn.rank_deficient);
  const CVec resid2 = rhs - dup * mn.solution.densify();
  for (int j = 0; j < 8; ++j)
    CHECK(std::abs(dup.col(j).dot(resid2)) <= 1e-8 * rhs.norm());
}

TEST_CASE("htp on the identity recovers the target in one iteration") {
  const int n = 12;
  Rng rng(9);
  const CVec b = random_cvec(rng, n);
  DenseMap ident(CMat::Identity(n, n));
  const HtpResult r = htp(ident, b, n);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK((r.solution.densify() - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("htp recovers 3-sparse signals from 64x256 real Gaussian systems") {
  const int m = 64, n = 256, s = 3;
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(derive_seed(202, {static_cast<std::uint64_t>(trial)}));
    CMat a(m, n);
    const double sc = 1.0 / std::sqrt(double(m));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) a(i, j) = Cplx(sc * rng.normal(), 0.0);
    const SparseVec xs = gen_sparse_signal(n, s, SparseDist::gauss(),
                                           Field::Real, 9000 + trial);
    const CVec x = xs.densify() / xs.norm();
    DenseMap map(a);
    const HtpResult r = htp(map, a * x, s);
    if ((r.solution.densify() - x).norm() <= 1e-8) ++exact;
  }
  CHECK(exact >= 95);
}

TEST_CASE("htp is stable under 1% measurement noise") {
  const int m = 64, n = 256, s = 3;
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(derive_seed(404, {static_cast<std::uint64_t>(trial)}));
    CMat a(m, n);
    const double sc = 1.0 / std::sqrt(double(m));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) a(i, j) = Cplx(sc * rng.normal(), 0.0);
    const SparseVec xs = gen_sparse_signal(n, s, SparseDist::gauss(),
                                           Field::Real, 5000 + trial);
    const CVec x = xs.densify() / xs.norm();
    const CVec clean = a * x;
    CVec z = random_rvec_as_cvec(rng, m);
    z *= 0.01 * clean.norm() / z.norm();
    DenseMap map(a);
    const HtpResult r = htp(map, clean + z, s);
    if ((r.solution.densify() - x).norm() <= 5.0 * z.norm()) ++good;
  }
  CHECK(good >= 90);
}

TEST_CASE("htp halts on support repetition with zero tolerance") {
  const int m = 32, n = 64, s = 2;
  Rng rng(31);
  CMat a(m, n);
  const double sc = 1.0 / std::sqrt(double(m));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = Cplx(sc * rng.normal(), 0.0);
  const SparseVec xs = gen_sparse_signal(n, s, SparseDist::gauss(), Field::Real, 3);
  DenseMap map(a);
  CVec noisy = a * xs.densify();
  noisy[0] += 0.05 * noisy.norm();  // keep the residual away from zero
  HtpOptions opts;
  opts.rel_change_tol = 1e-300;  // force the support-repeat exit
  const HtpResult r = htp(map, noisy, s, opts);
  CHECK(r.converged);
  CHECK(r.iterations < opts.max_iters);
}

TEST_CASE("htp reports divergence on overflow") {
  const int n = 8;
  Rng rng(64);
  DenseMap map(random_cmat(rng, n, n));
  HtpOptions opts;
  opts.step_size = 1e200;
  const CVec b = 1e200 * random_cvec(rng, n);
  CHECK_THROWS_AS(htp(map, b, 2, opts), std::runtime_error);
}

TEST_CASE("htp on zero measurements returns the zero vector") {
  DenseMap ident(CMat::Identity(6, 6));
  const HtpResult r = htp(ident, CVec::Zero(6), 3);
  CHECK(r.converged);
  CHECK(r.solution.nnz() == 0);
  CHECK(r.final_residual_norm == 0.0);
}
