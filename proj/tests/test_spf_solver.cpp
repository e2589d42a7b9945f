#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spfbd/fft.hpp"
#include "spfbd/signal_model.hpp"
#include "spfbd/spf_solver.hpp"
#include "test_support.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace spfbd;
using namespace spfbd::test;

namespace {

MeasOperator synth_operator(int n, std::uint64_t seed, Field field) {
  return make_meas_operator(gen_dictionary(n, field, derive_seed(seed, {1})),
                            gen_dictionary(n, field, derive_seed(seed, {2})),
                            SamplingPattern::full(n));
}

}  // namespace

TEST_CASE("row sparse norms") {
  Rng rng(1);
  const CMat m = random_cmat(rng, 6, 6);

  const RVec full = row_sparse_norms(m, 6);
  const RVec linf = row_sparse_norms(m, 1);
  for (int i = 0; i < 6; ++i) {
    CHECK(full[i] == doctest::Approx(m.row(i).norm()).epsilon(1e-12));
    CHECK(linf[i] ==
          doctest::Approx(m.row(i).cwiseAbs().maxCoeff()).epsilon(1e-12));
  }

  const RVec two = row_sparse_norms(m, 2);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> mags(6);
    for (int j = 0; j < 6; ++j) mags[j] = std::norm(m(i, j));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    CHECK(two[i] == doctest::Approx(std::sqrt(mags[0] + mags[1])).epsilon(1e-12));
  }
}

TEST_CASE("theory constants against high-precision references") {
  // reference values evaluated from the closed form at 30 significant digits
  CHECK(std::abs(htp_constant(0.0) - (std::sqrt(2.0) + 1.0)) <= 1e-15);
  CHECK(std::abs(htp_constant(0.02) - 2.50579337181218575910569625223) <= 1e-12);
  CHECK(std::abs(contraction_factor(0.02) - 0.102256822980078783907253333825) <= 1e-12);
  CHECK(contraction_factor(0.0) == 0.0);
  CHECK(contraction_factor(0.02) < 1.0);

  CHECK_THROWS_WITH_AS(htp_constant(1.0 / std::sqrt(3.0)),
                       "htp_constant: denominator nonpositive",
                       std::domain_error);
  CHECK_THROWS_AS(htp_constant(-0.1), std::domain_error);
  CHECK_THROWS_AS(contraction_factor(0.9), std::domain_error);

  // both quantities increase monotonically toward the pole
  double prev_c = 0.0, prev_f = -1.0;
  for (double d = 0.0; d <= 0.30001; d += 0.01) {
    const double c = htp_constant(d);
    const double f = contraction_factor(d);
    CHECK(c > prev_c);
    CHECK(f > prev_f);
    prev_c = c;
    prev_f = f;
  }
  CHECK(htp_constant(0.577) > 1e3);  // diverges approaching 1/sqrt(3)
}

TEST_CASE("angle metrics") {
  Rng rng(2);
  const int n = 16;
  const CVec a = random_cvec(rng, n);
  const AngleMetrics same = angle_metrics(a, Cplx(0.3, -2.0) * a);
  CHECK(same.sin <= 1e-12);
  CHECK(same.cos == doctest::Approx(1.0).epsilon(1e-12));

  CVec e0 = CVec::Zero(n), e1 = CVec::Zero(n);
  e0[0] = 1.0;
  e1[1] = Cplx(0, 2);
  const AngleMetrics orth = angle_metrics(e0, e1);
  CHECK(orth.sin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(orth.cos <= 1e-12);

  // dense projector oracle: sin = ||(I - P_a) P_b||
  for (int rep = 0; rep < 10; ++rep) {
    const CVec x = random_cvec(rng, n);
    const CVec y = random_cvec(rng, n);
    const CMat pa = x * x.adjoint() / x.squaredNorm();
    const CMat pb = y * y.adjoint() / y.squaredNorm();
    const CMat gap = (CMat::Identity(n, n) - pa) * pb;
    Eigen::JacobiSVD<CMat> svd(gap);
    CHECK(angle_metrics(x, y).sin ==
          doctest::Approx(svd.singularValues()[0]).epsilon(1e-10));
  }

  CHECK_THROWS_AS(angle_metrics(CVec::Zero(4), e0.head(4).eval()),
                  std::invalid_argument);
}

TEST_CASE("rank-one distance matches the dense computation") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 12;
    const CVec u1 = random_cvec(rng, n), v1 = random_cvec(rng, n);
    const CVec u2 = random_cvec(rng, n), v2 = random_cvec(rng, n);
    const double dense =
        (u1 * v1.transpose() - u2 * v2.transpose()).norm();
    CHECK(rank_one_distance(u1, v1, u2, v2) ==
          doctest::Approx(dense).epsilon(1e-10));
  }
  const CVec u = random_cvec(rng, 8), v = random_cvec(rng, 8);
  CHECK(rank_one_distance(u, v, u, v) <= 1e-13 * u.norm() * v.norm());
}

TEST_CASE("thres_init on an exact rank-one input recovers the right factor") {
  Rng rng(4);
  const int n = 32;
  for (int rep = 0; rep < 10; ++rep) {
    const SparseVec u = gen_sparse_signal(n, 3, SparseDist::peaked(0.8),
                                          Field::Complex, 40 + rep);
    const SparseVec v = gen_sparse_signal(n, 4, SparseDist::gauss(),
                                          Field::Complex, 80 + rep);
    const CMat m = u.densify() * v.densify().transpose();
    const Dictionary psi = gen_dictionary(n, Field::Complex, 120 + rep);
    const InitResult init = thres_init(m, psi, 3, 4, FlatnessLevel::inactive());

    // rows of u v^T scale with |u_i|, so j1 must cover supp(u)
    for (int i : u.support)
      CHECK(std::find(init.j1.begin(), init.j1.end(), i) != init.j1.end());
    // the rank-one block SVD is exact up to phase when j2 = supp(v)
    if (init.s0 == v.nnz())
      CHECK(angle_metrics(init.v0.densify(), v.densify()).sin <= 1e-8);
  }
}

TEST_CASE("thres_init on the zero matrix flags degeneracy") {
  const Dictionary psi = gen_dictionary(16, Field::Complex, 5);
  const InitResult init =
      thres_init(CMat::Zero(16, 16), psi, 2, 3, FlatnessLevel::inactive());
  CHECK(init.degenerate);
  CHECK(init.v0.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(init.v0.nnz() >= 1);
}

TEST_CASE("certified inits satisfy the flatness containment they promise") {
  int certified = 0;
  for (int rep = 0; rep < 15; ++rep) {
    const int n = 64;
    const MeasOperator op = synth_operator(n, 700 + rep, Field::Real);
    const SparseVec u = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, rep);
    const SparseVec v = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 99 + rep);
    const CVec b = forward(op, u, v);
    const FlatnessLevel mu2 = FlatnessLevel::at(std::ceil(5.0 * std::log(n)));
    const InitResult init = thres_init(adjoint(op, b), op.psi, 2, 2, mu2);
    if (!init.feasibility_certified) continue;
    ++certified;
    CHECK(spectral_flatness(op.psi.entries * init.v0.densify()) <=
          mu2.value(n) * (1.0 + 1e-9));
  }
  CHECK(certified > 0);
}

TEST_CASE("spf_bd solves easy noiseless instances to high fidelity") {
  int good = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 64;
    const MeasOperator op = synth_operator(n, 3000 + trial, Field::Real);
    const SparseVec u = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, trial);
    const SparseVec v = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 50 + trial);
    const CVec b = forward(op, u, v);
    ModelParams params;
    params.n = n;
    params.m = n;
    params.s1 = params.s2 = 2;
    params.mu1 = params.mu2 = FlatnessLevel::at(std::ceil(5.0 * std::log(n)));
    const SolveResult res = spf_bd(op, b, params);
    const double dist = rank_one_distance(
        res.estimate.u.densify(), res.estimate.v.densify(), u.densify(), v.densify());
    if (dist <= 1e-3 * u.norm() * v.norm()) ++good;  // 60 dB
    CHECK(res.estimate.u.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.estimate.u.nnz() <= 2);
    CHECK(res.estimate.v.nnz() <= 2);
  }
  CHECK(good >= 8);
}

TEST_CASE("scale ambiguity: rescaled factor pairs give the same estimate") {
  const int n = 48;
  const MeasOperator op = synth_operator(n, 42, Field::Real);
  const SparseVec u = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 1);
  const SparseVec v = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 2);
  ModelParams params;
  params.n = params.m = n;
  params.s1 = params.s2 = 2;
  params.mu1 = params.mu2 = FlatnessLevel::at(std::ceil(5.0 * std::log(n)));

  const double alpha = 3.5;
  const CVec b1 = forward(op, u.densify(), v.densify());
  const CVec b2 = forward(op, (alpha * u.densify()).eval(),
                          (v.densify() / alpha).eval());
  const SolveResult r1 = spf_bd(op, b1, params);
  const SolveResult r2 = spf_bd(op, b2, params);
  const double dist = rank_one_distance(
      r1.estimate.u.densify(), r1.estimate.v.densify(),
      r2.estimate.u.densify(), r2.estimate.v.densify());
  CHECK(dist <= 1e-8 * u.norm() * v.norm());
}

TEST_CASE("spf_bd rejects zero measurements as degenerate") {
  const int n = 32;
  const MeasOperator op = synth_operator(n, 9, Field::Real);
  ModelParams params;
  params.n = params.m = n;
  params.s1 = params.s2 = 2;
  params.mu1 = params.mu2 = FlatnessLevel::inactive();
  CHECK_THROWS_AS(spf_bd(op, CVec::Zero(n), params), std::runtime_error);
}

TEST_CASE("exact projection mode is reported unavailable") {
  const int n = 16;
  const MeasOperator op = synth_operator(n, 10, Field::Real);
  ModelParams params;
  params.n = params.m = n;
  params.s1 = params.s2 = 2;
  SolverOptions opts;
  opts.projection_mode = ProjectionMode::ExactUnavailable;
  CHECK_THROWS_AS(spf_bd(op, CVec::Ones(n), params, opts), std::invalid_argument);
}

TEST_CASE("trace shows settled residuals and geometric angle decay") {
  const int n = 64;
  const MeasOperator op = synth_operator(n, 77, Field::Real);
  const SparseVec u = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 7);
  const SparseVec v = gen_sparse_signal(n, 2, SparseDist::gauss(), Field::Real, 8);
  const CVec b = forward(op, u, v);
  ModelParams params;
  params.n = params.m = n;
  params.s1 = params.s2 = 2;
  params.mu1 = params.mu2 = FlatnessLevel::at(std::ceil(5.0 * std::log(n)));
  SolverOptions opts;
  opts.record_trace = true;
  const Reference ref{u.densify(), v.densify()};
  const SolveResult res = spf_bd(op, b, params, opts, &ref);
  REQUIRE(res.trace.converged);
  REQUIRE(res.trace.residual_norms.size() >= 2);

  // residual is nonincreasing over the settled tail
  const auto& rn = res.trace.residual_norms;
  const std::size_t tail = rn.size() >= 5 ? rn.size() - 5 : 0;
  for (std::size_t t = tail; t + 1 < rn.size(); ++t)
    CHECK(rn[t + 1] <= rn[t] + 1e-9 * (1.0 + rn[t]));

  // once below 0.5 and above the sin-resolution floor (~sqrt(eps)), the
  // angle to the truth contracts by at least 0.9 per iteration
  const auto& ang = res.trace.angle_sin_v;
  for (std::size_t t = 0; t + 1 < ang.size(); ++t) {
    if (ang[t] < 0.5 && ang[t + 1] > 1e-7)
      CHECK(ang[t + 1] <= 0.9 * ang[t] + 1e-12);
  }
  CHECK(res.trace.init_angle_sin >= 0.0);
  CHECK(res.trace.htp_iters_u.size() == rn.size());
}
