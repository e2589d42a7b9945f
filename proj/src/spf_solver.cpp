#include "spfbd/spf_solver.hpp"

#include "spfbd/fft.hpp"
#include "spfbd/signal_model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spfbd {

RVec row_sparse_norms(const CMat& m, int s0) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  if (s0 < 1) throw std::invalid_argument("row_sparse_norms: s0 >= 1");
  RVec out(rows);
  std::vector<double> buf(cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) buf[j] = std::norm(m(i, j));
    double acc = 0.0;
    if (s0 >= cols) {
      acc = std::accumulate(buf.begin(), buf.end(), 0.0);
    } else {
      std::nth_element(buf.begin(), buf.begin() + s0 - 1, buf.end(),
                       std::greater<double>());
      acc = std::accumulate(buf.begin(), buf.begin() + s0, 0.0);
    }
    out[i] = std::sqrt(acc);
  }
  return out;
}

namespace {

// indices of the s largest entries, ties toward the lowest index, sorted
std::vector<int> top_indices(const RVec& score, int s) {
  const int n = static_cast<int>(score.size());
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  const int k = std::min(s, n);
  std::partial_sort(ord.begin(), ord.begin() + k, ord.end(), [&](int a, int b) {
    return score[a] != score[b] ? score[a] > score[b] : a < b;
  });
  ord.resize(k);
  std::sort(ord.begin(), ord.end());
  return ord;
}

CMat submatrix(const CMat& m, const std::vector<int>& rows,
               const std::vector<int>& cols) {
  CMat out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = m(rows[i], cols[j]);
  return out;
}

// column l2 norms of M restricted to the given rows
RVec restricted_column_norms(const CMat& m, const std::vector<int>& rows) {
  RVec out = RVec::Zero(m.cols());
  for (int i : rows)
    for (int j = 0; j < m.cols(); ++j) out[j] += std::norm(m(i, j));
  return out.cwiseSqrt();
}

bool growth_condition(const CMat& fpsi, const std::vector<int>& j2, int s0,
                      double mu2, int n) {
  CMat block(fpsi.rows(), j2.size());
  for (std::size_t j = 0; j < j2.size(); ++j) block.col(j) = fpsi.col(j2[j]);
  const double max_abs = block.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<CMat> svd(block);
  const double sigma_min = svd.singularValues().minCoeff();
  return max_abs * std::sqrt(static_cast<double>(s0)) <=
         std::sqrt(mu2 / static_cast<double>(n)) * sigma_min;
}

// top right singular vector of a small block by power iteration on B*B,
// deterministic all-ones start
CVec top_right_singular_vector(const CMat& b, bool* degenerate) {
  const int k = static_cast<int>(b.cols());
  CVec w = CVec::Constant(k, Cplx(1.0 / std::sqrt(static_cast<double>(k)), 0.0));
  if (b.squaredNorm() == 0.0) {
    *degenerate = true;
    return w;
  }
  *degenerate = false;
  for (int it = 0; it < 2000; ++it) {
    CVec w2 = b.adjoint() * (b * w);
    const double nrm = w2.norm();
    if (nrm == 0.0) {  // start vector annihilated; reseed off the kernel
      w[it % k] += 1.0;
      w /= w.norm();
      continue;
    }
    w2 /= nrm;
    const double delta = (w2 - w).norm();
    w = std::move(w2);
    if (delta < 1e-10) break;
  }
  return w;
}

}  // namespace

InitResult thres_init(const CMat& m, const Dictionary& psi, int s1, int s2,
                      FlatnessLevel mu2) {
  const int n = psi.n;
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("thres_init: dimension mismatch");
  if (s1 < 1 || s1 > n || s2 < 1 || s2 > n)
    throw std::invalid_argument("thres_init: bad sparsity levels");
  const double mu2_v = mu2.value(n);
  const CMat fpsi = unitary_dft_columns(psi.entries);

  int s0 = 1;
  std::vector<int> j1 = top_indices(row_sparse_norms(m, 1), s1);
  std::vector<int> j2 = top_indices(restricted_column_norms(m, j1), 1);

  while (s0 <= s2 && growth_condition(fpsi, j2, s0, mu2_v, n)) {
    ++s0;
    j1 = top_indices(row_sparse_norms(m, s0), s1);
    j2 = top_indices(restricted_column_norms(m, j1), s0);
  }
  s0 = std::max(1, s0 - 1);
  j1 = top_indices(row_sparse_norms(m, s0), s1);
  j2 = top_indices(restricted_column_norms(m, j1), s0);

  InitResult res;
  res.s0 = s0;
  res.j1 = j1;
  res.j2 = j2;
  res.feasibility_certified = growth_condition(fpsi, j2, s0, mu2_v, n);

  const CMat block = submatrix(m, j1, j2);
  const CVec w = top_right_singular_vector(block, &res.degenerate);
  CVec v0 = CVec::Zero(n);
  // the factorization convention is u v^T, so the right factor spans the row
  // space of the transpose: the conjugate of the standard right singular
  // vector
  for (std::size_t j = 0; j < j2.size(); ++j) v0[j2[j]] = std::conj(w[j]);
  v0 /= v0.norm();
  res.v0 = SparseVec::sparsify(v0, s2);
  return res;
}

namespace {

double rank_one_norm(const CVec& u, const CVec& v) { return u.norm() * v.norm(); }

SparseVec apply_projection(const CVec& tilde, const SparseVec& plain,
                           const Dictionary& dict, int s, FlatnessLevel mu,
                           ProjectionMode mode, const AltProjOptions& ap,
                           const HtpOptions& ho) {
  switch (mode) {
    case ProjectionMode::None:
      return plain;
    case ProjectionMode::Approx:
      return approx_project_intersection(tilde, dict, s, mu, ap, ho).coeffs;
    case ProjectionMode::ExactUnavailable:
    default:
      throw std::invalid_argument(
          "spf_bd: exact intersection projection is unavailable");
  }
}

}  // namespace

SolveResult spf_bd(const MeasOperator& op, const CVec& b,
                   const ModelParams& params, const SolverOptions& opts,
                   const Reference* ref) {
  if (b.size() != op.m) throw std::invalid_argument("spf_bd: rhs length mismatch");
  if (params.n != op.n || params.m != op.m)
    throw std::invalid_argument("spf_bd: parameter dimensions mismatch");
  if (params.s1 < 1 || params.s1 > op.n || params.s2 < 1 || params.s2 > op.n)
    throw std::invalid_argument("spf_bd: bad sparsity levels");
  if (opts.projection_mode == ProjectionMode::ExactUnavailable)
    throw std::invalid_argument("spf_bd: exact intersection projection is unavailable");

  SolveResult out;
  out.init = thres_init(adjoint(op, b), op.psi, params.s1, params.s2, params.mu2);
  if (ref) out.trace.init_angle_sin = angle_metrics(out.init.v0.densify(), ref->v).sin;

  constexpr double kTiny = 1e-300;
  SparseVec u_s, v_s = out.init.v0;
  CVec u, v = v_s.densify();
  CVec u_prev, v_prev;
  bool have_prev = false;

  for (int t = 1; t <= opts.max_outer_iters; ++t) {
    out.trace.outer_iters = t;

    const double vn = v.norm();
    if (vn < kTiny) throw std::runtime_error("spf_bd: degenerate iterate");
    v /= vn;

    const auto right = restricted_right(op, v);
    const HtpResult hu = htp(*right, b, params.s1, opts.htp_opts);
    u_s = apply_projection(hu.solution.densify(), hu.solution, op.phi,
                           params.s1, params.mu1, opts.projection_mode,
                           opts.alt_proj_opts, opts.htp_opts);
    u = u_s.densify();
    const double un = u.norm();
    if (un < kTiny) throw std::runtime_error("spf_bd: degenerate iterate");
    u /= un;
    u_s = SparseVec::sparsify(u, params.s1);

    const auto left = restricted_left(op, u);
    const HtpResult hv = htp(*left, b, params.s2, opts.htp_opts);
    v_s = apply_projection(hv.solution.densify(), hv.solution, op.psi,
                           params.s2, params.mu2, opts.projection_mode,
                           opts.alt_proj_opts, opts.htp_opts);
    v = v_s.densify();

    if (opts.record_trace) {
      out.trace.residual_norms.push_back((b - forward(op, u, v)).norm());
      out.trace.htp_iters_u.push_back(hu.iterations);
      out.trace.htp_iters_v.push_back(hv.iterations);
      out.trace.sf_u.push_back(
          u.squaredNorm() > 0 ? spectral_flatness(op.phi.entries * u) : 0.0);
      out.trace.sf_v.push_back(
          v.squaredNorm() > 0 ? spectral_flatness(op.psi.entries * v) : 0.0);
      if (ref) {
        out.trace.angle_sin_u.push_back(angle_metrics(u, ref->u).sin);
        out.trace.angle_sin_v.push_back(
            v.squaredNorm() > 0 ? angle_metrics(v, ref->v).sin : 1.0);
      }
    }

    if (have_prev) {
      const double change = rank_one_distance(u, v, u_prev, v_prev);
      const double base = rank_one_norm(u_prev, v_prev);
      if (base > 0.0 && change < opts.rel_change_tol * base) {
        out.trace.converged = true;
        break;
      }
    }
    u_prev = u;
    v_prev = v;
    have_prev = true;
  }

  out.estimate.u = u_s;
  out.estimate.v = v_s;
  return out;
}

double htp_constant(double delta) {
  if (!(delta >= 0.0) || !(1.0 - delta * delta > 2.0 * delta * delta))
    throw std::domain_error("htp_constant: denominator nonpositive");
  const double num = std::sqrt(2.0 * (1.0 - delta)) + std::sqrt(1.0 + delta);
  const double den = std::sqrt(1.0 - delta) *
                     (std::sqrt(1.0 - delta * delta) -
                      std::sqrt(2.0 * delta * delta));
  return num / den;
}

double contraction_factor(double delta) {
  return 2.0 * delta * htp_constant(delta) *
         std::sqrt((1.0 + delta) / (1.0 - delta));
}

AngleMetrics angle_metrics(const CVec& a, const CVec& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("angle_metrics: zero vector");
  AngleMetrics m;
  m.cos = std::min(1.0, std::abs(a.dot(b)) / (na * nb));
  m.sin = std::sqrt(std::max(0.0, 1.0 - m.cos * m.cos));
  m.tan = m.sin / m.cos;  // +inf for orthogonal spans
  return m;
}

double rank_one_distance(const CVec& u1, const CVec& v1, const CVec& u2,
                         const CVec& v2) {
  if (u1.size() == 1 && v1.size() == 1)
    return std::abs(u1[0] * v1[0] - u2[0] * v2[0]);
  // u1 v1^T - u2 v2^T = [u1 u2] diag(1,-1) [v1 v2]^T; reduce both column
  // pairs by QR and take the Frobenius norm of the 2x2 core
  CMat us(u1.size(), 2), vs(v1.size(), 2);
  us.col(0) = u1;
  us.col(1) = u2;
  vs.col(0) = v1;
  vs.col(1) = v2;
  CMat ru = Eigen::HouseholderQR<CMat>(us)
                .matrixQR()
                .topRows(2)
                .triangularView<Eigen::Upper>();
  const CMat rv = Eigen::HouseholderQR<CMat>(vs)
                      .matrixQR()
                      .topRows(2)
                      .triangularView<Eigen::Upper>();
  ru.col(1) *= -1.0;  // the diag(1,-1) in the middle
  return (ru * rv.transpose()).norm();
}

}  // namespace spfbd
