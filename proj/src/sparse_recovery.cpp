#include "spfbd/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spfbd {

SparseVec hard_threshold(const CVec& x, int s) {
  const int n = static_cast<int>(x.size());
  if (s < 1 || s > n) throw std::invalid_argument("hard_threshold: bad s");
  const RVec a2 = x.cwiseAbs2();
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::partial_sort(ord.begin(), ord.begin() + s, ord.end(), [&](int a, int b) {
    return a2[a] != a2[b] ? a2[a] > a2[b] : a < b;
  });
  std::vector<int> keep(ord.begin(), ord.begin() + s);
  std::sort(keep.begin(), keep.end());
  SparseVec out;
  out.n = n;
  out.budget = s;
  for (int i : keep) {
    if (x[i] != Cplx(0.0, 0.0)) {
      out.support.push_back(i);
      out.values.push_back(x[i]);
    }
  }
  return out;
}

LsqResult least_squares_on_support(const LinearMap& map, const CVec& b,
                                   const std::vector<int>& support) {
  const int m = map.rows();
  const int n = map.cols();
  const int k = static_cast<int>(support.size());
  if (b.size() != m)
    throw std::invalid_argument("least_squares_on_support: rhs length mismatch");
  if (k > m)
    throw std::invalid_argument("least_squares_on_support: support larger than output dim");

  LsqResult res;
  res.solution.n = n;
  res.solution.budget = std::max(1, k);
  if (k == 0) {
    res.residual_norm = b.norm();
    return res;
  }

  CMat cols(m, k);
  CVec e = CVec::Zero(n);
  for (int j = 0; j < k; ++j) {
    e[support[j]] = 1.0;
    cols.col(j) = map.apply(e);
    e[support[j]] = 0.0;
  }

  Eigen::CompleteOrthogonalDecomposition<CMat> cod(cols);
  const CVec z = cod.solve(b);
  res.rank_deficient = cod.rank() < k;
  res.residual_norm = (b - cols * z).norm();
  for (int j = 0; j < k; ++j) {
    if (z[j] != Cplx(0.0, 0.0)) {
      res.solution.support.push_back(support[j]);
      res.solution.values.push_back(z[j]);
    }
  }
  return res;
}

HtpResult htp(const LinearMap& map, const CVec& b, int s,
              const HtpOptions& opts) {
  const int n = map.cols();
  if (s < 1 || s > n) throw std::invalid_argument("htp: bad sparsity level");
  if (b.size() != map.rows())
    throw std::invalid_argument("htp: rhs length mismatch");
  if (!(opts.step_size > 0.0) || opts.max_iters < 1 || !(opts.rel_change_tol > 0.0))
    throw std::invalid_argument("htp: bad options");

  const double bnorm = b.norm();
  HtpResult res;
  res.solution.n = n;
  res.solution.budget = s;

  CVec x = CVec::Zero(n);
  std::vector<int> prev_support;
  LsqResult lsq;
  for (int t = 1; t <= opts.max_iters; ++t) {
    const CVec w = x + opts.step_size * map.apply_adjoint(b - map.apply(x));
    if (!w.allFinite())
      throw std::runtime_error("htp: divergence (non-finite iterate; step size too large?)");
    const std::vector<int> support = hard_threshold(w, s).support;
    lsq = least_squares_on_support(map, b, support);
    const CVec x_new = lsq.solution.densify();
    if (!x_new.allFinite())
      throw std::runtime_error("htp: divergence (non-finite iterate; step size too large?)");
    res.iterations = t;

    if (support == prev_support) {  // exact fixed point of the iteration
      x = x_new;
      res.converged = true;
      break;
    }
    const double xnorm = x.norm();
    const double change = (x_new - x).norm();
    x = x_new;
    prev_support = support;
    if (lsq.residual_norm <= 1e-13 * std::max(bnorm, 1e-300)) {
      res.converged = true;  // exact fit, nothing left to improve
      break;
    }
    if (xnorm > 0.0 && change < opts.rel_change_tol * xnorm) {
      res.converged = true;
      break;
    }
  }

  res.solution = SparseVec::sparsify(x, s);
  res.final_residual_norm = lsq.residual_norm;
  return res;
}

}  // namespace spfbd
