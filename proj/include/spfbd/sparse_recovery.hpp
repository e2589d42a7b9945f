#pragma once

#include "spfbd/conv_operator.hpp"
#include "spfbd/types.hpp"

#include <vector>

namespace spfbd {

struct HtpOptions {
  double step_size = 1.0;
  double rel_change_tol = 1e-6;
  int max_iters = 100;
};

struct HtpResult {
  SparseVec solution;
  int iterations = 0;
  bool converged = false;
  double final_residual_norm = 0.0;
};

// Euclidean projection onto the s-sparse set: keeps the s largest-modulus
// entries, ties broken toward the lowest index.
SparseVec hard_threshold(const CVec& x, int s);

struct LsqResult {
  SparseVec solution;
  bool rank_deficient = false;  // minimum-norm solution returned in that case
  double residual_norm = 0.0;
};

// argmin ||b - A x|| over supp(x) in `support`, via a complete orthogonal
// decomposition of the restricted columns.
LsqResult least_squares_on_support(const LinearMap& map, const CVec& b,
                                   const std::vector<int>& support);

// Hard-thresholding pursuit from the zero initial point: gradient step, keep
// the top-s support, exact least squares on it. Stops on support repetition,
// relative iterate change below tol, an exact fit, or the iteration cap.
HtpResult htp(const LinearMap& map, const CVec& b, int s,
              const HtpOptions& opts = {});

}  // namespace spfbd
