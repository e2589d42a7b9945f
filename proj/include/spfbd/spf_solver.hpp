#pragma once

#include "spfbd/conv_operator.hpp"
#include "spfbd/projections.hpp"
#include "spfbd/types.hpp"

#include <vector>

namespace spfbd {

enum class ProjectionMode {
  ExactUnavailable,  // exact intersection projection is not implementable
  Approx,            // alternating projections (default)
  None,              // keep the plain sparse iterate
};

struct SolverOptions {
  int max_outer_iters = 50;
  double rel_change_tol = 1e-6;
  ProjectionMode projection_mode = ProjectionMode::Approx;
  HtpOptions htp_opts;
  AltProjOptions alt_proj_opts;
  bool record_trace = false;
};

// Factored estimate X_hat = u v^T with u of unit l2 norm; v carries the scale.
struct RankOneEstimate {
  SparseVec u;
  SparseVec v;
};

struct Reference {
  CVec u;
  CVec v;
};

struct SolveTrace {
  int outer_iters = 0;
  bool converged = false;
  double init_angle_sin = -1.0;  // vs the reference v, when one is supplied
  // per outer iteration, populated when record_trace is set
  std::vector<double> residual_norms;
  std::vector<double> sf_u, sf_v;
  std::vector<int> htp_iters_u, htp_iters_v;
  std::vector<double> angle_sin_u, angle_sin_v;  // when a reference is supplied
};

// zeta_k = l2 norm of the s0-sparse approximation of the k-th row.
RVec row_sparse_norms(const CMat& m, int s0);

struct InitResult {
  SparseVec v0;  // unit norm, supported on j2
  int s0 = 1;
  std::vector<int> j1, j2;
  // the support-growth inequality held at the returned (s0, j2); certifies
  // Psi v0 lies in C_{mu2}
  bool feasibility_certified = false;
  bool degenerate = false;  // the selected block of M vanished
};

// Thresholded initialization: grows s0 while the spectral feasibility
// inequality ||F Psi_J||_{1->inf} sqrt(s0) <= sqrt(mu2/n) sigma_min(F Psi_J)
// holds, backtracks one step, and returns the top right singular vector of
// the selected block of M.
InitResult thres_init(const CMat& m, const Dictionary& psi, int s1, int s2,
                      FlatnessLevel mu2);

struct SolveResult {
  RankOneEstimate estimate;
  SolveTrace trace;
  InitResult init;
};

// Alternating minimization: HTP on A_R(v) for u, project, normalize, HTP on
// A_L(u) for v, project; stops when the factored estimate stalls.
SolveResult spf_bd(const MeasOperator& op, const CVec& b,
                   const ModelParams& params, const SolverOptions& opts = {},
                   const Reference* ref = nullptr);

// (sqrt(2(1-d)) + sqrt(1+d)) / (sqrt(1-d) (sqrt(1-d^2) - sqrt(2 d^2))),
// defined for 0 <= d < 1/sqrt(3).
double htp_constant(double delta);

// 2 d C_d sqrt(1+d)/sqrt(1-d); below one exactly when the per-iteration
// angle recursion contracts.
double contraction_factor(double delta);

struct AngleMetrics {
  double sin = 0.0;
  double cos = 0.0;
  double tan = 0.0;
};

// Principal angle between the spans of two nonzero vectors.
AngleMetrics angle_metrics(const CVec& a, const CVec& b);

// || u1 v1^T - u2 v2^T ||_F computed in factored form (2x2 triangular
// factors; stable near exact equality).
double rank_one_distance(const CVec& u1, const CVec& v1, const CVec& u2,
                         const CVec& v2);

}  // namespace spfbd
