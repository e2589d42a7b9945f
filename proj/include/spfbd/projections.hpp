#pragma once

#include "spfbd/sparse_recovery.hpp"
#include "spfbd/types.hpp"

#include <string>

namespace spfbd {

struct ConeProjResult {
  CVec projected;
  int k_star = 1;          // smallest k splitting capped and rescaled bins
  bool was_member = false; // input already satisfied sf(x) <= mu
};

// Exact Euclidean projection onto C_mu. In the Fourier domain the largest
// k-1 magnitudes are capped at sqrt(mu) and the tail is rescaled so the
// squared magnitudes sum to n; the result is the rank-one projection of the
// spectrum onto that profile. Inputs whose spectrum has fewer nonzero bins
// than the cap budget needs get the leftover budget spread evenly over the
// zero bins, which attains the same optimal distance.
ConeProjResult project_flatness_cone(const CVec& x, FlatnessLevel mu);

// Checks the stationarity conditions of the projection: phases of the output
// spectrum match the input, capped bins sit exactly at sqrt(mu) and only
// where the common tail scaling would push them past the cap, uncapped bins
// share one tail scaling, and the normalized squared magnitudes sum to n.
bool verify_cone_projection_kkt(const CVec& x, const ConeProjResult& result,
                                FlatnessLevel mu,
                                std::string* diagnostic = nullptr);

// P_{Phi Gamma_s}: sparse-approximates x over the dictionary with HTP and
// returns the image Phi u_hat.
CVec project_dict_sparse(const CVec& x, const Dictionary& phi, int s,
                         const HtpOptions& opts = {});

struct AltProjOptions {
  int max_rounds = 50;
  double rel_change_tol = 1e-6;
};

struct ApproxProjResult {
  SparseVec coeffs;      // exactly s-sparse (the last step is P_{Phi Gamma_s})
  bool in_cone = false;  // whether sf(Phi coeffs) <= mu held at return
  double sf_value = 0.0; // sf(Phi coeffs), 0 for the zero vector
  int rounds = 0;        // alternating rounds run; 0 means the fast path
};

// Alternating projections between C_mu and Phi Gamma_s starting from
// Phi u_tilde; returns immediately when u_tilde is already feasible.
// Cone membership of the result is reported, not guaranteed.
ApproxProjResult approx_project_intersection(const CVec& u_tilde,
                                             const Dictionary& phi, int s,
                                             FlatnessLevel mu,
                                             const AltProjOptions& opts = {},
                                             const HtpOptions& htp_opts = {});

}  // namespace spfbd
