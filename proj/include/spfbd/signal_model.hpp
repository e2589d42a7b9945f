#pragma once

#include "spfbd/types.hpp"

#include <cstdint>
#include <vector>

namespace spfbd {

// sf(x) = n * ||Fx||_inf^2 / ||Fx||_2^2, always in [1, n].
double spectral_flatness(const CVec& x);

// Membership in C_mu = { x : sf(x) <= mu }; the zero vector is the cone apex.
bool in_flatness_cone(const CVec& x, FlatnessLevel mu);

// Complex mode: entries CN(0,1/n) (real/imag parts of variance 1/(2n)).
// Real mode: entries N(0,1/n). Deterministic given the seed.
Dictionary gen_dictionary(int n, Field field, std::uint64_t seed);

struct SparseDist {
  enum Kind { Gauss, Peaked };
  Kind kind = Gauss;
  double peak = 0.0;  // target c for ||u||_inf >= c ||u||_2, c in (0,1)

  static SparseDist gauss() { return {Gauss, 0.0}; }
  static SparseDist peaked(double c) { return {Peaked, c}; }
};

// Support uniform over size-s subsets; nonzeros standard normal (complex
// standard normal in complex mode). Peaked mode rescales one uniformly chosen
// support entry so the peakedness bound holds with equality.
SparseVec gen_sparse_signal(int n, int s, SparseDist dist, Field field,
                            std::uint64_t seed);

enum class FlatnessMode { FixedSignal, AdversarialSearch };

struct FlatnessSummary {
  double max_sf = 0.0;
  double mean_sf = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  std::vector<double> samples;  // one recorded value per trial
};

// FixedSignal: fresh dictionary and fresh s-sparse signal per trial, records
// sf(Phi u). AdversarialSearch: one dictionary per trial, maximizes sf(Phi u)
// over random s-sparse probes plus per-row alignment with sqrt(n) F Phi,
// recording the best lower bound found.
FlatnessSummary flatness_stats(int n, int s, int trials, FlatnessMode mode,
                               std::uint64_t seed);

}  // namespace spfbd
