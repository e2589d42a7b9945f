#pragma once

#include "spfbd/conv_operator.hpp"
#include "spfbd/spf_solver.hpp"
#include "spfbd/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace spfbd {

struct SubsampleSpec {
  enum Kind { Full, Uniform, Random };
  Kind kind = Full;
  int factor = 2;  // Uniform only

  static SubsampleSpec parse(const std::string& text);
  std::string str() const;
};

struct MuPolicy {
  enum Kind { Default, None, Explicit };
  Kind kind = Default;
  double mu = 0.0;

  // Default: ceil(5 ln n); None: inactive (mu = n); Explicit: the given mu.
  FlatnessLevel level(int n) const;
  static MuPolicy parse_string(const std::string& text);
  std::string str() const;
};

struct ExperimentConfig {
  int n = 0;  // ambient length for subsample=random; derived from m otherwise
  std::vector<int> m_values;
  std::vector<int> s_values;     // exactly one of s_values / s_over_m
  std::vector<double> s_over_m;
  double noise_snr_db = std::numeric_limits<double>::infinity();
  SubsampleSpec subsample;
  Field dict_field = Field::Real;
  MuPolicy mu_policy;
  int trials_per_cell = 20;
  std::uint64_t base_seed = 0;
  // NaN means "derive from the noise level" (inf/40/20 dB -> 60/30/10 dB)
  double rsdr_success_threshold_db = std::numeric_limits<double>::quiet_NaN();

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;

  void validate() const;
  int cell_n(int m) const;      // ambient length for a cell
  std::vector<int> cell_s(int m) const;  // resolved sparsity levels
  double resolved_threshold() const;     // defaults keyed to the noise level
};

struct TrialResult {
  int m = 0, s = 0;
  std::uint64_t seed = 0;
  double rsdr_db = 0.0;
  double snr_db = 0.0;
  bool success = false;
  int outer_iters = 0;
  double wall_time_ms = 0.0;  // measurement only; excluded from determinism
  double init_angle_sin = -1.0;
  double peak_u = 0.0, peak_v = 0.0;  // ||.||_inf / ||.||_2 of the true factors
  std::string error;                  // nonempty when the solver failed
};

struct GridCell {
  int m = 0, s = 0;
  int col = 0, row = 0;  // position on the (m, s/m) axes
  int trials = 0, successes = 0;
  double mean_rsdr_db = 0.0;
  double median_rsdr_db = 0.0;
};

struct SuccessGrid {
  std::vector<int> m_axis;
  std::vector<double> row_values;  // s/m per row (or plain s for s_values mode)
  bool rows_are_ratios = true;
  std::vector<GridCell> cells;
  double noise_snr_db = 0.0;
  std::string subsample = "full";
  std::string dict_field = "real";
  std::uint64_t seed = 0;
};

// SNR := -20 log10(||z|| / ||clean||); +inf for zero noise.
double snr_db(const CVec& clean, const CVec& noise);

// RSDR := -20 log10(||X_hat - X||_F / ||X||_F), factored computation,
// capped at 300 dB.
double rsdr_db(const RankOneEstimate& estimate, const CVec& u_true,
               const CVec& v_true);
inline constexpr double kRsdrCapDb = 300.0;

// Gaussian noise scaled so snr_db(clean, z) equals the target exactly.
CVec make_noise(const CVec& clean, double target_snr_db, Field field,
                std::uint64_t seed);

TrialResult run_trial(const ExperimentConfig& cfg, int m, int s,
                      int trial_index);

// Runs trials_per_cell trials per (m, s) cell; trials may execute on several
// threads but the result is identical to sequential execution.
SuccessGrid phase_transition(const ExperimentConfig& cfg, int threads = 1);

SuccessGrid aggregate_trials(const ExperimentConfig& cfg,
                             const std::vector<TrialResult>& trials);

enum class RipKind { RipDiff, Rap, Rop };

struct RipEstimate {
  double max_distortion = 0.0;
  std::vector<double> samples;
  std::vector<int> histogram;  // fixed bin count over [0, max_distortion]
  double bin_width = 0.0;
};

// Empirical restricted-distortion probe: draws random model pairs through
// op_factory's operator and records the worst normalized deviation seen (a
// lower bound on the true restricted constant).
RipEstimate estimate_rip_distortion(
    const std::function<MeasOperator(std::uint64_t)>& op_factory,
    const ModelParams& params, RipKind kind, int trials, std::uint64_t seed);

void export_csv(const SuccessGrid& grid, std::ostream& out);
void export_csv(const SuccessGrid& grid, const std::string& path);
SuccessGrid import_grid_csv(const std::string& path);
SuccessGrid import_grid_csv_stream(std::istream& in);

// Grayscale phase-transition heatmap, one rect per cell, white = rate 1.
void render_heatmap(const SuccessGrid& grid, const std::string& path);

}  // namespace spfbd
