#include "spfbd/harness.hpp"
#include "spfbd/projections.hpp"
#include "spfbd/rng.hpp"
#include "spfbd/signal_model.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace spfbd;

CVec read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Cplx> entries;
  double re, im;
  while (in >> re >> im) entries.emplace_back(re, im);
  if (entries.empty()) throw std::runtime_error("no entries in " + path);
  CVec x(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) x[i] = entries[i];
  return x;
}

void write_vector_file(const std::string& path, const CVec& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[80];
  for (int i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x[i].real(), x[i].imag());
    out << buf;
  }
}

double parse_snr(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

int cmd_solve(const std::string& config_path, int n, int m, int s,
              const std::string& snr, const std::string& subsample,
              const std::string& field, const std::string& mu,
              std::uint64_t seed, int trial) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = ExperimentConfig::from_json_file(config_path);
  } else {
    cfg.n = n;
    cfg.m_values = {m > 0 ? m : n};
    cfg.s_values = {s};
    cfg.noise_snr_db = parse_snr(snr);
    cfg.subsample = SubsampleSpec::parse(subsample);
    cfg.dict_field = field == "complex" ? Field::Complex : Field::Real;
    cfg.mu_policy = MuPolicy::parse_string(mu);
    cfg.trials_per_cell = 1;
    cfg.base_seed = seed;
    cfg.validate();
  }
  const int mm = cfg.m_values.front();
  const int ss = cfg.cell_s(mm).front();
  const TrialResult tr = run_trial(cfg, mm, ss, trial);
  std::printf("n=%d m=%d s=%d seed=%llu\n", cfg.cell_n(mm), tr.m, tr.s,
              static_cast<unsigned long long>(tr.seed));
  std::printf("rsdr_db=%.6g snr_db=%.6g success=%d outer_iters=%d\n",
              tr.rsdr_db, tr.snr_db, tr.success ? 1 : 0, tr.outer_iters);
  std::printf("init_angle_sin=%.6g peak_u=%.4g peak_v=%.4g time_ms=%.1f\n",
              tr.init_angle_sin, tr.peak_u, tr.peak_v, tr.wall_time_ms);
  if (!tr.error.empty()) std::printf("error=%s\n", tr.error.c_str());
  return 0;
}

int cmd_phase_transition(const std::string& config_path,
                         const std::string& out_path,
                         const std::string& heatmap_path, int threads) {
  const ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  const SuccessGrid grid = phase_transition(cfg, threads);
  if (out_path.empty()) {
    export_csv(grid, std::cout);
  } else {
    export_csv(grid, out_path);
    std::printf("wrote %s (%zu cells)\n", out_path.c_str(), grid.cells.size());
  }
  if (!heatmap_path.empty()) {
    render_heatmap(grid, heatmap_path);
    std::printf("wrote %s\n", heatmap_path.c_str());
  }
  return 0;
}

int cmd_project_cone(const std::string& in_path, const std::string& out_path,
                     double mu) {
  const CVec x = read_vector_file(in_path);
  const ConeProjResult res = project_flatness_cone(x, FlatnessLevel::at(mu));
  std::string why;
  const bool kkt = verify_cone_projection_kkt(x, res, FlatnessLevel::at(mu), &why);
  std::printf("n=%ld mu=%.6g k_star=%d was_member=%d sf_out=%.8g kkt=%d\n",
              static_cast<long>(x.size()), mu, res.k_star,
              res.was_member ? 1 : 0,
              res.projected.squaredNorm() > 0
                  ? spectral_flatness(res.projected)
                  : 0.0,
              kkt ? 1 : 0);
  if (!kkt) std::printf("kkt_diagnostic=%s\n", why.c_str());
  if (!out_path.empty()) write_vector_file(out_path, res.projected);
  return kkt ? 0 : 1;
}

int cmd_flatness_stats(int n, int s, int trials, const std::string& mode,
                       std::uint64_t seed) {
  const FlatnessMode fm = mode == "adversarial"
                              ? FlatnessMode::AdversarialSearch
                              : FlatnessMode::FixedSignal;
  const FlatnessSummary sum = flatness_stats(n, s, trials, fm, seed);
  std::printf("mode=%s n=%d s=%d trials=%d\n", mode.c_str(), n, s, trials);
  std::printf("max_sf=%.6g mean_sf=%.6g q50=%.6g q90=%.6g q99=%.6g\n",
              sum.max_sf, sum.mean_sf, sum.q50, sum.q90, sum.q99);
  return 0;
}

int cmd_rip_probe(int n, int m, int s1, int s2, const std::string& kind_str,
                  int trials, const std::string& mu, const std::string& field,
                  const std::string& subsample, std::uint64_t seed) {
  RipKind kind = RipKind::RipDiff;
  if (kind_str == "rap") kind = RipKind::Rap;
  else if (kind_str == "rop") kind = RipKind::Rop;
  else if (kind_str != "rip") throw std::runtime_error("kind must be rip, rap or rop");

  const Field f = field == "complex" ? Field::Complex : Field::Real;
  const SubsampleSpec sub = SubsampleSpec::parse(subsample);
  ModelParams params;
  params.n = n;
  params.m = m;
  params.s1 = s1;
  params.s2 = s2;
  MuPolicy mp = MuPolicy::parse_string(mu);
  params.mu1 = params.mu2 = mp.level(n);

  auto factory = [&](std::uint64_t sd) {
    SamplingPattern pattern;
    switch (sub.kind) {
      case SubsampleSpec::Full: pattern = SamplingPattern::full(n); break;
      case SubsampleSpec::Uniform:
        pattern = SamplingPattern::uniform(n, sub.factor);
        break;
      default: pattern = SamplingPattern::random(n, m, derive_seed(sd, {3})); break;
    }
    return make_meas_operator(gen_dictionary(n, f, derive_seed(sd, {1})),
                              gen_dictionary(n, f, derive_seed(sd, {2})),
                              std::move(pattern));
  };
  const RipEstimate est =
      estimate_rip_distortion(factory, params, kind, trials, seed);
  std::printf("kind=%s n=%d m=%d s1=%d s2=%d trials=%d\n", kind_str.c_str(),
              n, m, s1, s2, trials);
  std::printf("max_distortion=%.8g samples=%zu\n", est.max_distortion,
              est.samples.size());
  std::printf("histogram(bin_width=%.4g):", est.bin_width);
  for (int c : est.histogram) std::printf(" %d", c);
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse blind deconvolution from subsampled convolutions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format = "csv";
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_path, "output path");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--format", format, "output format (csv)")
      ->check(CLI::IsMember({"csv"}));

  auto* solve = app.add_subcommand("solve", "solve one synthesized instance");
  int n = 256, m = 0, s = 4, trial = 0;
  std::string snr = "inf", subsample = "full", field = "real", mu = "default";
  solve->add_option("--n", n, "signal length");
  solve->add_option("--m", m, "measurement count (defaults to n)");
  solve->add_option("--s", s, "sparsity level");
  solve->add_option("--snr", snr, "measurement SNR in dB, or inf");
  solve->add_option("--subsample", subsample, "full | uniform(k) | random");
  solve->add_option("--field", field, "real | complex");
  solve->add_option("--mu", mu, "flatness policy: default | none | <value>");
  solve->add_option("--trial", trial, "trial index within the cell");

  auto* pt = app.add_subcommand("phase-transition",
                                "run a success-rate grid and export CSV");
  std::string heatmap_path;
  pt->add_option("--heatmap", heatmap_path, "also write an SVG heatmap");

  auto* pc = app.add_subcommand("project-cone",
                                "project a vector file onto the flatness cone");
  std::string in_path;
  double mu_value = 2.0;
  pc->add_option("--in", in_path, "input vector file ('re im' per line)")
      ->required();
  pc->add_option("--mu", mu_value, "flatness level")->required();

  auto* fs = app.add_subcommand("flatness-stats",
                                "spectral flatness statistics of random models");
  int fs_n = 1024, fs_s = 16, fs_trials = 200;
  std::string fs_mode = "fixed";
  fs->add_option("--n", fs_n, "signal length");
  fs->add_option("--s", fs_s, "sparsity level");
  fs->add_option("--trials", fs_trials, "trial count");
  fs->add_option("--mode", fs_mode, "fixed | adversarial")
      ->check(CLI::IsMember({"fixed", "adversarial"}));

  auto* rp = app.add_subcommand("rip-probe",
                                "empirical restricted-distortion estimates");
  int rp_n = 256, rp_m = 256, rp_s1 = 4, rp_s2 = 0, rp_trials = 200;
  std::string rp_kind = "rip", rp_mu = "default", rp_field = "real",
              rp_sub = "full";
  rp->add_option("--n", rp_n, "signal length");
  rp->add_option("--m", rp_m, "measurement count");
  rp->add_option("--s", rp_s1, "sparsity level (both factors)");
  rp->add_option("--s2", rp_s2, "sparsity of the right factor");
  rp->add_option("--kind", rp_kind, "rip | rap | rop")
      ->check(CLI::IsMember({"rip", "rap", "rop"}));
  rp->add_option("--trials", rp_trials, "sampled pairs");
  rp->add_option("--mu", rp_mu, "flatness policy");
  rp->add_option("--field", rp_field, "real | complex");
  rp->add_option("--subsample", rp_sub, "full | uniform(k) | random");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(config_path, n, m, s, snr, subsample, field, mu, seed,
                       trial);
    if (pt->parsed()) {
      if (config_path.empty())
        throw std::runtime_error("phase-transition requires --config");
      return cmd_phase_transition(config_path, out_path, heatmap_path, threads);
    }
    if (pc->parsed()) return cmd_project_cone(in_path, out_path, mu_value);
    if (fs->parsed()) return cmd_flatness_stats(fs_n, fs_s, fs_trials, fs_mode, seed);
    if (rp->parsed())
      return cmd_rip_probe(rp_n, rp_m, rp_s1, rp_s2 > 0 ? rp_s2 : rp_s1,
                           rp_kind, rp_trials, rp_mu, rp_field, rp_sub, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
