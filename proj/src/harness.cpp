#include "spfbd/harness.hpp"

#include "spfbd/fft.hpp"
#include "spfbd/rng.hpp"
#include "spfbd/signal_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spfbd {

namespace {

std::string fmt_g6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace

SubsampleSpec SubsampleSpec::parse(const std::string& text) {
  SubsampleSpec s;
  if (text == "full") {
    s.kind = Full;
  } else if (text == "random") {
    s.kind = Random;
  } else if (text.rfind("uniform(", 0) == 0 && text.back() == ')') {
    s.kind = Uniform;
    s.factor = std::stoi(text.substr(8, text.size() - 9));
    if (s.factor < 1)
      throw std::invalid_argument("subsample: uniform factor must be >= 1");
  } else {
    throw std::invalid_argument("subsample: expected full, uniform(k) or random");
  }
  return s;
}

std::string SubsampleSpec::str() const {
  switch (kind) {
    case Full: return "full";
    case Random: return "random";
    case Uniform: return "uniform(" + std::to_string(factor) + ")";
  }
  return "full";
}

FlatnessLevel MuPolicy::level(int n) const {
  switch (kind) {
    case None: return FlatnessLevel::inactive();
    case Explicit: return FlatnessLevel::at(std::min(mu, static_cast<double>(n)));
    case Default:
    default:
      return FlatnessLevel::at(std::min(static_cast<double>(n),
                                        std::ceil(5.0 * std::log(n))));
  }
}

MuPolicy MuPolicy::parse_string(const std::string& text) {
  MuPolicy p;
  if (text == "default") {
    p.kind = Default;
  } else if (text == "none") {
    p.kind = None;
  } else {
    p.kind = Explicit;
    p.mu = parse_double(text);
    if (!(p.mu >= 1.0)) throw std::invalid_argument("mu_policy: mu must be >= 1");
  }
  return p;
}

std::string MuPolicy::str() const {
  switch (kind) {
    case Default: return "default";
    case None: return "none";
    case Explicit: return fmt_g6(mu);
  }
  return "default";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  static const std::vector<std::string> known = {
      "n", "m_values", "s_values", "s_over_m", "noise_snr_db", "subsample",
      "dict_field", "mu_policy", "trials_per_cell", "base_seed",
      "rsdr_success_threshold_db"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  ExperimentConfig cfg;
  cfg.n = j.value("n", 0);
  if (j.contains("m_values")) j.at("m_values").get_to(cfg.m_values);
  if (j.contains("s_values")) j.at("s_values").get_to(cfg.s_values);
  if (j.contains("s_over_m")) j.at("s_over_m").get_to(cfg.s_over_m);
  if (j.contains("noise_snr_db")) {
    const auto& v = j.at("noise_snr_db");
    cfg.noise_snr_db = v.is_string() ? parse_double(v.get<std::string>())
                                     : v.get<double>();
  }
  if (j.contains("subsample"))
    cfg.subsample = SubsampleSpec::parse(j.at("subsample").get<std::string>());
  if (j.contains("dict_field")) {
    const std::string f = j.at("dict_field").get<std::string>();
    if (f == "real") cfg.dict_field = Field::Real;
    else if (f == "complex") cfg.dict_field = Field::Complex;
    else throw std::invalid_argument("config: dict_field must be real or complex");
  }
  if (j.contains("mu_policy")) {
    const auto& v = j.at("mu_policy");
    cfg.mu_policy = v.is_string()
                        ? MuPolicy::parse_string(v.get<std::string>())
                        : MuPolicy{MuPolicy::Explicit, v.get<double>()};
  }
  cfg.trials_per_cell = j.value("trials_per_cell", 20);
  cfg.base_seed = j.value("base_seed", std::uint64_t{0});
  if (j.contains("rsdr_success_threshold_db"))
    cfg.rsdr_success_threshold_db = j.at("rsdr_success_threshold_db").get<double>();
  cfg.validate();
  cfg.rsdr_success_threshold_db = cfg.resolved_threshold();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["m_values"] = m_values;
  if (!s_values.empty()) j["s_values"] = s_values;
  if (!s_over_m.empty()) j["s_over_m"] = s_over_m;
  if (std::isinf(noise_snr_db)) j["noise_snr_db"] = "inf";
  else j["noise_snr_db"] = noise_snr_db;
  j["subsample"] = subsample.str();
  j["dict_field"] = dict_field == Field::Real ? "real" : "complex";
  j["mu_policy"] = mu_policy.str();
  j["trials_per_cell"] = trials_per_cell;
  j["base_seed"] = base_seed;
  j["rsdr_success_threshold_db"] = rsdr_success_threshold_db;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  if (m_values.empty()) throw std::invalid_argument("config: m_values is empty");
  for (int m : m_values)
    if (m < 1) throw std::invalid_argument("config: m values must be positive");
  if (s_values.empty() == s_over_m.empty())
    throw std::invalid_argument("config: give exactly one of s_values / s_over_m");
  for (int s : s_values)
    if (s < 1) throw std::invalid_argument("config: s values must be positive");
  for (double r : s_over_m)
    if (!(r > 0.0 && r <= 1.0))
      throw std::invalid_argument("config: s/m ratios must lie in (0,1]");
  if (trials_per_cell < 1)
    throw std::invalid_argument("config: trials_per_cell must be >= 1");
  if (subsample.kind == SubsampleSpec::Random) {
    if (n < 1) throw std::invalid_argument("config: n required for random subsampling");
    for (int m : m_values)
      if (m > n) throw std::invalid_argument("config: m exceeds n");
  }
  resolved_threshold();  // rejects noise levels without a default threshold
}

int ExperimentConfig::cell_n(int m) const {
  switch (subsample.kind) {
    case SubsampleSpec::Full: return m;
    case SubsampleSpec::Uniform: return m * subsample.factor;
    case SubsampleSpec::Random:
    default: return n;
  }
}

std::vector<int> ExperimentConfig::cell_s(int m) const {
  std::vector<int> out;
  if (!s_values.empty()) {
    out = s_values;
  } else {
    for (double r : s_over_m)
      out.push_back(std::max(1, static_cast<int>(std::llround(r * m))));
  }
  const int nn = cell_n(m);
  for (int s : out)
    if (s > nn) throw std::invalid_argument("config: sparsity exceeds ambient length");
  return out;
}

double ExperimentConfig::resolved_threshold() const {
  if (!std::isnan(rsdr_success_threshold_db)) return rsdr_success_threshold_db;
  if (std::isinf(noise_snr_db)) return 60.0;
  if (std::abs(noise_snr_db - 40.0) < 1e-9) return 30.0;
  if (std::abs(noise_snr_db - 20.0) < 1e-9) return 10.0;
  throw std::invalid_argument(
      "config: rsdr_success_threshold_db required for this noise level");
}

double snr_db(const CVec& clean, const CVec& noise) {
  const double cn = clean.norm();
  if (cn == 0.0) throw std::invalid_argument("snr_db: zero clean signal");
  const double zn = noise.norm();
  if (zn == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(zn / cn);
}

double rsdr_db(const RankOneEstimate& estimate, const CVec& u_true,
               const CVec& v_true) {
  const double truth_norm = u_true.norm() * v_true.norm();
  if (truth_norm == 0.0) throw std::invalid_argument("rsdr_db: zero truth");
  const double dist = rank_one_distance(estimate.u.densify(),
                                        estimate.v.densify(), u_true, v_true);
  if (dist <= 0.0) return kRsdrCapDb;
  return std::min(kRsdrCapDb, -20.0 * std::log10(dist / truth_norm));
}

CVec make_noise(const CVec& clean, double target_snr_db, Field field,
                std::uint64_t seed) {
  const int m = static_cast<int>(clean.size());
  if (std::isinf(target_snr_db) && target_snr_db > 0) return CVec::Zero(m);
  const double cn = clean.norm();
  if (cn == 0.0)
    throw std::invalid_argument("make_noise: zero clean signal with finite target");
  Rng rng(derive_seed(seed, {0x401e}));
  CVec g(m);
  for (int i = 0; i < m; ++i)
    g[i] = field == Field::Complex ? rng.cnormal() : Cplx(rng.normal(), 0.0);
  return g * (cn * std::pow(10.0, -target_snr_db / 20.0) / g.norm());
}

TrialResult run_trial(const ExperimentConfig& cfg, int m, int s,
                      int trial_index) {
  TrialResult tr;
  tr.m = m;
  tr.s = s;
  tr.seed = derive_seed(cfg.base_seed,
                        {static_cast<std::uint64_t>(m),
                         static_cast<std::uint64_t>(s),
                         static_cast<std::uint64_t>(trial_index)});
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const int n = cfg.cell_n(m);
    SamplingPattern pattern;
    switch (cfg.subsample.kind) {
      case SubsampleSpec::Full: pattern = SamplingPattern::full(n); break;
      case SubsampleSpec::Uniform:
        pattern = SamplingPattern::uniform(n, cfg.subsample.factor);
        break;
      case SubsampleSpec::Random:
      default:
        pattern = SamplingPattern::random(n, m, derive_seed(tr.seed, {5}));
        break;
    }
    if (pattern.m() != m)
      throw std::invalid_argument("run_trial: pattern size does not match m");

    const Dictionary phi = gen_dictionary(n, cfg.dict_field, derive_seed(tr.seed, {1}));
    const Dictionary psi = gen_dictionary(n, cfg.dict_field, derive_seed(tr.seed, {2}));
    const SparseVec u = gen_sparse_signal(n, s, SparseDist::gauss(),
                                          cfg.dict_field, derive_seed(tr.seed, {3}));
    const SparseVec v = gen_sparse_signal(n, s, SparseDist::gauss(),
                                          cfg.dict_field, derive_seed(tr.seed, {4}));
    tr.peak_u = u.linf() / u.norm();
    tr.peak_v = v.linf() / v.norm();

    const MeasOperator op = make_meas_operator(phi, psi, std::move(pattern));
    const CVec clean = forward(op, u, v);
    const CVec z = make_noise(clean, cfg.noise_snr_db, cfg.dict_field,
                              derive_seed(tr.seed, {6}));
    const CVec b = clean + z;
    tr.snr_db = snr_db(clean, z);

    ModelParams params;
    params.n = n;
    params.m = m;
    params.s1 = params.s2 = s;
    params.mu1 = params.mu2 = cfg.mu_policy.level(n);

    const Reference ref{u.densify(), v.densify()};
    const SolveResult res = spf_bd(op, b, params, SolverOptions{}, &ref);
    tr.rsdr_db = rsdr_db(res.estimate, ref.u, ref.v);
    tr.outer_iters = res.trace.outer_iters;
    tr.init_angle_sin = res.trace.init_angle_sin;
  } catch (const std::exception& e) {
    tr.error = e.what();
    tr.rsdr_db = -kRsdrCapDb;
  }
  tr.success = tr.rsdr_db > cfg.resolved_threshold();
  tr.wall_time_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return tr;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

SuccessGrid aggregate_trials(const ExperimentConfig& cfg,
                             const std::vector<TrialResult>& trials) {
  SuccessGrid grid;
  grid.m_axis = cfg.m_values;
  grid.rows_are_ratios = !cfg.s_over_m.empty();
  grid.row_values = grid.rows_are_ratios
                        ? cfg.s_over_m
                        : std::vector<double>(cfg.s_values.begin(),
                                              cfg.s_values.end());
  grid.noise_snr_db = cfg.noise_snr_db;
  grid.subsample = cfg.subsample.str();
  grid.dict_field = cfg.dict_field == Field::Real ? "real" : "complex";
  grid.seed = cfg.base_seed;

  for (std::size_t col = 0; col < cfg.m_values.size(); ++col) {
    const int m = cfg.m_values[col];
    const std::vector<int> ss = cfg.cell_s(m);
    for (std::size_t row = 0; row < ss.size(); ++row) {
      GridCell cell;
      cell.m = m;
      cell.s = ss[row];
      cell.col = static_cast<int>(col);
      cell.row = static_cast<int>(row);
      std::vector<double> rsdrs;
      for (const TrialResult& t : trials) {
        if (t.m == m && t.s == cell.s) {
          ++cell.trials;
          cell.successes += t.success ? 1 : 0;
          rsdrs.push_back(t.rsdr_db);
        }
      }
      if (rsdrs.empty()) continue;  // only cells that carry data become rows
      cell.mean_rsdr_db = std::accumulate(rsdrs.begin(), rsdrs.end(), 0.0) /
                          static_cast<double>(rsdrs.size());
      cell.median_rsdr_db = median_of(rsdrs);
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

SuccessGrid phase_transition(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  struct Job {
    int m, s, trial;
  };
  std::vector<Job> jobs;
  for (int m : cfg.m_values)
    for (int s : cfg.cell_s(m))
      for (int t = 0; t < cfg.trials_per_cell; ++t) jobs.push_back({m, s, t});

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = run_trial(cfg, jobs[i].m, jobs[i].s, jobs[i].trial);
      } catch (const std::exception& e) {
        results[i].m = jobs[i].m;
        results[i].s = jobs[i].s;
        results[i].error = e.what();
        results[i].rsdr_db = -kRsdrCapDb;
        results[i].success = false;
      }
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return aggregate_trials(cfg, results);
}

RipEstimate estimate_rip_distortion(
    const std::function<MeasOperator(std::uint64_t)>& op_factory,
    const ModelParams& params, RipKind kind, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("rip probe: trials >= 1");
  const MeasOperator op = op_factory(derive_seed(seed, {0x0b}));
  if (op.n != params.n || op.m != params.m)
    throw std::invalid_argument("rip probe: operator does not match params");

  auto model_factor = [&](int s, const Dictionary& dict, FlatnessLevel mu,
                          std::uint64_t sd, bool peaked) -> CVec {
    const SparseDist dist = peaked ? SparseDist::peaked(0.78) : SparseDist::gauss();
    const SparseVec raw = gen_sparse_signal(params.n, s, dist, dict.field, sd);
    if (!mu.active()) return raw.densify();
    // pull the factor into the model set
    const ApproxProjResult pr =
        approx_project_intersection(raw.densify(), dict, s, mu);
    CVec out = pr.coeffs.densify();
    if (out.squaredNorm() == 0.0) out = raw.densify();
    return out;
  };

  RipEstimate est;
  est.samples.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, {0x9a1, static_cast<std::uint64_t>(t)});
    const bool peaked = (t % 2) == 1;
    const CVec u1 = model_factor(params.s1, op.phi, params.mu1, derive_seed(ts, {1}), peaked);
    CVec v1 = model_factor(params.s2, op.psi, params.mu2, derive_seed(ts, {2}), peaked);
    const CVec u2 = model_factor(params.s1, op.phi, params.mu1, derive_seed(ts, {3}), peaked);
    const CVec v2 = model_factor(params.s2, op.psi, params.mu2, derive_seed(ts, {4}), peaked);

    double sample = 0.0;
    if (kind == RipKind::RipDiff) {
      const double w2 = std::pow(rank_one_distance(u1, v1, u2, v2), 2);
      if (w2 == 0.0) continue;
      const double aw2 = (forward(op, u1, v1) - forward(op, u2, v2)).squaredNorm();
      sample = std::abs(aw2 - w2) / w2;
    } else {
      if (kind == RipKind::Rop) {
        // orthogonalize the v-slot: <W', W> = <u2,u1> <v2,v1> = 0 by construction
        v1 -= v2 * (v2.dot(v1) / v2.squaredNorm());
        const double ip = std::abs(u2.dot(u1) * v2.dot(v1));
        if (ip > 1e-10 * u1.norm() * v1.norm() * u2.norm() * v2.norm())
          throw std::logic_error("rip probe: orthogonalized pair is not orthogonal");
      }
      const double nw = u1.norm() * v1.norm();
      const double nwp = u2.norm() * v2.norm();
      if (nw == 0.0 || nwp == 0.0) continue;
      const Cplx a_ip = forward(op, u2, v2).dot(forward(op, u1, v1));
      const Cplx w_ip = u2.dot(u1) * v2.dot(v1);
      sample = std::abs(a_ip - w_ip) / (nw * nwp);
    }
    est.samples.push_back(sample);
    est.max_distortion = std::max(est.max_distortion, sample);
  }

  constexpr int kBins = 20;
  est.histogram.assign(kBins, 0);
  est.bin_width = est.max_distortion > 0 ? est.max_distortion / kBins : 1.0;
  for (double s : est.samples) {
    int b = static_cast<int>(s / est.bin_width);
    est.histogram[std::min(b, kBins - 1)] += 1;
  }
  return est;
}

namespace {
constexpr const char* kCsvHeader =
    "m,s,trials,successes,success_rate,mean_rsdr_db,median_rsdr_db,"
    "noise_snr_db,subsample,dict_field,seed";
}

void export_csv(const SuccessGrid& grid, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const GridCell& c : grid.cells) {
    const double rate =
        c.trials > 0 ? static_cast<double>(c.successes) / c.trials : 0.0;
    out << c.m << ',' << c.s << ',' << c.trials << ',' << c.successes << ','
        << fmt_g6(rate) << ',' << fmt_g6(c.mean_rsdr_db) << ','
        << fmt_g6(c.median_rsdr_db) << ',' << fmt_g6(grid.noise_snr_db) << ','
        << grid.subsample << ',' << grid.dict_field << ',' << grid.seed
        << "\n";
  }
}

void export_csv(const SuccessGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_csv: cannot open " + path);
  export_csv(grid, out);
}

SuccessGrid import_grid_csv_stream(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("import_grid_csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::runtime_error("import_grid_csv: unexpected header");

  SuccessGrid grid;
  bool meta_set = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 11)
      throw std::runtime_error("import_grid_csv: malformed row");
    GridCell c;
    c.m = std::stoi(f[0]);
    c.s = std::stoi(f[1]);
    c.trials = std::stoi(f[2]);
    c.successes = std::stoi(f[3]);
    c.mean_rsdr_db = parse_double(f[5]);
    c.median_rsdr_db = parse_double(f[6]);
    if (!meta_set) {
      grid.noise_snr_db = parse_double(f[7]);
      grid.subsample = f[8];
      grid.dict_field = f[9];
      grid.seed = std::stoull(f[10]);
      meta_set = true;
    }
    if (std::find(grid.m_axis.begin(), grid.m_axis.end(), c.m) ==
        grid.m_axis.end())
      grid.m_axis.push_back(c.m);
    const double ratio = static_cast<double>(c.s) / c.m;
    bool found_row = false;
    for (std::size_t r = 0; r < grid.row_values.size(); ++r) {
      if (std::abs(grid.row_values[r] - ratio) < 1e-12) {
        c.row = static_cast<int>(r);
        found_row = true;
        break;
      }
    }
    if (!found_row) {
      c.row = static_cast<int>(grid.row_values.size());
      grid.row_values.push_back(ratio);
    }
    c.col = static_cast<int>(
        std::find(grid.m_axis.begin(), grid.m_axis.end(), c.m) -
        grid.m_axis.begin());
    grid.cells.push_back(c);
  }
  return grid;
}

SuccessGrid import_grid_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("import_grid_csv: cannot open " + path);
  return import_grid_csv_stream(in);
}

void render_heatmap(const SuccessGrid& grid, const std::string& path) {
  if (grid.cells.empty())
    throw std::invalid_argument("render_heatmap: empty grid");
  int ncols = 0, nrows = 0;
  for (const GridCell& c : grid.cells) {
    ncols = std::max(ncols, c.col + 1);
    nrows = std::max(nrows, c.row + 1);
  }
  // smallest row value sits at the bottom
  std::vector<int> order(nrows);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> rv = grid.row_values;
  rv.resize(nrows, 0.0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return rv[a] < rv[b]; });
  std::vector<int> rank(nrows);
  for (int i = 0; i < nrows; ++i) rank[order[i]] = i;

  const int cw = 36, ch = 24, ml = 72, mt = 16, mb = 48, mr = 16;
  const int width = ml + ncols * cw + mr;
  const int height = mt + nrows * ch + mb;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_heatmap: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (const GridCell& c : grid.cells) {
    const double rate =
        c.trials > 0 ? static_cast<double>(c.successes) / c.trials : 0.0;
    const int g = static_cast<int>(std::lround(255.0 * rate));
    const int x = ml + c.col * cw;
    const int y = mt + (nrows - 1 - rank[c.row]) * ch;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"rgb(" << g << ',' << g << ','
        << g << ")\"/>\n";
  }
  out << "<text x=\"" << ml + ncols * cw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">m</text>\n";
  out << "<text x=\"14\" y=\"" << mt + nrows * ch / 2
      << "\" text-anchor=\"middle\" font-size=\"13\">"
      << (grid.rows_are_ratios ? "s/m" : "s") << "</text>\n";
  for (int col = 0; col < ncols; ++col) {
    if (col < static_cast<int>(grid.m_axis.size()))
      out << "<text x=\"" << ml + col * cw + cw / 2 << "\" y=\""
          << mt + nrows * ch + 16
          << "\" text-anchor=\"middle\" font-size=\"11\">" << grid.m_axis[col]
          << "</text>\n";
  }
  for (int row = 0; row < nrows; ++row) {
    if (row < static_cast<int>(grid.row_values.size())) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", grid.row_values[row]);
      out << "<text x=\"" << ml - 6 << "\" y=\""
          << mt + (nrows - 1 - rank[row]) * ch + ch / 2 + 4
          << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace spfbd
