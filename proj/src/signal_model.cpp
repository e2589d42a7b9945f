#include "spfbd/signal_model.hpp"

#include "spfbd/fft.hpp"
#include "spfbd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spfbd {

double spectral_flatness(const CVec& x) {
  if (x.size() == 0 || x.squaredNorm() == 0.0)
    throw std::invalid_argument("undefined flatness of zero signal");
  const CVec w = unitary_dft(x);
  const double n = static_cast<double>(x.size());
  return n * w.cwiseAbs2().maxCoeff() / w.squaredNorm();
}

bool in_flatness_cone(const CVec& x, FlatnessLevel mu) {
  if (x.size() == 0) throw std::invalid_argument("empty signal");
  if (x.squaredNorm() == 0.0) return true;  // cone apex
  return spectral_flatness(x) <= mu.value(static_cast<int>(x.size()));
}

Dictionary gen_dictionary(int n, Field field, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_dictionary: n must be positive");
  Rng rng(derive_seed(seed, {0xd1c7}));
  Dictionary d;
  d.n = n;
  d.field = field;
  d.seed = seed;
  d.entries.resize(n, n);
  const double sc = 1.0 / std::sqrt(static_cast<double>(n));
  // column-major fill so a column block drawn later from the same seed path
  // reproduces the leading columns
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      d.entries(i, j) = (field == Field::Complex)
                            ? sc * rng.cnormal()
                            : Cplx(sc * rng.normal(), 0.0);
  return d;
}

SparseVec gen_sparse_signal(int n, int s, SparseDist dist, Field field,
                            std::uint64_t seed) {
  if (s < 1 || s > n)
    throw std::invalid_argument("gen_sparse_signal: need 1 <= s <= n");
  if (dist.kind == SparseDist::Peaked && !(dist.peak > 0.0 && dist.peak < 1.0))
    throw std::invalid_argument("gen_sparse_signal: peak factor must be in (0,1)");
  Rng rng(derive_seed(seed, {0x516}));
  SparseVec u;
  u.n = n;
  u.budget = s;
  u.support = rng.pick_subset(n, s);
  u.values.resize(s);
  for (int i = 0; i < s; ++i) {
    Cplx v;
    do {
      v = (field == Field::Complex) ? rng.cnormal() : Cplx(rng.normal(), 0.0);
    } while (v == Cplx(0.0, 0.0));
    u.values[i] = v;
  }
  if (dist.kind == SparseDist::Peaked && s > 1) {
    const int d = rng.uniform_int(0, s - 1);
    double rest = 0.0;
    for (int i = 0; i < s; ++i)
      if (i != d) rest += std::norm(u.values[i]);
    if (rest > 0.0) {
      // |u_d| = c * sqrt(rest / (1 - c^2)) makes |u_d| = c ||u||_2 exact
      const double c = dist.peak;
      const double target = c * std::sqrt(rest / (1.0 - c * c));
      u.values[d] *= target / std::abs(u.values[d]);
    }
  }
  return u;
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const int n = static_cast<int>(sorted.size());
  const int idx = std::min(n - 1, static_cast<int>(std::floor(p * n)));
  return sorted[std::max(0, idx)];
}

FlatnessSummary summarize(std::vector<double> samples) {
  FlatnessSummary s;
  s.samples = samples;
  std::sort(samples.begin(), samples.end());
  s.max_sf = samples.back();
  s.mean_sf = std::accumulate(samples.begin(), samples.end(), 0.0) /
              static_cast<double>(samples.size());
  s.q50 = quantile(samples, 0.50);
  s.q90 = quantile(samples, 0.90);
  s.q99 = quantile(samples, 0.99);
  return s;
}

double sf_of_column_combo(const CMat& cols, const std::vector<Cplx>& coef) {
  CVec x = CVec::Zero(cols.rows());
  for (int i = 0; i < static_cast<int>(coef.size()); ++i)
    x += coef[i] * cols.col(i);
  return spectral_flatness(x);
}

double fixed_signal_trial(int n, int s, Rng& rng) {
  // only the s active columns of the dictionary enter sf(Phi u), so drawing
  // exactly that column block is distributionally identical to a full draw
  const double sc = 1.0 / std::sqrt(static_cast<double>(n));
  CMat cols(n, s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < n; ++i) cols(i, j) = sc * rng.cnormal();
  std::vector<Cplx> coef(s);
  for (int j = 0; j < s; ++j) coef[j] = rng.cnormal();
  return sf_of_column_combo(cols, coef);
}

double adversarial_trial(int n, int s, Rng& rng) {
  const double sc = 1.0 / std::sqrt(static_cast<double>(n));
  CMat phi(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) phi(i, j) = sc * rng.cnormal();
  const CMat g = std::sqrt(static_cast<double>(n)) * unitary_dft_columns(phi);

  double best = 1.0;
  auto eval_aligned = [&](int row, const std::vector<int>& supp) {
    // restrict to supp and align u with the chosen row of sqrt(n) F Phi
    CVec u = CVec::Zero(n);
    double e = 0.0;
    for (int j : supp) {
      u[j] = std::conj(g(row, j));
      e += std::norm(g(row, j));
    }
    if (e == 0.0) return;
    u /= std::sqrt(e);
    const CVec x = phi * u;
    if (x.squaredNorm() > 0.0) best = std::max(best, spectral_flatness(x));
  };

  // per-row support: the s largest-magnitude entries of that row; evaluate
  // the most promising rows exactly
  std::vector<std::pair<double, int>> row_energy(n);
  std::vector<double> a2(n);
  std::vector<int> ord(n);
  std::vector<std::vector<int>> row_supp(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a2[j] = std::norm(g(i, j));
    std::iota(ord.begin(), ord.end(), 0);
    std::nth_element(ord.begin(), ord.begin() + s, ord.end(),
                     [&](int a, int b) { return a2[a] > a2[b]; });
    double e = 0.0;
    for (int k = 0; k < s; ++k) e += a2[ord[k]];
    row_energy[i] = {e, i};
    row_supp[i].assign(ord.begin(), ord.begin() + s);
  }
  std::sort(row_energy.begin(), row_energy.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const int n_rows = std::min(n, 64);
  for (int k = 0; k < n_rows; ++k) {
    const int i = row_energy[k].second;
    eval_aligned(i, row_supp[i]);
  }

  // the fixed-support variant: random support, best row for it
  for (int rep = 0; rep < 4; ++rep) {
    const std::vector<int> supp = rng.pick_subset(n, s);
    int best_row = 0;
    double best_e = -1.0;
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (int j : supp) e += std::norm(g(i, j));
      if (e > best_e) {
        best_e = e;
        best_row = i;
      }
    }
    eval_aligned(best_row, supp);
  }

  // unaligned random probes
  for (int rep = 0; rep < 32; ++rep) {
    CVec u = CVec::Zero(n);
    for (int j : rng.pick_subset(n, s)) u[j] = rng.cnormal();
    const CVec x = phi * u;
    if (x.squaredNorm() > 0.0) best = std::max(best, spectral_flatness(x));
  }
  return best;
}

}  // namespace

FlatnessSummary flatness_stats(int n, int s, int trials, FlatnessMode mode,
                               std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("flatness_stats: trials >= 1");
  if (s < 1 || s > n) throw std::invalid_argument("flatness_stats: bad s");
  std::vector<double> samples(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {0xf1a7, static_cast<std::uint64_t>(t)}));
    samples[t] = (mode == FlatnessMode::FixedSignal)
                     ? fixed_signal_trial(n, s, rng)
                     : adversarial_trial(n, s, rng);
  }
  return summarize(std::move(samples));
}

}  // namespace spfbd
