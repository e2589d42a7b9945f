#pragma once

// Shared brute-force oracles for the test suites. Everything here is written
// by definition (direct summation, exhaustive enumeration) so it stays
// independent of the FFT-based implementation paths it checks.

#include "spfbd/rng.hpp"
#include "spfbd/types.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace spfbd::test {

inline CVec dft_direct(const CVec& x) {
  const int n = static_cast<int>(x.size());
  CVec w(n);
  for (int k = 0; k < n; ++k) {
    Cplx acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / n);
    w[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return w;
}

inline CVec idft_direct(const CVec& w) {
  const int n = static_cast<int>(w.size());
  CVec x(n);
  for (int j = 0; j < n; ++j) {
    Cplx acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += w[k] * std::polar(1.0, 2.0 * std::numbers::pi * j * k / n);
    x[j] = acc / std::sqrt(static_cast<double>(n));
  }
  return x;
}

inline CVec convolve_direct(const CVec& x, const CVec& y) {
  const int n = static_cast<int>(x.size());
  CVec out = CVec::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) out[k] += x[j] * y[((k - j) % n + n) % n];
  return out;
}

inline CVec random_cvec(Rng& rng, int n) {
  CVec x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.cnormal();
  return x;
}

inline CVec random_rvec_as_cvec(Rng& rng, int n) {
  CVec x(n);
  for (int i = 0; i < n; ++i) x[i] = Cplx(rng.normal(), 0.0);
  return x;
}

inline CMat random_cmat(Rng& rng, int rows, int cols) {
  CMat a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = rng.cnormal();
  return a;
}

// all k-subsets of {0..n-1}
inline std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      cur[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for the flatness-cone projection. Feasible points are
// parameterized by sqrt-magnitude profiles sa (sum sa_i^2 = n, sa_i^2 <= mu)
// carrying the input's phases; the best point on the ray spanned by such a
// profile sits at squared distance ||zeta||^2 - (sum |zeta_i| sa_i)^2 / n.
// ---------------------------------------------------------------------------

// clip squared magnitudes at mu and push the excess onto open coordinates
inline void cone_cap_repair(std::vector<double>& a, double mu, int n) {
  for (int pass = 0; pass < 60; ++pass) {
    double excess = 0.0, open = 0.0;
    for (double& v : a) {
      if (v > mu) {
        excess += v - mu;
        v = mu;
      } else {
        open += mu - v;
      }
    }
    if (excess <= 1e-15 * n || open <= 0.0) break;
    for (double& v : a)
      if (v < mu) v += excess * (mu - v) / open;
  }
}

inline std::vector<double> to_sqrt_profile(std::vector<double> a) {
  for (double& v : a) v = std::sqrt(std::max(0.0, v));
  return a;
}

// input-independent simplex samples, stored as sqrt profiles
inline std::vector<std::vector<double>> cone_generic_profiles(int n, double mu,
                                                              int count,
                                                              Rng& rng) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> a(n);
    double sum = 0.0;
    for (double& v : a) {
      v = -std::log(std::max(rng.uniform01(), 1e-300));
      sum += v;
    }
    for (double& v : a) v *= n / sum;
    cone_cap_repair(a, mu, n);
    out.push_back(to_sqrt_profile(std::move(a)));
  }
  return out;
}

// the cap/tail-split family derived from the input spectrum, plus jitters
inline std::vector<std::vector<double>> cone_structured_profiles(
    const CVec& zeta, double mu, int jitters, Rng& rng) {
  const int n = static_cast<int>(zeta.size());
  std::vector<double> mags(n);
  for (int i = 0; i < n; ++i) mags[i] = std::norm(zeta[i]);
  std::vector<int> ord(n);
  for (int i = 0; i < n; ++i) ord[i] = i;
  std::sort(ord.begin(), ord.end(),
            [&](int x, int y) { return mags[x] > mags[y]; });

  std::vector<std::vector<double>> base;
  for (int k = 1; k <= n; ++k) {
    const double budget = n - (k - 1) * mu;
    if (budget < 0.0) break;
    double tail_energy = 0.0;
    for (int p = k - 1; p < n; ++p) tail_energy += mags[ord[p]];
    std::vector<double> a(n, 0.0);
    for (int p = 0; p < k - 1; ++p) a[ord[p]] = mu;
    if (tail_energy > 0.0) {
      for (int p = k - 1; p < n; ++p)
        a[ord[p]] = std::min(mu, budget * mags[ord[p]] / tail_energy);
    } else if (n - (k - 1) > 0) {
      for (int p = k - 1; p < n; ++p) a[ord[p]] = budget / (n - (k - 1));
    }
    cone_cap_repair(a, mu, n);
    base.push_back(std::move(a));
  }
  std::vector<std::vector<double>> out;
  for (const auto& a : base) out.push_back(to_sqrt_profile(a));
  for (int j = 0; j < jitters && !base.empty(); ++j) {
    std::vector<double> a = base[rng.uniform_int(0, static_cast<int>(base.size()) - 1)];
    double sum = 0.0;
    for (double& v : a) {
      v = std::max(0.0, v * (1.0 + 0.08 * rng.normal()));
      sum += v;
    }
    if (sum <= 0.0) continue;
    for (double& v : a) v *= n / sum;
    cone_cap_repair(a, mu, n);
    out.push_back(to_sqrt_profile(std::move(a)));
  }
  return out;
}

inline double cone_profile_distance_sq(const CVec& zeta,
                                       const std::vector<double>& sqrt_profile) {
  double ip = 0.0;
  for (int i = 0; i < zeta.size(); ++i)
    ip += std::abs(zeta[i]) * sqrt_profile[i];
  return zeta.squaredNorm() - ip * ip / static_cast<double>(zeta.size());
}

// achieved distance minus the best brute-force distance (negative or tiny
// when the projection is optimal); distances measured in the Fourier domain
// through the direct-summation DFT
inline double cone_oracle_gap(const CVec& x, const CVec& projected, double mu,
                              const std::vector<std::vector<double>>& generic,
                              int jitters, Rng& rng) {
  const CVec zeta = dft_direct(x);
  const double got_sq = (dft_direct(projected) - zeta).squaredNorm();
  double best_sq = 1e300;
  for (const auto& p : generic)
    best_sq = std::min(best_sq, cone_profile_distance_sq(zeta, p));
  for (const auto& p : cone_structured_profiles(zeta, mu, jitters, rng))
    best_sq = std::min(best_sq, cone_profile_distance_sq(zeta, p));
  return std::sqrt(std::max(0.0, got_sq)) - std::sqrt(std::max(0.0, best_sq));
}

}  // namespace spfbd::test
