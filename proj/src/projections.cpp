#include "spfbd/projections.hpp"

#include "spfbd/fft.hpp"
#include "spfbd/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spfbd {

namespace {

Cplx phase_of(Cplx z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Cplx(1.0, 0.0);
}

std::vector<int> sorted_by_magnitude(const RVec& a2) {
  std::vector<int> ord(a2.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    return a2[a] != a2[b] ? a2[a] > a2[b] : a < b;
  });
  return ord;
}

}  // namespace

ConeProjResult project_flatness_cone(const CVec& x, FlatnessLevel mu) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw std::invalid_argument("project_flatness_cone: empty input");
  const double mu_v = mu.value(n);
  if (x.squaredNorm() == 0.0) return {x, 1, true};

  const CVec zeta = unitary_dft(x);
  const RVec a2 = zeta.cwiseAbs2();
  const std::vector<int> ord = sorted_by_magnitude(a2);

  // tail[p] = sum of squared magnitudes over sorted positions >= p,
  // accumulated smallest-first
  std::vector<double> tail(n + 1, 0.0);
  for (int p = n - 1; p >= 0; --p) tail[p] = tail[p + 1] + a2[ord[p]];

  int k = n;
  bool degenerate = false;
  for (int p = 1; p <= n; ++p) {
    const double sq = a2[ord[p - 1]];
    if (sq <= 0.0) {  // every remaining bin is zero
      k = p;
      degenerate = true;
      break;
    }
    if ((p - 1) * mu_v + mu_v * tail[p - 1] / sq >= n) {
      k = p;
      break;
    }
  }

  if (k == 1) return {x, 1, true};

  CVec xi(n);
  if (!degenerate) {
    const double tau = std::sqrt((n - (k - 1) * mu_v) / tail[k - 1]);
    for (int p = 0; p < n; ++p) {
      const int i = ord[p];
      const double mag = p < k - 1 ? std::sqrt(mu_v) : tau * std::sqrt(a2[i]);
      xi[i] = mag * phase_of(zeta[i]);
    }
  } else {
    const int r = k - 1;  // nonzero bins, all capped; spread the rest evenly
    const double pad = std::sqrt((n - r * mu_v) / (n - r));
    for (int p = 0; p < n; ++p) {
      const int i = ord[p];
      xi[i] = p < r ? std::sqrt(mu_v) * phase_of(zeta[i]) : Cplx(pad, 0.0);
    }
  }

  const Cplx inner = xi.dot(zeta);
  const CVec w = xi * (inner / xi.squaredNorm());
  return {unitary_idft(w), k, false};
}

namespace {

bool kkt_fail(std::string* diagnostic, const std::string& why) {
  if (diagnostic) *diagnostic = why;
  return false;
}

}  // namespace

bool verify_cone_projection_kkt(const CVec& x, const ConeProjResult& result,
                                FlatnessLevel mu, std::string* diagnostic) {
  const int n = static_cast<int>(x.size());
  const double mu_v = mu.value(n);
  const double tol = 1e-8;

  if (x.squaredNorm() == 0.0) {
    if (result.projected.squaredNorm() != 0.0)
      return kkt_fail(diagnostic, "nonzero output for zero input");
    return true;
  }

  const CVec zeta = unitary_dft(x);
  if (result.was_member) {
    if (spectral_flatness(x) > mu_v * (1.0 + tol))
      return kkt_fail(diagnostic, "member flag set but sf(x) > mu");
    if ((result.projected - x).norm() > tol * x.norm())
      return kkt_fail(diagnostic, "member case must return the input unchanged");
    return true;
  }

  const CVec w = unitary_dft(result.projected);
  const double wn2 = w.squaredNorm();
  if (wn2 == 0.0) return kkt_fail(diagnostic, "zero output for nonzero input");

  // normalize the squared spectrum to the budget sum_i a_i = n
  const RVec a = n * w.cwiseAbs2() / wn2;
  const double sqrt_mu = std::sqrt(mu_v);
  const double zmax = std::sqrt(zeta.cwiseAbs2().maxCoeff());
  const double wmax = std::sqrt(w.cwiseAbs2().maxCoeff());
  const double ztiny = 1e-12 * zmax;
  const double thr = tol * std::max(1.0, sqrt_mu);

  if (std::abs(a.sum() - n) > tol * n)
    return kkt_fail(diagnostic, "budget violated");

  std::vector<int> capped_sig, uncapped_sig, insignificant;
  for (int i = 0; i < n; ++i) {
    const double sa = std::sqrt(a[i]);
    if (sa > sqrt_mu * (1.0 + tol))
      return kkt_fail(diagnostic, "cap exceeded");
    if (std::abs(zeta[i]) <= ztiny) {
      insignificant.push_back(i);
      continue;
    }
    if (std::abs(w[i]) > 1e-12 * wmax &&
        std::abs(phase_of(w[i]) - phase_of(zeta[i])) > tol)
      return kkt_fail(diagnostic, "phase misalignment");
    if (std::abs(sa - sqrt_mu) <= tol * sqrt_mu)
      capped_sig.push_back(i);
    else
      uncapped_sig.push_back(i);
  }

  if (!uncapped_sig.empty()) {
    double num = 0.0, den = 0.0;
    for (int i : uncapped_sig) {
      num += a[i];
      den += std::norm(zeta[i]);
    }
    const double tau = std::sqrt(num / den);
    const double lambda_gate = sqrt_mu / tau;  // |zeta_i| at which the cap binds
    for (int i : uncapped_sig) {
      if (std::abs(std::sqrt(a[i]) - tau * std::abs(zeta[i])) > thr)
        return kkt_fail(diagnostic, "tail scaling inconsistent");
      if (tau * std::abs(zeta[i]) > sqrt_mu * (1.0 + tol))
        return kkt_fail(diagnostic, "uncapped bin past the cap gate");
    }
    for (int i : capped_sig) {
      if (std::abs(zeta[i]) < lambda_gate * (1.0 - tol))
        return kkt_fail(diagnostic, "capped bin below the cap gate");
    }
    for (int i : insignificant) {
      if (std::sqrt(a[i]) > thr)
        return kkt_fail(diagnostic, "mass on a zero input bin");
    }
  }
  // otherwise every significant bin is capped; zero input bins may carry the
  // leftover budget in any split under the cap, all of which are minimizers
  return true;
}

namespace {

struct DictSparseProj {
  SparseVec coeffs;
  CVec image;
};

DictSparseProj project_dict_sparse_pair(const LinearMap& map,
                                        const Dictionary& phi, const CVec& x,
                                        int s, const HtpOptions& opts) {
  const HtpResult r = htp(map, x, s, opts);
  CVec image = CVec::Zero(phi.n);
  for (int i = 0; i < r.solution.nnz(); ++i)
    image += r.solution.values[i] * phi.entries.col(r.solution.support[i]);
  return {r.solution, std::move(image)};
}

}  // namespace

CVec project_dict_sparse(const CVec& x, const Dictionary& phi, int s,
                         const HtpOptions& opts) {
  if (x.size() != phi.n)
    throw std::invalid_argument("project_dict_sparse: dimension mismatch");
  DenseMap map(phi.entries);
  return project_dict_sparse_pair(map, phi, x, s, opts).image;
}

ApproxProjResult approx_project_intersection(const CVec& u_tilde,
                                             const Dictionary& phi, int s,
                                             FlatnessLevel mu,
                                             const AltProjOptions& opts,
                                             const HtpOptions& htp_opts) {
  const int n = phi.n;
  if (u_tilde.size() != n)
    throw std::invalid_argument("approx_project_intersection: dimension mismatch");
  if (s < 1 || s > n)
    throw std::invalid_argument("approx_project_intersection: bad s");
  if (opts.max_rounds < 1 || !(opts.rel_change_tol > 0.0))
    throw std::invalid_argument("approx_project_intersection: bad options");

  const double mu_v = mu.value(n);
  const double slack = 1.0 + 1e-9;

  ApproxProjResult res;
  const int nnz = static_cast<int>((u_tilde.array() != Cplx(0.0, 0.0)).count());
  CVec image = phi.entries * u_tilde;
  if (nnz <= s && in_flatness_cone(image, mu)) {
    res.coeffs = SparseVec::sparsify(u_tilde, s);
    res.in_cone = true;
    res.sf_value = image.squaredNorm() > 0.0 ? spectral_flatness(image) : 0.0;
    return res;
  }

  DenseMap map(phi.entries);
  CVec x = std::move(image);
  res.coeffs = SparseVec::sparsify(CVec::Zero(n), s);
  for (int round = 1; round <= opts.max_rounds; ++round) {
    res.rounds = round;
    const CVec cone = project_flatness_cone(x, mu).projected;
    DictSparseProj sp = project_dict_sparse_pair(map, phi, cone, s, htp_opts);
    res.coeffs = std::move(sp.coeffs);
    const double xnorm = x.norm();
    const double change = (sp.image - x).norm();
    x = std::move(sp.image);
    // a feasible iterate is a fixed point of both projections
    if (in_flatness_cone(x, mu)) break;
    if (xnorm == 0.0 || change < opts.rel_change_tol * xnorm) break;
  }

  if (x.squaredNorm() > 0.0) {
    res.sf_value = spectral_flatness(x);
    res.in_cone = res.sf_value <= mu_v * slack;
  } else {
    res.sf_value = 0.0;
    res.in_cone = true;
  }
  return res;
}

}  // namespace spfbd
