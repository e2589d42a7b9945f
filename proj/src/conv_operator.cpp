#include "spfbd/conv_operator.hpp"

#include "spfbd/fft.hpp"
#include "spfbd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spfbd {

SamplingPattern SamplingPattern::full(int n) {
  SamplingPattern p;
  p.n = n;
  p.indices.resize(n);
  for (int i = 0; i < n; ++i) p.indices[i] = i;
  return p;
}

SamplingPattern SamplingPattern::uniform(int n, int k) {
  if (k < 1) throw std::invalid_argument("sampling: factor must be >= 1");
  SamplingPattern p;
  p.n = n;
  for (int i = 0; i < n; i += k) p.indices.push_back(i);
  return p;
}

SamplingPattern SamplingPattern::random(int n, int m, std::uint64_t seed) {
  if (m < 1 || m > n) throw std::invalid_argument("sampling: need 1 <= m <= n");
  SamplingPattern p;
  p.n = n;
  p.indices = Rng(derive_seed(seed, {0x5a3})).pick_subset(n, m);
  return p;
}

void SamplingPattern::validate() const {
  if (n < 1 || indices.empty())
    throw std::invalid_argument("sampling pattern: empty");
  for (int k = 0; k < m(); ++k) {
    if (indices[k] < 0 || indices[k] >= n)
      throw std::invalid_argument("sampling pattern: index out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw std::invalid_argument("sampling pattern: not strictly increasing");
  }
}

CVec circular_convolve(const CVec& x, const CVec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("circular_convolve: length mismatch");
  const double rn = std::sqrt(static_cast<double>(x.size()));
  return unitary_idft(rn * unitary_dft(x).cwiseProduct(unitary_dft(y)));
}

CVec subsample(const CVec& x, const SamplingPattern& pattern) {
  if (pattern.n != static_cast<int>(x.size()))
    throw std::invalid_argument("subsample: pattern length mismatch");
  CVec out(pattern.m());
  for (int k = 0; k < pattern.m(); ++k) out[k] = x[pattern.indices[k]];
  return out;
}

MeasOperator make_meas_operator(Dictionary phi, Dictionary psi,
                                SamplingPattern pattern) {
  if (phi.n != psi.n || phi.n != pattern.n)
    throw std::invalid_argument("measurement operator: dimension mismatch");
  pattern.validate();
  MeasOperator op;
  op.n = phi.n;
  op.m = pattern.m();
  op.scale = std::sqrt(static_cast<double>(op.n) / static_cast<double>(op.m));
  op.fphi = unitary_dft_columns(phi.entries);
  op.fpsi = unitary_dft_columns(psi.entries);
  op.phi = std::move(phi);
  op.psi = std::move(psi);
  op.pattern = std::move(pattern);
  return op;
}

namespace {

CVec sparse_image(const CMat& cols, const SparseVec& u) {
  CVec out = CVec::Zero(cols.rows());
  for (int i = 0; i < u.nnz(); ++i) out += u.values[i] * cols.col(u.support[i]);
  return out;
}

CVec scatter(const CVec& b, const SamplingPattern& pattern) {
  CVec out = CVec::Zero(pattern.n);
  for (int k = 0; k < pattern.m(); ++k) out[pattern.indices[k]] = b[k];
  return out;
}

// common tail: given the spectra of Phi u and Psi v, finish
// scale * S_Omega(F^*(sqrt(n) fu .* fv))
CVec measure_from_spectra(const MeasOperator& op, const CVec& fu,
                          const CVec& fv) {
  const double rn = std::sqrt(static_cast<double>(op.n));
  return op.scale * subsample(unitary_idft(rn * fu.cwiseProduct(fv)),
                              op.pattern);
}

}  // namespace

CVec forward(const MeasOperator& op, const CVec& u, const CVec& v) {
  if (u.size() != op.n || v.size() != op.n)
    throw std::invalid_argument("forward: dimension mismatch");
  return measure_from_spectra(op, op.fphi * u, op.fpsi * v);
}

CVec forward(const MeasOperator& op, const SparseVec& u, const SparseVec& v) {
  if (u.n != op.n || v.n != op.n)
    throw std::invalid_argument("forward: dimension mismatch");
  return measure_from_spectra(op, sparse_image(op.fphi, u),
                              sparse_image(op.fpsi, v));
}

CVec forward_lifted(const MeasOperator& op, const CMat& x) {
  if (x.rows() != op.n || x.cols() != op.n)
    throw std::invalid_argument("forward_lifted: dimension mismatch");
  if (op.n > kDenseOracleCap)
    throw std::invalid_argument("forward_lifted: dense input beyond oracle cap");
  // A(X)_k = scale * sqrt(n) * (F^* d)_{omega_k},  d = diag(FPhi X (FPsi)^T)
  const CVec d = ((op.fphi * x).cwiseProduct(op.fpsi)).rowwise().sum();
  const double rn = std::sqrt(static_cast<double>(op.n));
  return op.scale * rn * subsample(unitary_idft(d), op.pattern);
}

CVec forward_lifted(const MeasOperator& op,
                    const std::vector<std::pair<CVec, CVec>>& factors) {
  CVec acc = CVec::Zero(op.m);
  for (const auto& [u, v] : factors) acc += forward(op, u, v);
  return acc;
}

CMat adjoint(const MeasOperator& op, const CVec& b) {
  if (b.size() != op.m)
    throw std::invalid_argument("adjoint: dimension mismatch");
  const CVec g = unitary_dft(scatter(b, op.pattern));
  const double rn = std::sqrt(static_cast<double>(op.n));
  return op.scale * rn *
         (op.fphi.adjoint() * (g.asDiagonal() * op.fpsi.conjugate()));
}

namespace {

// A_R(v) with the spectrum of Psi v folded in; apply is
// u -> scale * sqrt(n) * S_Omega(F^*((FPhi u) .* h)).
class RightConvMap final : public LinearMap {
public:
  RightConvMap(const MeasOperator& op, const CVec& v)
      : op_(op), h_(op.fpsi * v),
        c_(op.scale * std::sqrt(static_cast<double>(op.n))) {}

  int rows() const override { return op_.m; }
  int cols() const override { return op_.n; }

  CVec apply(const CVec& u) const override {
    return c_ * subsample(unitary_idft((op_.fphi * u).cwiseProduct(h_)),
                          op_.pattern);
  }

  CVec apply_adjoint(const CVec& b) const override {
    const CVec fs = unitary_dft(scatter(b, op_.pattern));
    return c_ * (op_.fphi.adjoint() * h_.conjugate().cwiseProduct(fs));
  }

private:
  const MeasOperator& op_;
  CVec h_;
  double c_;
};

class LeftConvMap final : public LinearMap {
public:
  LeftConvMap(const MeasOperator& op, const CVec& u)
      : op_(op), h_(op.fphi * u),
        c_(op.scale * std::sqrt(static_cast<double>(op.n))) {}

  int rows() const override { return op_.m; }
  int cols() const override { return op_.n; }

  CVec apply(const CVec& v) const override {
    return c_ * subsample(unitary_idft((op_.fpsi * v).cwiseProduct(h_)),
                          op_.pattern);
  }

  CVec apply_adjoint(const CVec& b) const override {
    const CVec fs = unitary_dft(scatter(b, op_.pattern));
    return c_ * (op_.fpsi.adjoint() * h_.conjugate().cwiseProduct(fs));
  }

private:
  const MeasOperator& op_;
  CVec h_;
  double c_;
};

}  // namespace

std::unique_ptr<LinearMap> restricted_right(const MeasOperator& op,
                                            const CVec& v) {
  if (v.size() != op.n)
    throw std::invalid_argument("restricted_right: dimension mismatch");
  return std::make_unique<RightConvMap>(op, v);
}

std::unique_ptr<LinearMap> restricted_left(const MeasOperator& op,
                                           const CVec& u) {
  if (u.size() != op.n)
    throw std::invalid_argument("restricted_left: dimension mismatch");
  return std::make_unique<LeftConvMap>(op, u);
}

std::vector<CMat> explicit_matrices(const MeasOperator& op) {
  if (op.n > kDenseOracleCap)
    throw std::invalid_argument("explicit_matrices: beyond oracle cap");
  const int n = op.n;
  const double rn = std::sqrt(static_cast<double>(n));
  std::vector<CMat> mats;
  mats.reserve(op.m);
  CVec fcol(n);
  for (int k = 0; k < op.m; ++k) {
    const int w = op.pattern.indices[k];
    for (int t = 0; t < n; ++t)
      fcol[t] = std::polar(1.0 / rn, -2.0 * std::numbers::pi * t * w / n);
    mats.push_back(op.scale * rn *
                   (op.fphi.adjoint() *
                    (fcol.asDiagonal() * op.fpsi.conjugate())));
  }
  return mats;
}

}  // namespace spfbd
