#pragma once

#include "spfbd/types.hpp"

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace spfbd {

struct SamplingPattern {
  int n = 0;
  std::vector<int> indices;  // distinct, sorted, 0-based

  int m() const { return static_cast<int>(indices.size()); }

  static SamplingPattern full(int n);
  static SamplingPattern uniform(int n, int k);  // every k-th index from 0
  static SamplingPattern random(int n, int m, std::uint64_t seed);

  void validate() const;
};

// x (*) y through the Fourier domain: F^*(sqrt(n) Fx .* Fy).
CVec circular_convolve(const CVec& x, const CVec& y);

CVec subsample(const CVec& x, const SamplingPattern& pattern);

// Action of a linear map together with its adjoint.
class LinearMap {
public:
  virtual ~LinearMap() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual CVec apply(const CVec& x) const = 0;
  virtual CVec apply_adjoint(const CVec& y) const = 0;
};

class DenseMap final : public LinearMap {
public:
  explicit DenseMap(CMat a) : a_(std::move(a)) {}
  int rows() const override { return static_cast<int>(a_.rows()); }
  int cols() const override { return static_cast<int>(a_.cols()); }
  CVec apply(const CVec& x) const override { return a_ * x; }
  CVec apply_adjoint(const CVec& y) const override { return a_.adjoint() * y; }
  const CMat& matrix() const { return a_; }

private:
  CMat a_;
};

// Subsampled circular-convolution measurements of the lifted unknown u v^T:
//   A(u v^T)_k = sqrt(n/m) * (Phi u (*) Psi v)_{omega_k}
// which keeps E||A(X)||^2 ~ ||X||_F^2 for the random dictionary model.
struct MeasOperator {
  Dictionary phi;
  Dictionary psi;
  SamplingPattern pattern;
  int n = 0;
  int m = 0;
  double scale = 0.0;  // sqrt(n/m)
  CMat fphi;           // F * Phi
  CMat fpsi;           // F * Psi
};

MeasOperator make_meas_operator(Dictionary phi, Dictionary psi,
                                SamplingPattern pattern);

CVec forward(const MeasOperator& op, const CVec& u, const CVec& v);
CVec forward(const MeasOperator& op, const SparseVec& u, const SparseVec& v);

inline constexpr int kDenseOracleCap = 64;

// A applied to a dense matrix (test oracle, n <= kDenseOracleCap) or to a
// rank-r factored matrix sum_r u_r v_r^T.
CVec forward_lifted(const MeasOperator& op, const CMat& x);
CVec forward_lifted(const MeasOperator& op,
                    const std::vector<std::pair<CVec, CVec>>& factors);

// A^*(b) as a dense n-by-n matrix, computed matrix-free through the
// Fourier-domain pipeline (never materializes the per-sample matrices).
CMat adjoint(const MeasOperator& op, const CVec& b);

// A_R(v): u -> A(u v^T) and A_L(u): v -> A(u v^T); the returned maps keep a
// reference to the operator, which must outlive them.
std::unique_ptr<LinearMap> restricted_right(const MeasOperator& op,
                                            const CVec& v);
std::unique_ptr<LinearMap> restricted_left(const MeasOperator& op,
                                           const CVec& u);

// Per-sample measurement matrices, in pattern order (test oracle only).
std::vector<CMat> explicit_matrices(const MeasOperator& op);

}  // namespace spfbd
