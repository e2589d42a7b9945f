#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace spfbd {

using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

enum class Field { Complex, Real };

// Spectral flatness budget mu in [1, n]. The inactive sentinel stands for
// mu = n, where the constraint never binds.
class FlatnessLevel {
public:
  FlatnessLevel() = default;

  static FlatnessLevel at(double mu);
  static FlatnessLevel inactive() { return FlatnessLevel(); }

  bool active() const { return active_; }
  double value(int n) const { return active_ ? mu_ : static_cast<double>(n); }

private:
  double mu_ = 0.0;
  bool active_ = false;
};

// Sparse coefficient vector: strictly increasing support, nonzero values,
// at most `budget` of them.
struct SparseVec {
  int n = 0;
  int budget = 0;
  std::vector<int> support;
  std::vector<Cplx> values;

  int nnz() const { return static_cast<int>(support.size()); }
  double norm() const;
  double linf() const;
  CVec densify() const;

  // Collects the nonzero entries of x; throws if more than `budget` remain.
  static SparseVec sparsify(const CVec& x, int budget);

  void validate() const;
};

struct Dictionary {
  int n = 0;
  Field field = Field::Complex;
  std::uint64_t seed = 0;
  CMat entries;
};

struct ModelParams {
  int n = 0;
  int m = 0;
  int s1 = 0;
  int s2 = 0;
  FlatnessLevel mu1;
  FlatnessLevel mu2;
};

}  // namespace spfbd
