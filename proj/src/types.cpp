#include "spfbd/types.hpp"

#include <cmath>
#include <stdexcept>

namespace spfbd {

FlatnessLevel FlatnessLevel::at(double mu) {
  if (!(mu >= 1.0))
    throw std::invalid_argument("flatness level must satisfy mu >= 1");
  FlatnessLevel f;
  f.mu_ = mu;
  f.active_ = true;
  return f;
}

double SparseVec::norm() const {
  double acc = 0.0;
  for (const Cplx& v : values) acc += std::norm(v);
  return std::sqrt(acc);
}

double SparseVec::linf() const {
  double best = 0.0;
  for (const Cplx& v : values) best = std::max(best, std::abs(v));
  return best;
}

CVec SparseVec::densify() const {
  CVec x = CVec::Zero(n);
  for (int i = 0; i < nnz(); ++i) x[support[i]] = values[i];
  return x;
}

SparseVec SparseVec::sparsify(const CVec& x, int budget) {
  SparseVec out;
  out.n = static_cast<int>(x.size());
  out.budget = budget;
  for (int i = 0; i < out.n; ++i) {
    if (x[i] != Cplx(0.0, 0.0)) {
      out.support.push_back(i);
      out.values.push_back(x[i]);
    }
  }
  if (out.nnz() > budget)
    throw std::invalid_argument("sparsify: vector has more nonzeros than the sparsity budget");
  return out;
}

void SparseVec::validate() const {
  if (budget < 1 || budget > n)
    throw std::invalid_argument("sparse vector: budget out of range");
  if (support.size() != values.size())
    throw std::invalid_argument("sparse vector: support/value length mismatch");
  if (nnz() > budget)
    throw std::invalid_argument("sparse vector: support exceeds budget");
  for (int i = 0; i < nnz(); ++i) {
    if (support[i] < 0 || support[i] >= n)
      throw std::invalid_argument("sparse vector: index out of range");
    if (i > 0 && support[i] <= support[i - 1])
      throw std::invalid_argument("sparse vector: support not strictly increasing");
    if (values[i] == Cplx(0.0, 0.0))
      throw std::invalid_argument("sparse vector: stored zero value");
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw std::invalid_argument("sparse vector: non-finite value");
  }
}

}  // namespace spfbd
