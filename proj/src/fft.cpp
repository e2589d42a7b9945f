#include "spfbd/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace spfbd {

namespace {
Eigen::FFT<double>& engine() {
  // plans are cached per size inside the engine; one engine per thread
  static thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

CVec unitary_dft(const CVec& x) {
  if (x.size() == 0) throw std::invalid_argument("unitary_dft: empty vector");
  CVec w;
  engine().fwd(w, x);
  return w / std::sqrt(static_cast<double>(x.size()));
}

CVec unitary_idft(const CVec& w) {
  if (w.size() == 0) throw std::invalid_argument("unitary_idft: empty vector");
  CVec x;
  engine().inv(x, w);
  return x * std::sqrt(static_cast<double>(w.size()));
}

CMat unitary_dft_columns(const CMat& a) {
  CMat out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    out.col(j) = unitary_dft(a.col(j));
  return out;
}

}  // namespace spfbd
