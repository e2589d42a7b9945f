#pragma once

#include "spfbd/types.hpp"

namespace spfbd {

// Unitary DFT with forward kernel exp(-2*pi*i*j*k/n) / sqrt(n).
CVec unitary_dft(const CVec& x);
CVec unitary_idft(const CVec& w);

// DFT of every column.
CMat unitary_dft_columns(const CMat& a);

}  // namespace spfbd
