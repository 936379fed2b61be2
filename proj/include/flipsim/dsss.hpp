#pragma once

#include <span>
#include <vector>

#include "flipsim/rng.hpp"

namespace flipsim::dsss {

// Keyed pseudo-random +-1 spreading sequence, one code period per symbol.
struct SpreadingCode {
  std::vector<int> chips;

  int length() const { return static_cast<int>(chips.size()); }
};

// Deterministic for a given (seed, n); the same key always yields the same
// code.
SpreadingCode generate_code(std::uint64_t seed, int n);

// chip[k*N + i] = symbols[k] * chips[i]. Unit chip amplitude; the 1/sqrt(N)
// transmit scaling lives in the chip-level pipeline so that the despread
// output reproduces the post-correlation symbol model exactly.
std::vector<int> spread(std::span<const int> symbols, const SpreadingCode& code);

// Correlates one tap's received chip stream against the code and divides by
// sqrt(N). With transmit amplitude 1/sqrt(N) per chip and chip noise
// CN(0, sigma2), each output is h*x + z with z ~ CN(0, sigma2), i.e. the
// despreading gain is exactly N in SNR.
std::vector<cplx> rake_despread(std::span<const cplx> chip_stream,
                                const SpreadingCode& code);

}  // namespace flipsim::dsss
