#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flipsim::turbo {

// Rate-1/2 parallel-concatenated code built from two constraint-length-3
// recursive systematic convolutional encoders, feedback polynomial 7 and
// feedforward polynomial 5 (octal), joined by a seeded uniform random
// interleaver. Parity streams are alternately punctured to rate 1/2; both
// trellises are terminated with 2 tail steps whose systematic and parity
// bits are all transmitted, giving a coded length of 2*K + 8.
struct TurboConfig {
  int info_length = 3968;
  std::uint64_t interleaver_seed = 0x7e55;
  int iterations = 10;
};

inline constexpr int kTailSteps = 2;

inline int coded_length(const TurboConfig& cfg) {
  return 2 * cfg.info_length + 4 * kTailSteps;
}

struct CodedBlock {
  std::vector<std::uint8_t> info_bits;
  std::vector<std::uint8_t> coded_bits;
  double actual_rate;
};

// The interleaver permutation: encoder 2 consumes bits[perm[k]] at step k.
std::vector<int> make_interleaver(const TurboConfig& cfg);

CodedBlock encode(std::span<const std::uint8_t> bits, const TurboConfig& cfg);

// Full log-MAP (BCJR) iterative decoder. LLR convention: positive means
// bit 0 is more likely, i.e. llr = log(P(bit=0)/P(bit=1)); punctured parity
// positions carry LLR 0. Returns hard decisions on the info bits.
std::vector<std::uint8_t> decode(std::span<const double> llrs,
                                 const TurboConfig& cfg);

}  // namespace flipsim::turbo
