#include "flipsim/dsss.hpp"

#include <cmath>
#include <stdexcept>

namespace flipsim::dsss {

SpreadingCode generate_code(std::uint64_t seed, int n) {
  if (n < 1) throw std::invalid_argument("generate_code: n must be >= 1");
  RngStream rng(derive_seed({seed}));
  SpreadingCode code;
  code.chips.resize(n);
  for (int i = 0; i < n; ++i) code.chips[i] = rng.bernoulli(0.5) ? 1 : -1;
  return code;
}

std::vector<int> spread(std::span<const int> symbols, const SpreadingCode& code) {
  if (symbols.empty()) throw std::invalid_argument("spread: no symbols");
  const int n = code.length();
  std::vector<int> chips;
  chips.resize(symbols.size() * static_cast<std::size_t>(n));
  std::size_t out = 0;
  for (int s : symbols) {
    if (s != 1 && s != -1) throw std::invalid_argument("spread: symbols must be +-1");
    for (int i = 0; i < n; ++i) chips[out++] = s * code.chips[i];
  }
  return chips;
}

std::vector<cplx> rake_despread(std::span<const cplx> chip_stream,
                                const SpreadingCode& code) {
  const int n = code.length();
  if (chip_stream.size() % static_cast<std::size_t>(n) != 0)
    throw std::length_error("rake_despread: stream length not a multiple of N");
  const std::size_t num_symbols = chip_stream.size() / static_cast<std::size_t>(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out;
  out.reserve(num_symbols);
  for (std::size_t k = 0; k < num_symbols; ++k) {
    cplx acc{0.0, 0.0};
    const std::size_t base = k * static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i)
      acc += static_cast<double>(code.chips[i]) * chip_stream[base + i];
    out.push_back(acc * norm);
  }
  return out;
}

}  // namespace flipsim::dsss
