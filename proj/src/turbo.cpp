#include "flipsim/turbo.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flipsim/rng.hpp"

namespace flipsim::turbo {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 4-state RSC trellis for feedback 7, feedforward 5 (octal). State is
// 2*m1 + m2 with m1 the most recent register.
struct Trellis {
  int next[4][2];
  int parity[4][2];
  int term_input[4];  // input driving the feedback bit to zero
};

Trellis build_trellis() {
  Trellis t{};
  for (int s = 0; s < 4; ++s) {
    const int m1 = (s >> 1) & 1;
    const int m2 = s & 1;
    for (int d = 0; d < 2; ++d) {
      const int a = d ^ m1 ^ m2;
      t.next[s][d] = (a << 1) | m1;
      t.parity[s][d] = a ^ m2;
    }
    t.term_input[s] = m1 ^ m2;
  }
  return t;
}

const Trellis kTrellis = build_trellis();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

struct RscOutput {
  std::vector<std::uint8_t> parity;
  std::array<std::uint8_t, kTailSteps> tail_sys;
  std::array<std::uint8_t, kTailSteps> tail_parity;
};

RscOutput rsc_encode(std::span<const std::uint8_t> bits) {
  RscOutput out;
  out.parity.resize(bits.size());
  int s = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const int d = bits[k] & 1;
    out.parity[k] = static_cast<std::uint8_t>(kTrellis.parity[s][d]);
    s = kTrellis.next[s][d];
  }
  for (int k = 0; k < kTailSteps; ++k) {
    const int d = kTrellis.term_input[s];
    out.tail_sys[k] = static_cast<std::uint8_t>(d);
    out.tail_parity[k] = static_cast<std::uint8_t>(kTrellis.parity[s][d]);
    s = kTrellis.next[s][d];
  }
  return out;
}

// One constituent log-MAP pass over K info steps plus the terminated tail.
// lsys/lpar cover all K + kTailSteps steps, la covers the info steps only.
// Returns the a-posteriori LLR of each info bit.
void bcjr(std::span<const double> lsys, std::span<const double> lpar,
          std::span<const double> la, int info_len, std::span<double> app) {
  const int steps = info_len + kTailSteps;
  std::vector<double> alpha(static_cast<std::size_t>(steps + 1) * 4, kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(steps + 1) * 4, kNegInf);
  alpha[0] = 0.0;
  beta[static_cast<std::size_t>(steps) * 4] = 0.0;

  // Branch metrics per step, indexed by (input_bit << 1) | parity_bit.
  std::vector<std::array<double, 4>> g(steps);
  for (int k = 0; k < steps; ++k) {
    const double a = lsys[k] + (k < info_len ? la[k] : 0.0);
    const double b = lpar[k];
    g[k] = {0.5 * (a + b), 0.5 * (a - b), 0.5 * (-a + b), 0.5 * (-a - b)};
  }
  auto gamma = [&](int k, int s, int d) {
    if (k >= info_len && d != kTrellis.term_input[s]) return kNegInf;
    return g[k][(d << 1) | kTrellis.parity[s][d]];
  };

  for (int k = 0; k < steps; ++k) {
    double* a0 = &alpha[static_cast<std::size_t>(k) * 4];
    double* a1 = &alpha[static_cast<std::size_t>(k + 1) * 4];
    for (int s = 0; s < 4; ++s) {
      if (a0[s] == kNegInf) continue;
      for (int d = 0; d < 2; ++d) {
        const double g = gamma(k, s, d);
        if (g == kNegInf) continue;
        const int ns = kTrellis.next[s][d];
        a1[ns] = log_add(a1[ns], a0[s] + g);
      }
    }
  }
  for (int k = steps - 1; k >= 0; --k) {
    double* b1 = &beta[static_cast<std::size_t>(k + 1) * 4];
    double* b0 = &beta[static_cast<std::size_t>(k) * 4];
    for (int s = 0; s < 4; ++s) {
      double acc = kNegInf;
      for (int d = 0; d < 2; ++d) {
        const double g = gamma(k, s, d);
        if (g == kNegInf) continue;
        acc = log_add(acc, g + b1[kTrellis.next[s][d]]);
      }
      b0[s] = acc;
    }
  }
  for (int k = 0; k < info_len; ++k) {
    const double* a0 = &alpha[static_cast<std::size_t>(k) * 4];
    const double* b1 = &beta[static_cast<std::size_t>(k + 1) * 4];
    double num = kNegInf;  // bit 0
    double den = kNegInf;  // bit 1
    for (int s = 0; s < 4; ++s) {
      if (a0[s] == kNegInf) continue;
      for (int d = 0; d < 2; ++d) {
        const double g = gamma(k, s, d);
        if (g == kNegInf) continue;
        const double m = a0[s] + g + b1[kTrellis.next[s][d]];
        if (d == 0)
          num = log_add(num, m);
        else
          den = log_add(den, m);
      }
    }
    app[k] = num - den;
  }
}

}  // namespace

std::vector<int> make_interleaver(const TurboConfig& cfg) {
  const int k = cfg.info_length;
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  RngStream rng(derive_seed({cfg.interleaver_seed}));
  for (int i = k - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

CodedBlock encode(std::span<const std::uint8_t> bits, const TurboConfig& cfg) {
  const int k = cfg.info_length;
  if (static_cast<int>(bits.size()) != k)
    throw std::length_error("turbo encode: wrong info length");
  if (cfg.iterations < 1 || k < 1)
    throw std::invalid_argument("turbo encode: bad config");

  const std::vector<int> perm = make_interleaver(cfg);
  std::vector<std::uint8_t> interleaved(bits.size());
  for (int i = 0; i < k; ++i) interleaved[i] = bits[perm[i]];

  const RscOutput enc1 = rsc_encode(bits);
  const RscOutput enc2 = rsc_encode(interleaved);

  CodedBlock block;
  block.info_bits.assign(bits.begin(), bits.end());
  block.coded_bits.reserve(coded_length(cfg));
  for (int i = 0; i < k; ++i) {
    block.coded_bits.push_back(bits[i]);
    block.coded_bits.push_back((i % 2 == 0) ? enc1.parity[i] : enc2.parity[i]);
  }
  for (int t = 0; t < kTailSteps; ++t) {
    block.coded_bits.push_back(enc1.tail_sys[t]);
    block.coded_bits.push_back(enc1.tail_parity[t]);
  }
  for (int t = 0; t < kTailSteps; ++t) {
    block.coded_bits.push_back(enc2.tail_sys[t]);
    block.coded_bits.push_back(enc2.tail_parity[t]);
  }
  block.actual_rate =
      static_cast<double>(k) / static_cast<double>(block.coded_bits.size());
  return block;
}

std::vector<std::uint8_t> decode(std::span<const double> llrs,
                                 const TurboConfig& cfg) {
  const int k = cfg.info_length;
  if (static_cast<int>(llrs.size()) != coded_length(cfg))
    throw std::length_error("turbo decode: wrong llr length");

  const std::vector<int> perm = make_interleaver(cfg);
  const int steps = k + kTailSteps;

  std::vector<double> lsys1(steps), lpar1(steps, 0.0);
  std::vector<double> lsys2(steps), lpar2(steps, 0.0);
  for (int i = 0; i < k; ++i) {
    lsys1[i] = llrs[2 * i];
    if (i % 2 == 0)
      lpar1[i] = llrs[2 * i + 1];
    else
      lpar2[i] = llrs[2 * i + 1];
  }
  for (int i = 0; i < k; ++i) lsys2[i] = lsys1[perm[i]];
  const int tail_base = 2 * k;
  for (int t = 0; t < kTailSteps; ++t) {
    lsys1[k + t] = llrs[tail_base + 2 * t];
    lpar1[k + t] = llrs[tail_base + 2 * t + 1];
    lsys2[k + t] = llrs[tail_base + 2 * kTailSteps + 2 * t];
    lpar2[k + t] = llrs[tail_base + 2 * kTailSteps + 2 * t + 1];
  }

  std::vector<double> la1(k, 0.0), la2(k, 0.0);
  std::vector<double> app1(k), app2(k);
  for (int it = 0; it < cfg.iterations; ++it) {
    bcjr(lsys1, lpar1, la1, k, app1);
    for (int i = 0; i < k; ++i) la2[i] = app1[perm[i]] - la1[perm[i]] - lsys1[perm[i]];
    bcjr(lsys2, lpar2, la2, k, app2);
    for (int i = 0; i < k; ++i) la1[perm[i]] = app2[i] - la2[i] - lsys2[i];
  }

  // app2 after the last half-iteration is the freshest a-posteriori; it is
  // in interleaved order, so undo the permutation for the hard decisions.
  std::vector<std::uint8_t> bits(k);
  for (int i = 0; i < k; ++i) bits[perm[i]] = app2[i] < 0.0 ? 1 : 0;
  return bits;
}

}  // namespace flipsim::turbo
