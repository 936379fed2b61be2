#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flipsim/rng.hpp"

namespace flipsim::metrics {

struct BerRecord {
  std::string scenario_id;
  double snr_db = 0.0;
  long long bit_errors = 0;
  long long bits_total = 0;
  long frames = 0;
};

// Merge records from the same (scenario, SNR) point. Order-independent;
// throws on an empty set or mixed scenarios.
BerRecord ber_accumulate(std::span<const BerRecord> records);

struct Wilson {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial rate at z standard deviations.
Wilson wilson_interval(long long successes, long long trials, double z);

struct MiEstimate {
  double value_bits = 0.0;
  int bins = 0;
  long long samples = 0;
};

// Plug-in (histogram) estimate of I(x;y) in bits for BPSK x and complex y,
// on a bins x bins grid covering +-4 sample standard deviations per axis.
// The plug-in estimator is biased upward by roughly (cells-1)/(2N ln 2);
// with the default 16x16 grid and 1e5 samples that is ~2e-3 bits.
MiEstimate mutual_information_plugin(
    std::span<const std::pair<int, cplx>> samples, int bins);

// Single-tap detection experiment matching the closed-form model: the tap
// gain is held fixed at the given value (the analytics condition on the
// realization) and the polarity test uses it as the coherent reference.
struct DetectionScenario {
  int frame_len = 100;
  int num_pilots = 20;
  cplx h{1.0, 0.0};
  double sigma2 = 0.1;
  double flip_prob = 0.5;
  bool pilot_aware = false;
};

struct RateEstimate {
  double rate = 0.0;
  Wilson ci;
  long long events = 0;
  long long trials = 0;
};

struct DetectionRates {
  RateEstimate p_miss;   // conditional on >= 1 flipped symbol in the frame
  RateEstimate p_false;  // measured on attack-free frames
};

DetectionRates empirical_detection_rates(const DetectionScenario& scenario,
                                         long frames, std::uint64_t seed,
                                         bool parallel = true);

}  // namespace flipsim::metrics
