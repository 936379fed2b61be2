#pragma once

#include <cstdint>
#include <span>

#include "flipsim/attacker.hpp"
#include "flipsim/channel.hpp"
#include "flipsim/dsss.hpp"
#include "flipsim/receiver.hpp"
#include "flipsim/turbo.hpp"

namespace flipsim::sim {

// Monte Carlo loops run either serially (reference path, kept for testing)
// or OpenMP-parallel. All accumulators are integer counts and every frame
// derives its own seeds, so both paths produce identical results.
enum class Exec { Serial, Parallel };

struct LinkConfig {
  channel::PowerDelayProfile pdp;
  attacker::AttackerConfig attack;  // no attacked taps = no attack
  receiver::Strategy strategy;
  int frame_len = 100;
  int num_pilots = 20;
  bool chip_level = false;  // default is the equivalent symbol-level model
  int spread_n = 128;
  turbo::TurboConfig code;
  std::uint64_t pilot_key = 0;  // shared pilot-placement secret
  std::uint64_t code_key = 1;   // shared spreading-code secret
  // Pins the tap gains instead of fading them. Conditioning on a fixed
  // realization makes symbols independent, which the binomial tolerances in
  // the chip/symbol equivalence checks rely on.
  std::vector<cplx> fixed_taps;
};

inline int data_symbols_per_frame(const LinkConfig& cfg) {
  return cfg.frame_len - cfg.num_pilots;
}

// Frames needed to carry one coded block.
int frames_per_block(const LinkConfig& cfg);

struct FrameObservations {
  channel::ChannelRealization chan;
  std::vector<cplx> eps;  // Eve's per-tap estimate error this frame
  attacker::FlipMask mask;
  std::vector<std::vector<cplx>> taps;  // [tap][symbol] post-despreading
};

// Generates one frame of per-tap post-correlation observations. Noise is
// drawn for every (symbol, tap) slot regardless of the attack, so freezing
// the seeds isolates the attack's effect sample-for-sample.
FrameObservations observe_frame(const LinkConfig& cfg,
                                std::span<const int> symbols,
                                std::span<const int> pilot_positions,
                                double sigma2, std::uint64_t master,
                                int snr_index, long block, long frame_in_block,
                                long frame_counter);

struct FrameDecode {
  std::vector<double> llrs;  // one per symbol position; 0 = erasure
  bool gate_passed = false;
  bool detected = false;
};

// Bob's per-frame processing under the configured strategy: pilot-based
// estimation, polarity detection, optional attack-statistics estimation and
// per-symbol smart decisions, then MRC LLRs.
FrameDecode decode_frame(const LinkConfig& cfg, const FrameObservations& obs,
                         const receiver::Frame& frame, double sigma2);

struct BlockResult {
  long long bit_errors = 0;
  long frames = 0;
  bool gate_passed = false;
  bool detected = false;
};

// One turbo block end to end: info bits -> encode -> frames -> channel ->
// receiver -> decode -> error count.
BlockResult run_coded_block(const LinkConfig& cfg, double sigma2,
                            std::uint64_t master, int snr_index, long block);

struct PointResult {
  long long bit_errors = 0;
  long long bits = 0;
  long blocks = 0;
  long frames = 0;
  bool gate_passed = false;
  bool detected = false;
  bool budget_exhausted = false;  // block cap hit before min_error_events
};

// Runs coded blocks in deterministic waves until the stop rule fires:
// (errors >= min_error_events and bits >= min_info_bits) or the info-bit cap.
PointResult run_ber_point(const LinkConfig& cfg, double sigma2,
                          std::uint64_t master, int snr_index,
                          long long min_error_events, long long min_info_bits,
                          long long max_info_bits, Exec exec);

struct UncodedResult {
  long long symbol_errors = 0;
  long long symbols = 0;
};

// Uncoded ML decoding with genie channel estimates over the strategy's tap
// set; frames carry data only. n_symbols is rounded up to whole frames.
UncodedResult run_uncoded(const LinkConfig& cfg, double sigma2,
                          long long n_symbols, std::uint64_t master, Exec exec);

}  // namespace flipsim::sim
