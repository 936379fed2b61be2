#pragma once

#include <span>
#include <vector>

#include "flipsim/rng.hpp"

namespace flipsim::receiver {

// Frame layout: pilot positions and values are derived deterministically
// from the shared key and the frame index, so both ends agree while an
// outsider cannot tell pilots from data.
struct Frame {
  int length = 100;
  std::vector<int> pilot_positions;  // sorted, distinct
  std::vector<int> pilot_values;     // +-1, aligned with positions

  int num_pilots() const { return static_cast<int>(pilot_positions.size()); }
};

Frame place_pilots(std::uint64_t key, std::uint64_t frame_index, int frame_len,
                   int num_pilots);

// Plain pilot-average channel estimate: mean of y_k * x_k. Unbiased when the
// pilots were not tampered with.
cplx estimate_channel(std::span<const cplx> pilot_obs,
                      std::span<const int> pilot_values);

// Coherent polarity test per pilot: flipped iff Re(y * x * conj(reference))
// is negative.
std::vector<char> classify_pilot_flips(std::span<const cplx> pilot_obs,
                                       std::span<const int> pilot_values,
                                       cplx reference);

struct DetectionReport {
  bool attacked = false;
  std::vector<int> flipped_pilot_indices;  // indices into the pilot arrays
};

// A tap is declared attacked when at least one pilot fails the polarity test.
DetectionReport detect_attack(std::span<const cplx> pilot_obs,
                              std::span<const int> pilot_values,
                              cplx reference);

// Probability that noise alone flips the coherent polarity of one symbol:
// Q(|h| * sqrt(2/sigma2)).
double polarity_flip_probability(cplx h, double sigma2);

// Upper-tail standard normal quantile (inverse of the Q function) for
// q in (0,1); used to construct a noise level that realises a target q.
double normal_quantile_upper(double q);
double sigma2_for_flip_probability(double q, double h_mag = 1.0);

// Closed-form per-frame misdetection probability of the polarity detector:
//   sum_{j=1}^{L} p^j (1-p)^{L-j} sum_{x=0}^{j} C(Lp,x) C(L-Lp,j-x) q^x
// evaluated with log-domain binomials. C(n,r) = 0 outside 0 <= r <= n.
double misdetection_probability(int frame_len, int num_pilots, double flip_prob,
                                double q);

// Per-frame false alarm probability 1 - (1-q)^Lp.
double false_alarm_probability(int num_pilots, double q);

// Conditional-mean statistics of one tap's pilot observations, split by the
// polarity classification. h_hat estimates the clean gain h; h_attack_hat
// estimates h + 2*eps, the centre of the flipped cluster.
struct TapStatistics {
  cplx h_hat{0.0, 0.0};
  cplx h_attack_hat{0.0, 0.0};
  int unflipped_count = 0;
  int flipped_count = 0;
  bool gate_passed = false;  // |h_attack_hat - h_hat| > 2*sigma
};

TapStatistics estimate_attack_statistics(std::span<const cplx> pilot_obs,
                                         std::span<const int> pilot_values,
                                         std::span<const char> flipped,
                                         double sigma);

enum class SmartAction { Keep, FlipPolarity, Discard };

struct SmartDecision {
  SmartAction action = SmartAction::Discard;
  double confidence = 0.0;  // log-likelihood margin of the flipped cluster
};

// Confidence metric comparing the flipped-cluster likelihood {+-(h+2eps)}
// against the clean cluster {+-h}:
//   delta = LSE(-|y -+ h_a|^2/s2) - LSE(-|y -+ h|^2/s2).
// delta > delta_th: the symbol sits in the flipped cluster, undo the flip;
// delta < -delta_th: keep it; otherwise discard it as unreliable.
SmartDecision smart_combine(cplx y, const TapStatistics& stats, double sigma2,
                            double delta_th);

// Maximal-ratio-combining LLR for one BPSK symbol over the included taps:
// sum of 4*Re(y * conj(gain)) / sigma2. Positive favours x = +1 (bit 0).
double symbol_llr(std::span<const cplx> obs, std::span<const cplx> gains,
                  double sigma2);

// Uncoded ML decision over the given taps: argmin_x sum |y_l - h_l x|^2,
// ties resolved to +1.
int ml_decode_uncoded(std::span<const cplx> obs, std::span<const cplx> gains,
                      std::span<const int> taps);

// What Bob does with the per-tap streams before forming LLRs.
struct Strategy {
  enum class Kind {
    FixedTaps,     // combine exactly `taps`, ignore detection
    DropDetected,  // combine `taps` minus detected-attacked ones (main tap kept)
    SmartCombine,  // per-symbol keep/flip/discard on detected taps in `taps`
  };
  Kind kind = Kind::FixedTaps;
  std::vector<int> taps;  // 0-based
  double delta_th = 0.5;
};

}  // namespace flipsim::receiver
