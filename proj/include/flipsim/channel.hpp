#pragma once

#include <vector>

#include "flipsim/rng.hpp"

namespace flipsim::channel {

// Average tap powers and delays of a quasi-static frequency-selective
// channel. Total power is normalised to 1 (unit transmit power convention),
// delays are in whole symbol periods starting at 0.
struct PowerDelayProfile {
  std::vector<double> tap_powers;
  std::vector<int> tap_delays;

  int num_taps() const { return static_cast<int>(tap_powers.size()); }
};

// Validates and builds a PDP. Delays default to 0,1,...,L-1 when omitted.
PowerDelayProfile make_pdp(std::vector<double> powers,
                           std::vector<int> delays = {});

// One frame's worth of complex tap gains. Fixed over the frame, independent
// across frames.
struct ChannelRealization {
  std::vector<cplx> taps;
  long frame_index = 0;
};

struct TimingBudget {
  double t_main;         // direct-path propagation time [s]
  double t_p;            // adversary processing delay [s]
  double t_side;         // adversary side-path propagation [s]
  double symbol_period;  // T_s [s]
  double margin = 0.1;   // fraction of T_s allowed past t_main, in (0,1]
};

// Each tap gain drawn circularly-symmetric complex Gaussian with variance
// equal to its average power.
ChannelRealization sample_realization(const PowerDelayProfile& pdp,
                                      long frame_index, RngStream& rng);

// CN(0, sigma2) sample; sigma2 must be positive.
cplx awgn(double sigma2, RngStream& rng);

// Flat-fading observation sqrt(P)*h*x + n, or its sign-flipped version when
// the symbol was substituted in the air. sigma2 == 0 gives the noise-free
// limit (no draw is consumed).
cplx narrowband_observe(int x, cplx h, double power, double sigma2,
                        bool flipped, RngStream& rng);

// True when the adversary's relay path lands inside the current symbol:
// t_main <= t_p + t_side <= t_main + margin * T_s.
bool timing_feasible(const TimingBudget& budget);

}  // namespace flipsim::channel
