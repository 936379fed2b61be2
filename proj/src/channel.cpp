#include "flipsim/channel.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace flipsim::channel {

PowerDelayProfile make_pdp(std::vector<double> powers,
                           std::vector<int> delays) {
  if (powers.empty()) throw std::invalid_argument("pdp: no taps");
  if (delays.empty()) {
    delays.resize(powers.size());
    std::iota(delays.begin(), delays.end(), 0);
  }
  if (delays.size() != powers.size())
    throw std::invalid_argument("pdp: powers/delays size mismatch");
  if (delays.front() != 0) throw std::invalid_argument("pdp: first delay must be 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] < 0.0) throw std::invalid_argument("pdp: negative tap power");
    if (i > 0 && delays[i] <= delays[i - 1])
      throw std::invalid_argument("pdp: delays must be strictly increasing");
    sum += powers[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("pdp: tap powers must sum to 1");
  return PowerDelayProfile{std::move(powers), std::move(delays)};
}

ChannelRealization sample_realization(const PowerDelayProfile& pdp,
                                      long frame_index, RngStream& rng) {
  ChannelRealization r;
  r.frame_index = frame_index;
  r.taps.reserve(pdp.tap_powers.size());
  for (double p : pdp.tap_powers) r.taps.push_back(rng.cgaussian(p));
  return r;
}

cplx awgn(double sigma2, RngStream& rng) {
  if (sigma2 <= 0.0) throw std::invalid_argument("awgn: sigma2 must be > 0");
  return rng.cgaussian(sigma2);
}

cplx narrowband_observe(int x, cplx h, double power, double sigma2,
                        bool flipped, RngStream& rng) {
  if (x != 1 && x != -1)
    throw std::invalid_argument("narrowband_observe: x must be +-1");
  if (sigma2 < 0.0)
    throw std::invalid_argument("narrowband_observe: sigma2 must be >= 0");
  const double sign = flipped ? -1.0 : 1.0;
  cplx y = sign * std::sqrt(power) * h * static_cast<double>(x);
  if (sigma2 > 0.0) y += rng.cgaussian(sigma2);
  return y;
}

bool timing_feasible(const TimingBudget& budget) {
  if (budget.t_main <= 0.0 || budget.t_p <= 0.0 || budget.t_side <= 0.0 ||
      budget.symbol_period <= 0.0)
    throw std::invalid_argument("timing budget: times must be positive");
  if (budget.margin <= 0.0 || budget.margin > 1.0)
    throw std::invalid_argument("timing budget: margin must be in (0,1]");
  const double relay = budget.t_p + budget.t_side;
  return budget.t_main <= relay &&
         relay <= budget.t_main + budget.margin * budget.symbol_period;
}

}  // namespace flipsim::channel
