#include "flipsim/attacker.hpp"

#include <algorithm>
#include <stdexcept>

namespace flipsim::attacker {

void validate(const AttackerConfig& cfg, int num_taps) {
  for (int t : cfg.attacked_taps) {
    if (t <= 0) throw std::invalid_argument("attacker: tap 0 cannot be attacked");
    if (t >= num_taps) throw std::invalid_argument("attacker: tap index out of range");
    if (std::count(cfg.attacked_taps.begin(), cfg.attacked_taps.end(), t) != 1)
      throw std::invalid_argument("attacker: duplicate attacked tap");
  }
  if (cfg.flip_prob < 0.0 || cfg.flip_prob > 1.0)
    throw std::invalid_argument("attacker: flip_prob must be in [0,1]");
  if (cfg.eps_frac < 0.0)
    throw std::invalid_argument("attacker: eps_frac must be >= 0");
}

bool FlipMask::any_flip() const {
  for (const auto& row : b)
    for (signed char v : row)
      if (v < 0) return true;
  return false;
}

FlipMask plan_flips(int frame_len, std::span<const int> pilot_positions,
                    int num_taps, const AttackerConfig& cfg, RngStream& rng) {
  validate(cfg, num_taps);
  FlipMask mask;
  mask.b.assign(num_taps, std::vector<signed char>(frame_len, 1));
  std::vector<char> is_pilot(frame_len, 0);
  for (int p : pilot_positions) is_pilot[p] = 1;

  std::vector<int> taps = cfg.attacked_taps;
  std::sort(taps.begin(), taps.end());
  for (int l : taps) {
    for (int k = 0; k < frame_len; ++k) {
      if (cfg.pilot_aware && is_pilot[k]) continue;
      if (rng.bernoulli(cfg.flip_prob)) mask.b[l][k] = -1;
    }
  }
  return mask;
}

std::vector<cplx> sample_estimate_error(const channel::ChannelRealization& h,
                                        const AttackerConfig& cfg,
                                        RngStream& rng) {
  std::vector<cplx> eps(h.taps.size(), cplx{0.0, 0.0});
  if (cfg.eps_frac <= 0.0) return eps;
  std::vector<int> taps = cfg.attacked_taps;
  std::sort(taps.begin(), taps.end());
  for (int l : taps) {
    const double power = std::norm(h.taps[l]);
    eps[l] = rng.cgaussian(cfg.eps_frac * cfg.eps_frac * power);
  }
  return eps;
}

}  // namespace flipsim::attacker
