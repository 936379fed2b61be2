#pragma once

#include <span>
#include <vector>

#include "flipsim/channel.hpp"
#include "flipsim/rng.hpp"

namespace flipsim::attacker {

// Eve's configuration: which secondary taps she substitutes, her per-symbol
// flip probability, the relative size of her channel-estimate error, and
// whether she knows the pilot positions (and so leaves them untouched).
struct AttackerConfig {
  std::vector<int> attacked_taps;  // 0-based; tap 0 is never attackable
  double flip_prob = 0.5;
  double eps_frac = 0.0;  // estimate error scale: E{|eps|^2} = eps_frac^2 |h|^2
  bool pilot_aware = true;

  bool active() const { return !attacked_taps.empty(); }
};

// Throws unless taps are unique secondary indices < num_taps, flip_prob is a
// probability and eps_frac >= 0.
void validate(const AttackerConfig& cfg, int num_taps);

// Per-(tap, symbol) substitution pattern; +1 keeps the symbol, -1 flips it.
struct FlipMask {
  std::vector<std::vector<signed char>> b;  // [tap][symbol]

  bool flipped(int tap, int k) const { return b[tap][k] < 0; }
  bool any_flip() const;
};

// Independent Bernoulli(flip_prob) flips on each attacked tap. Pilot
// positions are exempt when Eve knows them; otherwise every symbol is fair
// game.
FlipMask plan_flips(int frame_len, std::span<const int> pilot_positions,
                    int num_taps, const AttackerConfig& cfg, RngStream& rng);

// Eve's estimate error per tap for this frame, eps_l ~ CN(0,
// eps_frac^2 |h_l|^2) on attacked taps, exactly zero elsewhere and when
// eps_frac == 0. Redrawn each frame alongside the channel.
std::vector<cplx> sample_estimate_error(const channel::ChannelRealization& h,
                                        const AttackerConfig& cfg,
                                        RngStream& rng);

// Pre-noise tap signal after the attack. Eve subtracts 2*(h+eps)*x from the
// air, so a flipped symbol arrives as (-h - 2*eps)*x; with a perfect
// estimate this is the exact sign flip -h*x.
inline cplx apply_attack(cplx h, cplx eps, int x, bool flipped) {
  const double xd = static_cast<double>(x);
  if (!flipped) return h * xd;
  return (-h - 2.0 * eps) * xd;
}

}  // namespace flipsim::attacker
