#include <doctest.h>

#include <cmath>

#include "flipsim/attacker.hpp"

using namespace flipsim;
using namespace flipsim::attacker;

namespace {

AttackerConfig tap1_attack(double p, bool pilot_aware) {
  AttackerConfig cfg;
  cfg.attacked_taps = {1};
  cfg.flip_prob = p;
  cfg.pilot_aware = pilot_aware;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  AttackerConfig cfg;
  cfg.attacked_taps = {0};
  CHECK_THROWS_AS(validate(cfg, 2), std::invalid_argument);
  cfg.attacked_taps = {2};
  CHECK_THROWS_AS(validate(cfg, 2), std::invalid_argument);
  cfg.attacked_taps = {1, 1};
  CHECK_THROWS_AS(validate(cfg, 3), std::invalid_argument);
  cfg.attacked_taps = {1};
  cfg.flip_prob = 1.5;
  CHECK_THROWS_AS(validate(cfg, 2), std::invalid_argument);
  cfg.flip_prob = 0.5;
  CHECK_NOTHROW(validate(cfg, 2));
}

TEST_CASE("flip planning") {
  const std::vector<int> pilots{0, 5, 17, 42, 99};

  RngStream rng(1);
  const auto none = plan_flips(100, pilots, 2, tap1_attack(0.0, false), rng);
  CHECK_FALSE(none.any_flip());

  RngStream rng2(2);
  const auto all = plan_flips(100, pilots, 2, tap1_attack(1.0, false), rng2);
  for (int k = 0; k < 100; ++k) {
    CHECK(all.flipped(1, k));
    CHECK_FALSE(all.flipped(0, k));  // main tap untouched
  }

  // Pilot-aware fair-coin flips: no pilot touched, data rate near 1/2.
  RngStream rng3(split_mix64(3));
  long flips = 0, data = 0;
  for (int f = 0; f < 1250; ++f) {
    const auto m = plan_flips(100, pilots, 2, tap1_attack(0.5, true), rng3);
    for (int k = 0; k < 100; ++k) {
      if (std::find(pilots.begin(), pilots.end(), k) != pilots.end()) {
        CHECK_FALSE(m.flipped(1, k));
      } else {
        ++data;
        flips += m.flipped(1, k);
      }
    }
  }
  const double rate = static_cast<double>(flips) / data;
  CHECK(rate >= 0.48);
  CHECK(rate <= 0.52);
}

TEST_CASE("estimate error scaling") {
  const auto pdp = channel::make_pdp({0.5, 0.5});
  AttackerConfig cfg = tap1_attack(0.5, false);

  cfg.eps_frac = 0.0;
  RngStream rng(9);
  RngStream chan_rng(10);
  auto h = channel::sample_realization(pdp, 0, chan_rng);
  CHECK(sample_estimate_error(h, cfg, rng)[1] == cplx{0.0, 0.0});

  for (double frac : {1.0, 0.5}) {
    cfg.eps_frac = frac;
    RngStream r(split_mix64(static_cast<std::uint64_t>(frac * 8)));
    RngStream cr(split_mix64(77));
    double ratio = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      h = channel::sample_realization(pdp, i, cr);
      const auto eps = sample_estimate_error(h, cfg, r);
      ratio += std::norm(eps[1]) / std::norm(h.taps[1]);
      CHECK(eps[0] == cplx{0.0, 0.0});  // only attacked taps carry error
    }
    CHECK(ratio / n == doctest::Approx(frac * frac).epsilon(0.02));
  }
}

TEST_CASE("attack application") {
  // Perfect estimate: exact sign flip.
  CHECK(apply_attack({1.0, 0.0}, {0.0, 0.0}, 1, true) == cplx{-1.0, 0.0});
  // eps = 0.5, h = 1, x = +1 flipped: -(h + 2 eps) = -2.
  CHECK(apply_attack({1.0, 0.0}, {0.5, 0.0}, 1, true) == cplx{-2.0, 0.0});
  // Unflipped symbols are untouched for any eps.
  CHECK(apply_attack({0.3, -0.2}, {5.0, 5.0}, -1, false) == cplx{-0.3, 0.2});
}
