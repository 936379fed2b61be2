#include "flipsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flipsim/attacker.hpp"
#include "flipsim/receiver.hpp"

namespace flipsim::metrics {

BerRecord ber_accumulate(std::span<const BerRecord> records) {
  if (records.empty()) throw std::invalid_argument("ber_accumulate: empty input");
  BerRecord out = records.front();
  out.bit_errors = 0;
  out.bits_total = 0;
  out.frames = 0;
  for (const BerRecord& r : records) {
    if (r.scenario_id != out.scenario_id || r.snr_db != out.snr_db)
      throw std::invalid_argument("ber_accumulate: mixed scenarios");
    if (r.bit_errors > r.bits_total)
      throw std::invalid_argument("ber_accumulate: errors exceed bits");
    out.bit_errors += r.bit_errors;
    out.bits_total += r.bits_total;
    out.frames += r.frames;
  }
  return out;
}

Wilson wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (centre - half) / denom),
          std::min(1.0, (centre + half) / denom)};
}

MiEstimate mutual_information_plugin(
    std::span<const std::pair<int, cplx>> samples, int bins) {
  if (samples.size() < 10000)
    throw std::invalid_argument("mutual_information_plugin: need >= 1e4 samples");
  if (bins < 8)
    throw std::invalid_argument("mutual_information_plugin: need >= 8 bins");

  double mr = 0.0, mi = 0.0;
  for (const auto& [x, y] : samples) {
    (void)x;
    mr += y.real();
    mi += y.imag();
  }
  const double n = static_cast<double>(samples.size());
  mr /= n;
  mi /= n;
  double vr = 0.0, vi = 0.0;
  for (const auto& [x, y] : samples) {
    (void)x;
    vr += (y.real() - mr) * (y.real() - mr);
    vi += (y.imag() - mi) * (y.imag() - mi);
  }
  const double sr = std::sqrt(vr / n);
  const double si = std::sqrt(vi / n);
  const double lo_r = mr - 4.0 * sr, w_r = 8.0 * sr / bins;
  const double lo_i = mi - 4.0 * si, w_i = 8.0 * si / bins;

  auto bin_of = [bins](double v, double lo, double w) {
    if (w <= 0.0) return bins / 2;  // degenerate axis
    const int b = static_cast<int>(std::floor((v - lo) / w));
    return std::clamp(b, 0, bins - 1);
  };

  std::vector<long long> joint(2 * static_cast<std::size_t>(bins) * bins, 0);
  long long nx[2] = {0, 0};
  std::vector<long long> ny(static_cast<std::size_t>(bins) * bins, 0);
  for (const auto& [x, y] : samples) {
    if (x != 1 && x != -1)
      throw std::invalid_argument("mutual_information_plugin: x must be +-1");
    const int xi = x > 0 ? 1 : 0;
    const int cell = bin_of(y.real(), lo_r, w_r) * bins + bin_of(y.imag(), lo_i, w_i);
    ++joint[static_cast<std::size_t>(xi) * bins * bins + cell];
    ++nx[xi];
    ++ny[cell];
  }

  double info = 0.0;
  for (int xi = 0; xi < 2; ++xi) {
    if (nx[xi] == 0) continue;
    const double px = nx[xi] / n;
    for (int cell = 0; cell < bins * bins; ++cell) {
      const long long c = joint[static_cast<std::size_t>(xi) * bins * bins + cell];
      if (c == 0) continue;
      const double pxy = c / n;
      const double py = ny[cell] / n;
      info += pxy * std::log2(pxy / (px * py));
    }
  }
  return {std::max(0.0, info), bins, static_cast<long long>(samples.size())};
}

namespace {

struct DetectionCounts {
  long long attacked_frames = 0;  // frames with >= 1 flipped symbol
  long long missed = 0;           // of those, frames with no flagged pilot
  long long clean_frames = 0;     // attack-free frames
  long long false_alarms = 0;     // of those, frames with a flagged pilot
};

// One frame of the single-tap detection experiment; the modeled tap is the
// second of a two-tap channel so the attacker config stays in its normal
// shape (tap 0 untouchable).
void detection_frame(const DetectionScenario& scn, bool attack,
                     std::uint64_t seed, long frame, DetectionCounts& counts) {
  const receiver::Frame layout = receiver::place_pilots(
      stream_seed(seed, Stream::Pilot, {static_cast<std::uint64_t>(frame)}), 0,
      scn.frame_len, scn.num_pilots);

  attacker::AttackerConfig cfg;
  cfg.flip_prob = scn.flip_prob;
  cfg.pilot_aware = scn.pilot_aware;
  if (attack) cfg.attacked_taps = {1};
  RngStream atk_rng(stream_seed(seed, Stream::Attacker,
                                {static_cast<std::uint64_t>(frame)}));
  const attacker::FlipMask mask =
      attacker::plan_flips(scn.frame_len, layout.pilot_positions, 2, cfg, atk_rng);

  RngStream noise(stream_seed(seed, Stream::Noise,
                              {static_cast<std::uint64_t>(frame)}));
  std::vector<cplx> pilot_obs(layout.pilot_positions.size());
  // Noise is drawn for every symbol period so the stream is identical with
  // and without the attack.
  std::size_t pi = 0;
  for (int k = 0; k < scn.frame_len; ++k) {
    const cplx z = noise.cgaussian(scn.sigma2);
    const bool is_pilot = pi < layout.pilot_positions.size() &&
                          layout.pilot_positions[pi] == k;
    if (!is_pilot) continue;
    const int x = layout.pilot_values[pi];
    const double sign = mask.flipped(1, k) ? -1.0 : 1.0;
    pilot_obs[pi] = sign * scn.h * static_cast<double>(x) + z;
    ++pi;
  }

  const receiver::DetectionReport report =
      receiver::detect_attack(pilot_obs, layout.pilot_values, scn.h);
  if (attack) {
    if (!mask.any_flip()) return;  // conditioning: at least one flip landed
    ++counts.attacked_frames;
    if (!report.attacked) ++counts.missed;
  } else {
    ++counts.clean_frames;
    if (report.attacked) ++counts.false_alarms;
  }
}

}  // namespace

DetectionRates empirical_detection_rates(const DetectionScenario& scenario,
                                         long frames, std::uint64_t seed,
                                         bool parallel) {
  if (frames < 10000)
    throw std::invalid_argument("empirical_detection_rates: need >= 1e4 frames");

  long long attacked = 0, missed = 0, clean = 0, alarms = 0;
#pragma omp parallel for schedule(static) reduction(+ : attacked, missed, clean, alarms) if (parallel)
  for (long f = 0; f < frames; ++f) {
    DetectionCounts local;
    detection_frame(scenario, true, seed, f, local);
    detection_frame(scenario, false, derive_seed({seed, 0xfa15eULL}), f, local);
    attacked += local.attacked_frames;
    missed += local.missed;
    clean += local.clean_frames;
    alarms += local.false_alarms;
  }

  DetectionRates rates;
  rates.p_miss.events = missed;
  rates.p_miss.trials = attacked;
  rates.p_miss.rate = attacked > 0 ? static_cast<double>(missed) / attacked : 0.0;
  rates.p_miss.ci = wilson_interval(missed, attacked, 3.0);
  rates.p_false.events = alarms;
  rates.p_false.trials = clean;
  rates.p_false.rate = clean > 0 ? static_cast<double>(alarms) / clean : 0.0;
  rates.p_false.ci = wilson_interval(alarms, clean, 3.0);
  return rates;
}

}  // namespace flipsim::metrics
