#include "flipsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flipsim::sim {

int frames_per_block(const LinkConfig& cfg) {
  const int dpf = data_symbols_per_frame(cfg);
  if (dpf < 1) throw std::invalid_argument("link config: no data symbols per frame");
  const int coded = turbo::coded_length(cfg.code);
  return (coded + dpf - 1) / dpf;
}

FrameObservations observe_frame(const LinkConfig& cfg,
                                std::span<const int> symbols,
                                std::span<const int> pilot_positions,
                                double sigma2, std::uint64_t master,
                                int snr_index, long block, long frame_in_block,
                                long frame_counter) {
  const int L = cfg.frame_len;
  const int num_taps = cfg.pdp.num_taps();
  if (static_cast<int>(symbols.size()) != L)
    throw std::length_error("observe_frame: symbol count != frame length");

  const std::uint64_t snr_u = static_cast<std::uint64_t>(snr_index);
  const std::uint64_t blk_u = static_cast<std::uint64_t>(block);
  const std::uint64_t frm_u = static_cast<std::uint64_t>(frame_in_block);

  FrameObservations o;
  if (cfg.fixed_taps.empty()) {
    RngStream chan_rng(
        stream_seed(master, Stream::Channel, {snr_u, blk_u, frm_u}));
    o.chan = channel::sample_realization(cfg.pdp, frame_counter, chan_rng);
  } else {
    if (static_cast<int>(cfg.fixed_taps.size()) != num_taps)
      throw std::invalid_argument("observe_frame: fixed_taps/pdp size mismatch");
    o.chan.taps = cfg.fixed_taps;
    o.chan.frame_index = frame_counter;
  }

  RngStream atk_rng(stream_seed(master, Stream::Attacker, {snr_u, blk_u, frm_u}));
  o.eps = attacker::sample_estimate_error(o.chan, cfg.attack, atk_rng);
  o.mask = attacker::plan_flips(L, pilot_positions, num_taps, cfg.attack, atk_rng);

  RngStream noise(stream_seed(master, Stream::Noise, {snr_u, blk_u, frm_u}));
  o.taps.assign(num_taps, std::vector<cplx>(L));
  if (!cfg.chip_level) {
    for (int k = 0; k < L; ++k) {
      for (int l = 0; l < num_taps; ++l) {
        const cplx signal = attacker::apply_attack(
            o.chan.taps[l], o.eps[l], symbols[k], o.mask.flipped(l, k));
        o.taps[l][k] = signal + noise.cgaussian(sigma2);
      }
    }
  } else {
    const dsss::SpreadingCode code = dsss::generate_code(cfg.code_key, cfg.spread_n);
    const int n = code.length();
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> stream(static_cast<std::size_t>(L) * n);
    for (int l = 0; l < num_taps; ++l) {
      for (int k = 0; k < L; ++k) {
        const cplx signal = amp * attacker::apply_attack(
            o.chan.taps[l], o.eps[l], symbols[k], o.mask.flipped(l, k));
        for (int i = 0; i < n; ++i)
          stream[static_cast<std::size_t>(k) * n + i] =
              signal * static_cast<double>(code.chips[i]) + noise.cgaussian(sigma2);
      }
      o.taps[l] = dsss::rake_despread(stream, code);
    }
  }
  return o;
}

FrameDecode decode_frame(const LinkConfig& cfg, const FrameObservations& obs,
                         const receiver::Frame& frame, double sigma2) {
  const int L = cfg.frame_len;
  const int num_pilots = frame.num_pilots();
  const auto& strategy = cfg.strategy;
  const double sigma = std::sqrt(sigma2);

  FrameDecode out;
  out.llrs.assign(L, 0.0);

  // Per-tap pilot observations.
  std::vector<std::vector<cplx>> pilot_obs(obs.taps.size());
  for (std::size_t l = 0; l < obs.taps.size(); ++l) {
    pilot_obs[l].resize(num_pilots);
    for (int i = 0; i < num_pilots; ++i)
      pilot_obs[l][i] = obs.taps[l][frame.pilot_positions[i]];
  }

  enum class TapMode { Plain, Smart, Skip };
  std::vector<TapMode> mode(obs.taps.size(), TapMode::Skip);
  std::vector<cplx> gain(obs.taps.size(), cplx{0.0, 0.0});
  std::vector<receiver::TapStatistics> stats(obs.taps.size());

  for (int l : strategy.taps) {
    if (strategy.kind == receiver::Strategy::Kind::FixedTaps) {
      mode[l] = TapMode::Plain;
      gain[l] = receiver::estimate_channel(pilot_obs[l], frame.pilot_values);
      continue;
    }
    // Coherent polarity test. The model treats the receiver's channel
    // knowledge as exact, so the true gain serves as the reference; the
    // cluster statistics fed to the combiner still come from the pilots.
    const std::vector<char> flipped = receiver::classify_pilot_flips(
        pilot_obs[l], frame.pilot_values, obs.chan.taps[l]);
    const bool tap_detected =
        std::any_of(flipped.begin(), flipped.end(), [](char c) { return c != 0; });
    if (l != 0 && tap_detected) out.detected = true;

    if (l == 0 || !tap_detected) {
      // Main tap is never droppable: its timing makes it unattackable.
      mode[l] = TapMode::Plain;
      gain[l] = receiver::estimate_channel(pilot_obs[l], frame.pilot_values);
      continue;
    }
    if (strategy.kind == receiver::Strategy::Kind::DropDetected) continue;

    receiver::TapStatistics st = receiver::estimate_attack_statistics(
        pilot_obs[l], frame.pilot_values, flipped, sigma);
    if (st.gate_passed) {
      mode[l] = TapMode::Smart;
      stats[l] = st;
      out.gate_passed = true;
    }
    // Gate failed: the offset is not separable, fall back to dropping the tap.
  }

  std::vector<cplx> y_inc, g_inc;
  y_inc.reserve(strategy.taps.size());
  g_inc.reserve(strategy.taps.size());
  for (int k = 0; k < L; ++k) {
    y_inc.clear();
    g_inc.clear();
    for (int l : strategy.taps) {
      switch (mode[l]) {
        case TapMode::Plain:
          y_inc.push_back(obs.taps[l][k]);
          g_inc.push_back(gain[l]);
          break;
        case TapMode::Smart: {
          const receiver::SmartDecision d = receiver::smart_combine(
              obs.taps[l][k], stats[l], sigma2, strategy.delta_th);
          if (d.action == receiver::SmartAction::Keep) {
            y_inc.push_back(obs.taps[l][k]);
            g_inc.push_back(stats[l].h_hat);
          } else if (d.action == receiver::SmartAction::FlipPolarity) {
            y_inc.push_back(-obs.taps[l][k]);
            g_inc.push_back(stats[l].h_attack_hat);
          }
          break;
        }
        case TapMode::Skip:
          break;
      }
    }
    if (!y_inc.empty()) out.llrs[k] = receiver::symbol_llr(y_inc, g_inc, sigma2);
  }
  return out;
}

BlockResult run_coded_block(const LinkConfig& cfg, double sigma2,
                            std::uint64_t master, int snr_index, long block) {
  const int k_info = cfg.code.info_length;
  const int L = cfg.frame_len;
  const int num_frames = frames_per_block(cfg);

  RngStream data_rng(stream_seed(master, Stream::Data,
                                 {static_cast<std::uint64_t>(snr_index),
                                  static_cast<std::uint64_t>(block)}));
  std::vector<std::uint8_t> info(k_info);
  for (auto& b : info) b = data_rng.bernoulli(0.5) ? 1 : 0;
  const turbo::CodedBlock coded = turbo::encode(info, cfg.code);
  const int coded_len = static_cast<int>(coded.coded_bits.size());

  BlockResult res;
  res.frames = num_frames;
  std::vector<double> llrs;
  llrs.reserve(coded_len);
  std::vector<int> tx(L);
  std::vector<char> is_pilot(L);

  int consumed = 0;
  for (int f = 0; f < num_frames; ++f) {
    const long frame_counter = block * static_cast<long>(num_frames) + f;
    const receiver::Frame frame = receiver::place_pilots(
        cfg.pilot_key, static_cast<std::uint64_t>(frame_counter), L,
        cfg.num_pilots);

    std::fill(is_pilot.begin(), is_pilot.end(), 0);
    for (int i = 0; i < frame.num_pilots(); ++i)
      is_pilot[frame.pilot_positions[i]] = 1;
    int cursor = consumed;
    {
      int pi = 0;
      for (int k = 0; k < L; ++k) {
        if (is_pilot[k]) {
          tx[k] = frame.pilot_values[pi++];
        } else if (cursor < coded_len) {
          tx[k] = coded.coded_bits[cursor++] ? -1 : 1;
        } else {
          tx[k] = 1;  // filler past the end of the block
        }
      }
    }

    const FrameObservations obs =
        observe_frame(cfg, tx, frame.pilot_positions, sigma2, master, snr_index,
                      block, f, frame_counter);
    const FrameDecode dec = decode_frame(cfg, obs, frame, sigma2);
    res.gate_passed |= dec.gate_passed;
    res.detected |= dec.detected;

    for (int k = 0; k < L && consumed < coded_len; ++k) {
      if (is_pilot[k]) continue;
      llrs.push_back(dec.llrs[k]);
      ++consumed;
    }
  }
  if (consumed != coded_len)
    throw std::logic_error("run_coded_block: coded bits not fully mapped");

  const std::vector<std::uint8_t> decoded = turbo::decode(llrs, cfg.code);
  for (int i = 0; i < k_info; ++i)
    if (decoded[i] != info[i]) ++res.bit_errors;
  return res;
}

PointResult run_ber_point(const LinkConfig& cfg, double sigma2,
                          std::uint64_t master, int snr_index,
                          long long min_error_events, long long min_info_bits,
                          long long max_info_bits, Exec exec) {
  const long long k_info = cfg.code.info_length;
  if (max_info_bits < k_info)
    throw std::invalid_argument("run_ber_point: budget below one code block");
  const long max_blocks =
      static_cast<long>((max_info_bits + k_info - 1) / k_info);
  const bool parallel = exec == Exec::Parallel;
  constexpr long kWave = 16;

  PointResult res;
  while (true) {
    const long start = res.blocks;
    const long end = std::min(start + kWave, max_blocks);
    long long errs = 0;
    long frames = 0;
    int gate = 0, det = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : errs, frames, gate, det) if (parallel)
    for (long b = start; b < end; ++b) {
      const BlockResult r = run_coded_block(cfg, sigma2, master, snr_index, b);
      errs += r.bit_errors;
      frames += r.frames;
      gate += r.gate_passed ? 1 : 0;
      det += r.detected ? 1 : 0;
    }
    res.bit_errors += errs;
    res.frames += frames;
    res.gate_passed |= gate > 0;
    res.detected |= det > 0;
    res.blocks = end;
    res.bits = static_cast<long long>(end) * k_info;
    if (res.bit_errors >= min_error_events && res.bits >= min_info_bits) break;
    if (res.blocks >= max_blocks) {
      res.budget_exhausted = res.bit_errors < min_error_events;
      break;
    }
  }
  return res;
}

UncodedResult run_uncoded(const LinkConfig& cfg, double sigma2,
                          long long n_symbols, std::uint64_t master, Exec exec) {
  const int L = cfg.frame_len;
  const long frames = static_cast<long>((n_symbols + L - 1) / L);
  const bool parallel = exec == Exec::Parallel;
  const std::vector<int> no_pilots;

  long long errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors) if (parallel)
  for (long f = 0; f < frames; ++f) {
    RngStream data_rng(stream_seed(master, Stream::Data,
                                   {0, static_cast<std::uint64_t>(f)}));
    std::vector<int> tx(L);
    for (int& s : tx) s = data_rng.bernoulli(0.5) ? 1 : -1;
    const FrameObservations obs =
        observe_frame(cfg, tx, no_pilots, sigma2, master, 0, f, 0, f);
    std::vector<cplx> y(obs.taps.size());
    for (int k = 0; k < L; ++k) {
      for (std::size_t l = 0; l < obs.taps.size(); ++l) y[l] = obs.taps[l][k];
      const int decided =
          receiver::ml_decode_uncoded(y, obs.chan.taps, cfg.strategy.taps);
      if (decided != tx[k]) ++errors;
    }
  }
  return {errors, static_cast<long long>(frames) * L};
}

}  // namespace flipsim::sim
