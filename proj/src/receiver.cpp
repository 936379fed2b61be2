#include "flipsim/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flipsim::receiver {
namespace {

double log_choose(int n, int r) { return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0); }

inline double q_function(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

// log(exp(a) + exp(b)) without overflow.
inline double log_sum_exp(double a, double b) {
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace

Frame place_pilots(std::uint64_t key, std::uint64_t frame_index, int frame_len,
                   int num_pilots) {
  if (num_pilots > frame_len || num_pilots < 1 || frame_len < 1)
    throw std::invalid_argument("place_pilots: need 1 <= num_pilots <= frame_len");
  RngStream rng(stream_seed(key, Stream::Pilot, {frame_index}));

  // Partial Fisher-Yates draw of num_pilots distinct positions.
  std::vector<int> idx(frame_len);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < num_pilots; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(
                          static_cast<std::uint64_t>(frame_len - i)));
    std::swap(idx[i], idx[j]);
  }
  Frame frame;
  frame.length = frame_len;
  frame.pilot_positions.assign(idx.begin(), idx.begin() + num_pilots);
  std::sort(frame.pilot_positions.begin(), frame.pilot_positions.end());
  frame.pilot_values.resize(num_pilots);
  for (int i = 0; i < num_pilots; ++i)
    frame.pilot_values[i] = rng.bernoulli(0.5) ? 1 : -1;
  return frame;
}

cplx estimate_channel(std::span<const cplx> pilot_obs,
                      std::span<const int> pilot_values) {
  if (pilot_obs.empty() || pilot_obs.size() != pilot_values.size())
    throw std::invalid_argument("estimate_channel: empty or mismatched pilots");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < pilot_obs.size(); ++i)
    acc += pilot_obs[i] * static_cast<double>(pilot_values[i]);
  return acc / static_cast<double>(pilot_obs.size());
}

std::vector<char> classify_pilot_flips(std::span<const cplx> pilot_obs,
                                       std::span<const int> pilot_values,
                                       cplx reference) {
  if (pilot_obs.size() != pilot_values.size())
    throw std::invalid_argument("classify_pilot_flips: size mismatch");
  std::vector<char> flipped(pilot_obs.size(), 0);
  for (std::size_t i = 0; i < pilot_obs.size(); ++i) {
    const cplx u = pilot_obs[i] * static_cast<double>(pilot_values[i]);
    flipped[i] = (u.real() * reference.real() + u.imag() * reference.imag()) < 0.0;
  }
  return flipped;
}

DetectionReport detect_attack(std::span<const cplx> pilot_obs,
                              std::span<const int> pilot_values,
                              cplx reference) {
  DetectionReport report;
  const std::vector<char> flipped =
      classify_pilot_flips(pilot_obs, pilot_values, reference);
  for (std::size_t i = 0; i < flipped.size(); ++i)
    if (flipped[i]) report.flipped_pilot_indices.push_back(static_cast<int>(i));
  report.attacked = !report.flipped_pilot_indices.empty();
  return report;
}

double polarity_flip_probability(cplx h, double sigma2) {
  if (sigma2 <= 0.0)
    throw std::invalid_argument("polarity_flip_probability: sigma2 must be > 0");
  return q_function(std::abs(h) * std::sqrt(2.0 / sigma2));
}

double normal_quantile_upper(double q) {
  if (q <= 0.0 || q >= 1.0)
    throw std::invalid_argument("normal_quantile_upper: q must be in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double sigma2_for_flip_probability(double q, double h_mag) {
  const double t = normal_quantile_upper(q);
  if (t <= 0.0)
    throw std::invalid_argument("sigma2_for_flip_probability: q must be < 0.5");
  return 2.0 * h_mag * h_mag / (t * t);
}

double misdetection_probability(int frame_len, int num_pilots, double flip_prob,
                                double q) {
  const int L = frame_len;
  const int Lp = num_pilots;
  if (Lp < 0 || Lp > L || L < 1)
    throw std::invalid_argument("misdetection_probability: bad frame sizes");
  if (flip_prob < 0.0 || flip_prob > 1.0 || q < 0.0 || q > 1.0)
    throw std::invalid_argument("misdetection_probability: p,q must be in [0,1]");
  if (flip_prob == 0.0) return 0.0;

  const double log_p = std::log(flip_prob);
  const double log_1mp = flip_prob < 1.0 ? std::log1p(-flip_prob) : 0.0;
  const double log_q = q > 0.0 ? std::log(q) : 0.0;

  double total = 0.0;
  for (int j = 1; j <= L; ++j) {
    if (flip_prob == 1.0 && j < L) continue;  // (1-p)^{L-j} vanishes
    const double log_w = j * log_p + (L - j) * log_1mp;
    double inner = 0.0;
    const int x_lo = std::max(0, j - (L - Lp));
    const int x_hi = std::min(j, Lp);
    for (int x = x_lo; x <= x_hi; ++x) {
      if (q == 0.0 && x > 0) break;  // q^x kills every term past x = 0
      inner += std::exp(log_choose(Lp, x) + log_choose(L - Lp, j - x) + x * log_q);
    }
    total += std::exp(log_w) * inner;
  }
  return total;
}

double false_alarm_probability(int num_pilots, double q) {
  if (num_pilots < 0 || q < 0.0 || q > 1.0)
    throw std::invalid_argument("false_alarm_probability: bad arguments");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return num_pilots > 0 ? 1.0 : 0.0;
  return -std::expm1(num_pilots * std::log1p(-q));
}

TapStatistics estimate_attack_statistics(std::span<const cplx> pilot_obs,
                                         std::span<const int> pilot_values,
                                         std::span<const char> flipped,
                                         double sigma) {
  if (pilot_obs.size() != pilot_values.size() ||
      pilot_obs.size() != flipped.size())
    throw std::invalid_argument("estimate_attack_statistics: size mismatch");
  TapStatistics stats;
  cplx clean{0.0, 0.0}, hit{0.0, 0.0};
  for (std::size_t i = 0; i < pilot_obs.size(); ++i) {
    const cplx u = pilot_obs[i] * static_cast<double>(pilot_values[i]);
    if (flipped[i]) {
      hit += -u;  // flipped cluster centre is -(h + 2*eps)
      ++stats.flipped_count;
    } else {
      clean += u;
      ++stats.unflipped_count;
    }
  }
  if (stats.unflipped_count > 0)
    stats.h_hat = clean / static_cast<double>(stats.unflipped_count);
  if (stats.flipped_count > 0)
    stats.h_attack_hat = hit / static_cast<double>(stats.flipped_count);
  stats.gate_passed = stats.flipped_count > 0 && stats.unflipped_count > 0 &&
                      std::abs(stats.h_attack_hat - stats.h_hat) > 2.0 * sigma;
  return stats;
}

SmartDecision smart_combine(cplx y, const TapStatistics& stats, double sigma2,
                            double delta_th) {
  if (!stats.gate_passed)
    throw std::invalid_argument("smart_combine: statistics gate not passed");
  if (delta_th < 0.0)
    throw std::invalid_argument("smart_combine: delta_th must be >= 0");
  const cplx ha = stats.h_attack_hat;
  const cplx h = stats.h_hat;
  const double inv = 1.0 / sigma2;
  const double num = log_sum_exp(-std::norm(y - ha) * inv, -std::norm(y + ha) * inv);
  const double den = log_sum_exp(-std::norm(y - h) * inv, -std::norm(y + h) * inv);
  SmartDecision d;
  d.confidence = num - den;
  if (d.confidence > delta_th)
    d.action = SmartAction::FlipPolarity;
  else if (d.confidence < -delta_th)
    d.action = SmartAction::Keep;
  else
    d.action = SmartAction::Discard;
  return d;
}

double symbol_llr(std::span<const cplx> obs, std::span<const cplx> gains,
                  double sigma2) {
  if (obs.empty() || obs.size() != gains.size())
    throw std::invalid_argument("symbol_llr: empty or mismatched taps");
  double acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i)
    acc += obs[i].real() * gains[i].real() + obs[i].imag() * gains[i].imag();
  return 4.0 * acc / sigma2;
}

int ml_decode_uncoded(std::span<const cplx> obs, std::span<const cplx> gains,
                      std::span<const int> taps) {
  if (taps.empty()) throw std::invalid_argument("ml_decode_uncoded: no taps");
  double cost_plus = 0.0, cost_minus = 0.0;
  for (int l : taps) {
    cost_plus += std::norm(obs[l] - gains[l]);
    cost_minus += std::norm(obs[l] + gains[l]);
  }
  return cost_plus <= cost_minus ? 1 : -1;
}

}  // namespace flipsim::receiver
