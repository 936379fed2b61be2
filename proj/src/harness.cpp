#include "flipsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "flipsim/metrics.hpp"

namespace flipsim::harness {
namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(strip(item));
  return out;
}

std::vector<int> parse_tap_digits(const std::string& digits, int num_taps,
                                  const std::string& what) {
  if (digits.empty()) throw ConfigError("scenario: empty " + what + " tap list");
  std::vector<int> taps;
  for (char c : digits) {
    if (c < '1' || c > '9') throw ConfigError("scenario: bad tap digit in " + what);
    const int tap = c - '1';  // 1-based in the legend, 0-based internally
    if (tap >= num_taps)
      throw ConfigError("scenario: tap index exceeds channel taps in " + what);
    if (std::find(taps.begin(), taps.end(), tap) != taps.end())
      throw ConfigError("scenario: duplicate tap in " + what);
    taps.push_back(tap);
  }
  std::sort(taps.begin(), taps.end());
  return taps;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

Scenario parse_scenario(const std::string& id, int num_taps) {
  std::string compact;
  for (char c : id)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);

  const auto comma = compact.find(',');
  if (comma == std::string::npos)
    throw ConfigError("scenario: expected \"A-...,C-...\" form: " + id);
  const std::string attack_part = compact.substr(0, comma);
  const std::string combine_part = compact.substr(comma + 1);

  if (attack_part.rfind("A-", 0) != 0)
    throw ConfigError("scenario: missing A- prefix: " + id);
  Scenario s;
  const std::string attack_spec = attack_part.substr(2);
  if (attack_spec != "none") {
    s.attacked_taps = parse_tap_digits(attack_spec, num_taps, "attack");
    if (!s.attacked_taps.empty() && s.attacked_taps.front() == 0)
      throw ConfigError("scenario: the main tap cannot be attacked: " + id);
  }

  std::string combine_spec;
  if (combine_part.rfind("SC-", 0) == 0) {
    s.smart = true;
    combine_spec = combine_part.substr(3);
  } else if (combine_part.rfind("C-", 0) == 0) {
    combine_spec = combine_part.substr(2);
  } else {
    throw ConfigError("scenario: expected C- or SC- combining: " + id);
  }
  s.combine_taps = parse_tap_digits(combine_spec, num_taps, "combine");
  s.id = format_scenario(s);
  return s;
}

std::string format_scenario(const Scenario& s) {
  std::string id = "A-";
  if (s.attacked_taps.empty()) {
    id += "none";
  } else {
    for (int t : s.attacked_taps) id += static_cast<char>('1' + t);
  }
  id += s.smart ? ",SC-" : ",C-";
  for (int t : s.combine_taps) id += static_cast<char>('1' + t);
  return id;
}

namespace {

class KvReader {
 public:
  explicit KvReader(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = strip(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = strip(line.substr(0, eq));
      const std::string val = strip(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key or value");
      kv_[key] = val;
    }
  }

  bool take(const std::string& key, std::string& out) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return false;
    out = it->second;
    kv_.erase(it);
    return true;
  }

  void take_double(const std::string& key, double& out) {
    std::string v;
    if (take(key, v)) out = to_double(key, v);
  }
  void take_int(const std::string& key, int& out) {
    std::string v;
    if (take(key, v)) out = static_cast<int>(to_ll(key, v));
  }
  void take_ll(const std::string& key, long long& out) {
    std::string v;
    if (take(key, v)) out = to_ll(key, v);
  }
  void take_long(const std::string& key, long& out) {
    std::string v;
    if (take(key, v)) out = static_cast<long>(to_ll(key, v));
  }
  void take_u64(const std::string& key, std::uint64_t& out) {
    std::string v;
    if (take(key, v)) {
      try {
        out = std::stoull(v);
      } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned value for " + key);
      }
    }
  }
  void take_bool(const std::string& key, bool& out) {
    std::string v;
    if (take(key, v)) out = to_bool(key, v);
  }
  void take_opt_bool(const std::string& key, std::optional<bool>& out) {
    std::string v;
    if (take(key, v)) out = to_bool(key, v);
  }
  void take_opt_double(const std::string& key, std::optional<double>& out) {
    std::string v;
    if (take(key, v)) out = to_double(key, v);
  }
  void take_double_list(const std::string& key, std::vector<double>& out) {
    std::string v;
    if (take(key, v)) {
      out.clear();
      for (const std::string& item : split(v, ','))
        out.push_back(to_double(key, item));
    }
  }
  void take_int_list(const std::string& key, std::vector<int>& out) {
    std::string v;
    if (take(key, v)) {
      out.clear();
      for (const std::string& item : split(v, ','))
        out.push_back(static_cast<int>(to_ll(key, item)));
    }
  }

  // Either "start:stop:step" or an explicit comma list.
  void take_grid(const std::string& key, std::vector<double>& out) {
    std::string v;
    if (!take(key, v)) return;
    out.clear();
    if (v.find(':') != std::string::npos) {
      const auto parts = split(v, ':');
      if (parts.size() != 3)
        throw ConfigError("config: " + key + " grid must be start:stop:step");
      const double start = to_double(key, parts[0]);
      const double stop = to_double(key, parts[1]);
      const double step = to_double(key, parts[2]);
      if (step <= 0.0) throw ConfigError("config: " + key + " step must be > 0");
      for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
    } else {
      for (const std::string& item : split(v, ','))
        out.push_back(to_double(key, item));
    }
  }

  void finish() const {
    if (!kv_.empty())
      throw ConfigError("config: unknown key: " + kv_.begin()->first);
  }

 private:
  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config: bad numeric value for " + key + ": " + v);
    }
  }
  static long long to_ll(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d))
      throw ConfigError("config: expected integer for " + key + ": " + v);
    return static_cast<long long>(d);
  }
  static bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  KvReader kv(text);
  ExperimentConfig cfg;

  std::string scenario_str = "A-none,C-12";
  kv.take("scenario", scenario_str);
  kv.take_double_list("pdp", cfg.pdp_powers);
  kv.take_int_list("tap_delays", cfg.tap_delays);
  kv.take_grid("snr_db", cfg.snr_grid_db);
  kv.take_double("flip_prob", cfg.flip_prob);
  kv.take_double("eps_frac", cfg.eps_frac);
  kv.take_opt_bool("pilot_aware", cfg.pilot_aware);
  kv.take_opt_double("delta_th", cfg.delta_th);
  kv.take_int("frame_len", cfg.frame_len);
  kv.take_int("num_pilots", cfg.num_pilots);
  kv.take_int("spread_n", cfg.spread_n);
  kv.take_bool("chip_level", cfg.chip_level);
  kv.take_int("block_info_bits", cfg.block_info_bits);
  kv.take_int("turbo_iterations", cfg.turbo_iterations);
  kv.take_ll("min_error_events", cfg.min_error_events);
  kv.take_ll("min_info_bits", cfg.min_info_bits);
  kv.take_ll("max_info_bits", cfg.max_info_bits);
  kv.take_long("detect_frames", cfg.detect_frames);
  kv.take_int_list("lp_values", cfg.lp_values);
  kv.take_double_list("q_values", cfg.q_values);
  kv.take_ll("mi_samples", cfg.mi_samples);
  kv.take_int("mi_bins", cfg.mi_bins);
  kv.take_double_list("mi_flip_probs", cfg.mi_flip_probs);
  kv.take_u64("seed", cfg.seed);
  kv.take_bool("parallel", cfg.parallel);
  kv.finish();

  cfg.scenario =
      parse_scenario(scenario_str, static_cast<int>(cfg.pdp_powers.size()));
  finalize(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return parse_config_text("");
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void finalize(ExperimentConfig& cfg) {
  if (cfg.snr_grid_db.empty())
    for (int s = 0; s <= 14; ++s) cfg.snr_grid_db.push_back(s);
  if (cfg.lp_values.empty())
    for (int lp = 1; lp <= 20; ++lp) cfg.lp_values.push_back(lp);
  if (!cfg.pilot_aware.has_value()) cfg.pilot_aware = !cfg.scenario.smart;
  if (!cfg.delta_th.has_value())
    cfg.delta_th = cfg.pdp_powers.size() <= 2 ? 0.5 : 1.0;

  if (cfg.block_info_bits < 1 || cfg.turbo_iterations < 1)
    throw ConfigError("config: block_info_bits and turbo_iterations must be >= 1");
  if (cfg.max_info_bits < cfg.block_info_bits)
    throw ConfigError("config: max_info_bits below one code block");
  if (cfg.num_pilots < 1 || cfg.num_pilots >= cfg.frame_len)
    throw ConfigError("config: need 1 <= num_pilots < frame_len");
  if (cfg.flip_prob < 0.0 || cfg.flip_prob > 1.0)
    throw ConfigError("config: flip_prob must be in [0,1]");
  if (cfg.eps_frac < 0.0) throw ConfigError("config: eps_frac must be >= 0");
  if (*cfg.delta_th < 0.0) throw ConfigError("config: delta_th must be >= 0");
  if (cfg.spread_n < 1) throw ConfigError("config: spread_n must be >= 1");
  if (cfg.min_error_events < 1)
    throw ConfigError("config: min_error_events must be >= 1");
  if (cfg.detect_frames < 10000)
    throw ConfigError("config: detect_frames must be >= 1e4");
  if (cfg.mi_bins < 8) throw ConfigError("config: mi_bins must be >= 8");
  for (double q : cfg.q_values)
    if (q <= 0.0 || q >= 0.5)
      throw ConfigError("config: q_values must lie in (0, 0.5)");
}

sim::LinkConfig make_link_config(const ExperimentConfig& cfg) {
  sim::LinkConfig link;
  try {
    link.pdp = channel::make_pdp(cfg.pdp_powers, cfg.tap_delays);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  link.attack.attacked_taps = cfg.scenario.attacked_taps;
  link.attack.flip_prob = cfg.flip_prob;
  link.attack.eps_frac = cfg.eps_frac;
  link.attack.pilot_aware = *cfg.pilot_aware;
  link.strategy.kind = cfg.scenario.smart
                           ? receiver::Strategy::Kind::SmartCombine
                           : receiver::Strategy::Kind::FixedTaps;
  link.strategy.taps = cfg.scenario.combine_taps;
  link.strategy.delta_th = *cfg.delta_th;
  link.frame_len = cfg.frame_len;
  link.num_pilots = cfg.num_pilots;
  link.spread_n = cfg.spread_n;
  link.chip_level = cfg.chip_level;
  link.code.info_length = cfg.block_info_bits;
  link.code.iterations = cfg.turbo_iterations;
  link.code.interleaver_seed = derive_seed({cfg.seed, 0x17ea7eULL});
  link.pilot_key = derive_seed({cfg.seed, 0x91107ULL});
  link.code_key = derive_seed({cfg.seed, 0xc0deULL});
  return link;
}

std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& cfg) {
  const sim::LinkConfig link = make_link_config(cfg);
  const sim::Exec exec = cfg.parallel ? sim::Exec::Parallel : sim::Exec::Serial;
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    const double snr_db = cfg.snr_grid_db[i];
    const double sigma2 = sigma2_from_snr_db(snr_db);
    const sim::PointResult pt = sim::run_ber_point(
        link, sigma2, cfg.seed, static_cast<int>(i), cfg.min_error_events,
        cfg.min_info_bits, cfg.max_info_bits, exec);
    const metrics::Wilson ci =
        metrics::wilson_interval(pt.bit_errors, pt.bits, 1.96);
    ResultRow row;
    row.scenario_id = cfg.scenario.id;
    row.snr_db = snr_db;
    row.metric = "coded_ber";
    row.value = static_cast<double>(pt.bit_errors) / static_cast<double>(pt.bits);
    row.ci_low = ci.lo;
    row.ci_high = ci.hi;
    row.samples = pt.bits;
    row.seed = cfg.seed;
    if (pt.budget_exhausted) row.note = "budget_exhausted";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_detection_sweep(const ExperimentConfig& cfg,
                                           bool analytic_only) {
  std::vector<ResultRow> rows;
  for (std::size_t qi = 0; qi < cfg.q_values.size(); ++qi) {
    const double q = cfg.q_values[qi];
    const double sigma2 = receiver::sigma2_for_flip_probability(q, 1.0);
    const double snr_db = -10.0 * std::log10(sigma2);
    for (int lp : cfg.lp_values) {
      const std::string id = "detect_q" + fmt_double(q) + "_Lp" + std::to_string(lp);
      auto push = [&](const std::string& metric, double value, double lo,
                      double hi, long long samples) {
        rows.push_back({id, snr_db, metric, value, lo, hi, samples, cfg.seed, ""});
      };
      const double pfalse = receiver::false_alarm_probability(lp, q);
      const double pmiss = receiver::misdetection_probability(
          cfg.frame_len, lp, cfg.flip_prob, q);
      push("pmiss_analytic", pmiss, pmiss, pmiss, 0);
      push("pfalse_analytic", pfalse, pfalse, pfalse, 0);
      if (analytic_only) continue;

      metrics::DetectionScenario scn;
      scn.frame_len = cfg.frame_len;
      scn.num_pilots = lp;
      scn.h = cplx{1.0, 0.0};
      scn.sigma2 = sigma2;
      scn.flip_prob = cfg.flip_prob;
      scn.pilot_aware = false;
      const metrics::DetectionRates rates = metrics::empirical_detection_rates(
          scn, cfg.detect_frames,
          derive_seed({cfg.seed, qi, static_cast<std::uint64_t>(lp)}),
          cfg.parallel);
      push("pmiss_mc", rates.p_miss.rate, rates.p_miss.ci.lo, rates.p_miss.ci.hi,
           rates.p_miss.trials);
      push("pfalse_mc", rates.p_false.rate, rates.p_false.ci.lo,
           rates.p_false.ci.hi, rates.p_false.trials);
    }
  }
  return rows;
}

std::vector<ResultRow> run_mutual_info(const ExperimentConfig& cfg) {
  if (cfg.mi_samples < 100'000)
    throw ConfigError("config: mi_samples must be >= 1e5");
  std::vector<ResultRow> rows;
  std::vector<std::pair<int, cplx>> samples(
      static_cast<std::size_t>(cfg.mi_samples));
  constexpr long long kChunk = 4096;

  for (std::size_t pi = 0; pi < cfg.mi_flip_probs.size(); ++pi) {
    const double p = cfg.mi_flip_probs[pi];
    for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
      const double snr_db = cfg.snr_grid_db[si];
      const double sigma2 = sigma2_from_snr_db(snr_db);
      const long long chunks = (cfg.mi_samples + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static) if (cfg.parallel)
      for (long long c = 0; c < chunks; ++c) {
        RngStream data(stream_seed(cfg.seed, Stream::Data,
                                   {pi, si, static_cast<std::uint64_t>(c)}));
        RngStream atk(stream_seed(cfg.seed, Stream::Attacker,
                                  {pi, si, static_cast<std::uint64_t>(c)}));
        RngStream noise(stream_seed(cfg.seed, Stream::Noise,
                                    {pi, si, static_cast<std::uint64_t>(c)}));
        const long long begin = c * kChunk;
        const long long end = std::min(begin + kChunk, cfg.mi_samples);
        for (long long s = begin; s < end; ++s) {
          const int x = data.bernoulli(0.5) ? 1 : -1;
          const bool flip = atk.bernoulli(p);
          const cplx y = channel::narrowband_observe(x, cplx{1.0, 0.0}, 1.0,
                                                     sigma2, flip, noise);
          samples[static_cast<std::size_t>(s)] = {x, y};
        }
      }
      const metrics::MiEstimate mi =
          metrics::mutual_information_plugin(samples, cfg.mi_bins);
      rows.push_back({"mi_p" + fmt_double(p), snr_db, "mi_bits", mi.value_bits,
                      mi.value_bits, mi.value_bits, mi.samples, cfg.seed, ""});
    }
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "scenario_id,snr_db,metric,value,ci_low,ci_high,samples,seed,note\n";
  for (const ResultRow& r : rows) {
    os << csv_field(r.scenario_id) << ',' << fmt_double(r.snr_db) << ','
       << r.metric << ',' << fmt_double(r.value) << ',' << fmt_double(r.ci_low)
       << ',' << fmt_double(r.ci_high) << ',' << r.samples << ',' << r.seed
       << ',' << r.note << '\n';
  }
}

bool any_budget_exhausted(const std::vector<ResultRow>& rows) {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ResultRow& r) { return !r.note.empty(); });
}

}  // namespace flipsim::harness
