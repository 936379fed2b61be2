#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flipsim/sim.hpp"

namespace flipsim::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment legend grammar: "A-<taps|none>,<C|SC>-<taps>" with 1-based
// single-digit tap numbers, e.g. "A-2,C-12" attacks the second tap while the
// receiver combines taps 1 and 2; "SC" selects smart combining. Tap 1 (the
// main tap) can never be attacked.
struct Scenario {
  std::vector<int> attacked_taps;  // 0-based
  std::vector<int> combine_taps;   // 0-based
  bool smart = false;
  std::string id;                  // canonical form
};

Scenario parse_scenario(const std::string& id, int num_taps);
std::string format_scenario(const Scenario& s);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> pdp_powers = {0.5, 0.5};
  std::vector<int> tap_delays;  // empty = 0,1,2,...
  std::vector<double> snr_grid_db;
  double flip_prob = 0.5;
  double eps_frac = 0.0;
  std::optional<bool> pilot_aware;  // default: plain combining aware, smart unaware
  std::optional<double> delta_th;   // default: 0.5 up to 2 taps, 1.0 beyond
  int frame_len = 100;
  int num_pilots = 20;
  int spread_n = 128;
  bool chip_level = false;
  int block_info_bits = 3968;
  int turbo_iterations = 10;
  long long min_error_events = 100;
  long long min_info_bits = 0;
  long long max_info_bits = 10'000'000;
  long detect_frames = 10'000;
  std::vector<int> lp_values;  // default 1..20
  std::vector<double> q_values = {1e-3, 1e-2, 1e-1};
  long long mi_samples = 100'000;
  int mi_bins = 16;
  std::vector<double> mi_flip_probs = {0.0, 0.5};
  std::uint64_t seed = 1;
  bool parallel = true;
};

// Parses the flat key = value config text. Unknown keys are config errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Resolved defaults applied (pilot awareness, delta_th, SNR grid, Lp grid).
void finalize(ExperimentConfig& cfg);

// Builds the link configuration for the config's scenario.
sim::LinkConfig make_link_config(const ExperimentConfig& cfg);

inline double sigma2_from_snr_db(double snr_db) {
  return std::pow(10.0, -snr_db / 10.0);
}

struct ResultRow {
  std::string scenario_id;
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
  std::string note;
};

std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_detection_sweep(const ExperimentConfig& cfg,
                                           bool analytic_only);
std::vector<ResultRow> run_mutual_info(const ExperimentConfig& cfg);

// Stable CSV: fixed column order, shortest round-trip number formatting,
// fields quoted only when they contain a comma or quote.
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);

// True if any row was cut short by the info-bit budget (CLI exit code 3).
bool any_budget_exhausted(const std::vector<ResultRow>& rows);

}  // namespace flipsim::harness
