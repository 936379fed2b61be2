// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flipsim/harness.hpp"
#include "flipsim/metrics.hpp"
#include "flipsim/sim.hpp"

using namespace flipsim;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("%s  criterion %2d  %-24s %s\n", ok ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct SweepPoint {
  double snr_db = 0.0;
  sim::PointResult pt;

  double ber() const {
    return static_cast<double>(pt.bit_errors) / static_cast<double>(pt.bits);
  }
};

constexpr std::uint64_t kSeed = 20260810;

// Full coded sweep through the same assembly path the CLI uses.
std::vector<SweepPoint> sweep(const std::string& config_text) {
  harness::ExperimentConfig cfg = harness::parse_config_text(config_text);
  cfg.seed = kSeed;
  const sim::LinkConfig link = harness::make_link_config(cfg);
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    SweepPoint p;
    p.snr_db = cfg.snr_grid_db[i];
    p.pt = sim::run_ber_point(link, harness::sigma2_from_snr_db(p.snr_db),
                              cfg.seed, static_cast<int>(i),
                              cfg.min_error_events, cfg.min_info_bits,
                              cfg.max_info_bits, sim::Exec::Parallel);
    points.push_back(p);
  }
  return points;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_zero_capacity() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::ExperimentConfig cfg = harness::parse_config_text(
      "snr_db = 0,5,10,15\n"
      "mi_flip_probs = 0,0.5\n"
      "mi_samples = 100000\n");
  cfg.seed = kSeed;
  const auto rows = harness::run_mutual_info(cfg);
  bool ok = true;
  double flipped_max = 0.0, clean_15 = 0.0;
  for (const auto& r : rows) {
    if (r.scenario_id == "mi_p0.5") {
      flipped_max = std::max(flipped_max, r.value);
      ok &= r.value < 0.02;
    }
    if (r.scenario_id == "mi_p0" && r.snr_db == 15.0) {
      clean_15 = r.value;
      ok &= r.value > 0.95;
    }
  }
  const double elapsed = seconds_since(t0);
  ok &= elapsed < 60.0;
  report(1, "zero capacity", ok,
         "flipped MI max " + fmt(flipped_max) + " bits (< 0.02), clean MI @15dB " +
             fmt(clean_15) + " (> 0.95), " + fmt(elapsed) + " s");
}

std::vector<SweepPoint> g_c1_2tap;  // A-2,C-1 on the two-tap channel

void criterion_2_error_floor() {
  const std::string base =
      "pdp = 0.5,0.5\n"
      "eps_frac = 0\n"
      "snr_db = 0:14:1\n"
      "min_error_events = 100\n"
      "max_info_bits = 1000000\n";
  const auto floor_pts = sweep("scenario = A-2,C-12\n" + base);
  const auto main_pts = sweep("scenario = A-2,C-1\n" + base);
  g_c1_2tap = main_pts;

  bool floor_ok = true;
  double floor_min = 1.0;
  for (const auto& p : floor_pts) {
    floor_min = std::min(floor_min, p.ber());
    floor_ok &= p.ber() > 1e-2;
  }
  bool recover_ok = false;
  double best = 1.0;
  for (const auto& p : main_pts) {
    best = std::min(best, p.ber());
    if (p.pt.bits >= 1000000 || p.pt.bit_errors >= 100)
      recover_ok |= p.ber() < 1e-4;
  }
  report(2, "error floor", floor_ok && recover_ok,
         "blind-combining BER min " + fmt(floor_min) +
             " (> 1e-2 everywhere), main-tap best BER " + fmt(best) +
             " (< 1e-4 reached: " + (recover_ok ? "yes" : "no") + ")");
}

std::vector<SweepPoint> g_c1_4tap;  // A-none,C-1 on the four-tap channel

void criterion_3_diversity() {
  const std::string two =
      "pdp = 0.5,0.5\n"
      "snr_db = 0:14:1\n"
      "min_error_events = 100\n"
      "max_info_bits = 1000000\n";
  const auto c12 = sweep("scenario = A-none,C-12\n" + two);
  const auto c1 = sweep("scenario = A-none,C-1\n" + two);
  const std::string four =
      "pdp = 0.4,0.3,0.2,0.1\n"
      "snr_db = 0:14:1\n"
      "min_error_events = 100\n"
      "max_info_bits = 1000000\n";
  const auto c1234 = sweep("scenario = A-none,C-1234\n" + four);
  const auto c1_4 = sweep("scenario = A-none,C-1\n" + four);
  g_c1_4tap = c1_4;

  bool ok = true;
  int compared = 0;
  for (std::size_t i = 0; i < c12.size(); ++i) {
    if (c12[i].pt.bit_errors >= 100 && c1[i].pt.bit_errors >= 100) {
      ++compared;
      ok &= c12[i].ber() < c1[i].ber();
    }
  }
  int compared4 = 0;
  for (std::size_t i = 0; i < c1234.size(); ++i) {
    if (c1234[i].pt.bit_errors >= 100 && c1_4[i].pt.bit_errors >= 100) {
      ++compared4;
      ok &= c1234[i].ber() < c1_4[i].ber();
    }
  }
  ok &= compared > 0 && compared4 > 0;
  report(3, "diversity ordering", ok,
         "two-tap: combined < main-only at " + std::to_string(compared) +
             " points; four-tap: at " + std::to_string(compared4) + " points");
}

void criterion_4_detection_analytics() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string worst;
  for (double q : {1e-3, 1e-2, 1e-1}) {
    double prev_false = -1.0, prev_miss = 2.0;
    const double sigma2 = receiver::sigma2_for_flip_probability(q, 1.0);
    for (int lp = 1; lp <= 20; ++lp) {
      const double pf = receiver::false_alarm_probability(lp, q);
      const double pm = receiver::misdetection_probability(100, lp, 0.5, q);
      ok &= pf > prev_false;          // strictly increasing in Lp
      ok &= pm <= prev_miss + 1e-12;  // non-increasing in Lp
      prev_false = pf;
      prev_miss = pm;

      metrics::DetectionScenario scn;
      scn.num_pilots = lp;
      scn.sigma2 = sigma2;
      const auto rates = metrics::empirical_detection_rates(
          scn, 10000, derive_seed({kSeed, static_cast<std::uint64_t>(lp),
                                   static_cast<std::uint64_t>(q * 1e6)}));
      const bool inside = rates.p_false.ci.lo <= pf && pf <= rates.p_false.ci.hi;
      if (!inside && worst.empty())
        worst = " (q=" + fmt(q) + ",Lp=" + std::to_string(lp) + " outside)";
      ok &= inside;
    }
  }
  const double elapsed = seconds_since(t0);
  ok &= elapsed < 300.0;
  report(4, "detection analytics", ok,
         "monotone trends + Monte Carlo false-alarm inside 3-sigma Wilson on "
         "the 60-point grid" + worst + ", " + fmt(elapsed) + " s");
}

void criterion_5_pmiss_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;
  for (int L = 1; L <= 6; ++L)
    for (int lp = 0; lp <= L; ++lp)
      for (double p : {0.25, 0.5})
        for (double q : {0.0, 0.3, 1.0}) {
          // Enumeration over every flip pattern, under the closed form's own
          // probability model.
          double brute = 0.0;
          for (std::uint32_t mask = 1; mask < (1u << L); ++mask) {
            const int j = std::popcount(mask);
            const int x = std::popcount(mask & ((1u << lp) - 1));
            brute += std::pow(p, j) * std::pow(1.0 - p, L - j) * std::pow(q, x);
          }
          const double closed = receiver::misdetection_probability(L, lp, p, q);
          worst = std::max(worst, std::fabs(closed - brute));
          ok &= std::fabs(closed - brute) <= 1e-12;
        }
  const double elapsed = seconds_since(t0);
  ok &= elapsed < 30.0;
  report(5, "closed-form oracle", ok,
         "max |closed - enumeration| = " + fmt(worst) + " (<= 1e-12), " +
             fmt(elapsed) + " s");
}

void criterion_6_smart_combining() {
  const std::string two =
      "pdp = 0.5,0.5\n"
      "eps_frac = 1.0\n"
      "snr_db = 0:14:1\n"
      "min_error_events = 100\n"
      "max_info_bits = 1000000\n";
  const auto sc12 = sweep("scenario = A-2,SC-12\ndelta_th = 0.5\n" + two);
  const auto c12 = sweep("scenario = A-2,C-12\n" + two);

  bool beats_main = true;
  int cmp_main = 0;
  for (std::size_t i = 0; i < sc12.size(); ++i) {
    if (g_c1_2tap[i].snr_db >= 8.0 && g_c1_2tap[i].pt.bit_errors >= 100) {
      ++cmp_main;
      beats_main &= sc12[i].ber() <= g_c1_2tap[i].ber();
    }
  }
  bool beats_naive = true;
  int cmp_naive = 0;
  for (std::size_t i = 0; i < sc12.size(); ++i) {
    if (c12[i].pt.bit_errors >= 100) {
      ++cmp_naive;
      beats_naive &= sc12[i].ber() < c12[i].ber();
    }
  }

  const std::string four =
      "pdp = 0.4,0.3,0.2,0.1\n"
      "eps_frac = 1.0\n"
      "delta_th = 1.0\n"
      "snr_db = 6,8,10\n"
      "min_error_events = 100\n"
      "max_info_bits = 1000000\n";
  const auto a234_sc = sweep("scenario = A-234,SC-1234\n" + four);
  const auto a4_sc = sweep("scenario = A-4,SC-1234\n" + four);
  const auto a4_c123 = sweep("scenario = A-4,C-123\npilot_aware = false\n" + four);

  // Gains are measured against each attack's conservative fallback: dropping
  // every attacked tap (C-1 when taps 2..4 are hit, C-123 when only tap 4 is).
  bool four_ok = true;
  std::string four_detail;
  for (std::size_t i = 0; i < a234_sc.size(); ++i) {
    const double snr = a234_sc[i].snr_db;
    double c1_ref = 0.0;
    for (const auto& p : g_c1_4tap)
      if (p.snr_db == snr) c1_ref = p.ber();
    const double gain_a234 = c1_ref - a234_sc[i].ber();
    const double gain_a4 = a4_c123[i].ber() - a4_sc[i].ber();
    four_ok &= gain_a234 > gain_a4;
    four_detail += " @" + fmt(snr) + "dB " + fmt(gain_a234) + ">" + fmt(gain_a4);
  }

  report(6, "smart combining gain",
         beats_main && beats_naive && four_ok && cmp_main > 0 && cmp_naive > 0,
         "SC-12<=C-1 at " + std::to_string(cmp_main) + " pts, SC-12<C-12 at " +
             std::to_string(cmp_naive) + " pts; four-tap gains" + four_detail);
}

void criterion_7_degeneracy() {
  harness::ExperimentConfig cfg = harness::parse_config_text(
      "scenario = A-2,SC-12\n"
      "pdp = 0.5,0.5\n"
      "eps_frac = 0\n");
  cfg.seed = kSeed;
  const sim::LinkConfig smart = harness::make_link_config(cfg);
  sim::LinkConfig drop = smart;
  drop.strategy.kind = receiver::Strategy::Kind::DropDetected;

  bool ok = true;
  std::string detail;
  for (double snr : {0.0, 6.0, 12.0}) {
    const double sigma2 = harness::sigma2_from_snr_db(snr);
    const long long budget = 2LL * smart.code.info_length;
    const auto a = sim::run_ber_point(smart, sigma2, kSeed, 0, 1LL << 60, 0,
                                      budget, sim::Exec::Parallel);
    const auto b = sim::run_ber_point(drop, sigma2, kSeed, 0, 1LL << 60, 0,
                                      budget, sim::Exec::Parallel);
    ok &= !a.gate_passed;
    ok &= a.bit_errors == b.bit_errors && a.bits == b.bits;
    detail += " @" + fmt(snr) + "dB " + std::to_string(a.bit_errors) + "==" +
              std::to_string(b.bit_errors);
  }
  report(7, "smart-combining degeneracy", ok,
         "gate closed everywhere; exact error-count matches:" + detail);
}

void criterion_8_chip_symbol_equivalence() {
  harness::ExperimentConfig cfg = harness::parse_config_text(
      "scenario = A-none,C-1\n"
      "pdp = 1.0\n");
  cfg.seed = kSeed;
  sim::LinkConfig link = harness::make_link_config(cfg);
  // Conditioned on a unit gain: symbols are then iid, which the binomial
  // three-sigma tolerance requires.
  link.fixed_taps = {cplx{1.0, 0.0}};
  sim::LinkConfig chip = link;
  chip.chip_level = true;

  bool ok = true;
  std::string detail;
  for (double snr : {0.0, 6.0}) {
    const double sigma2 = harness::sigma2_from_snr_db(snr);
    const long long n = 1000000;
    const auto sym = sim::run_uncoded(link, sigma2, n, derive_seed({kSeed, 1}),
                                      sim::Exec::Parallel);
    const auto chp = sim::run_uncoded(chip, sigma2, n, derive_seed({kSeed, 2}),
                                      sim::Exec::Parallel);
    const double p1 = static_cast<double>(sym.symbol_errors) / sym.symbols;
    const double p2 = static_cast<double>(chp.symbol_errors) / chp.symbols;
    const double pool = 0.5 * (p1 + p2);
    const double tol = 3.0 * std::sqrt(2.0 * pool * (1.0 - pool) / n);
    ok &= std::fabs(p1 - p2) < tol;
    detail += " @" + fmt(snr) + "dB |" + fmt(p1) + "-" + fmt(p2) + "|<" + fmt(tol);
  }
  report(8, "chip/symbol equivalence", ok, detail.substr(1));
}

void criterion_9_detection_soundness() {
  bool ok = true;
  std::string detail;

  // Pilot-aware flips leave the pilots untouched: zero detections, checked
  // directly at high SNR and by paired comparison against a no-attack run
  // with frozen seeds at 0 dB (noise false alarms cancel in the pairing).
  for (double snr : {12.0, 16.0, 20.0}) {
    metrics::DetectionScenario scn;
    scn.sigma2 = harness::sigma2_from_snr_db(snr);
    scn.pilot_aware = true;
    const auto rates = metrics::empirical_detection_rates(
        scn, 10000, derive_seed({kSeed, static_cast<std::uint64_t>(snr)}));
    const long long detections = rates.p_miss.trials - rates.p_miss.events;
    ok &= detections == 0;
    detail += " @" + fmt(snr) + "dB:" + std::to_string(detections) + "det";
  }

  {
    harness::ExperimentConfig cfg = harness::parse_config_text(
        "scenario = A-2,C-12\n"
        "pilot_aware = true\n");
    cfg.seed = kSeed;
    const sim::LinkConfig attacked = harness::make_link_config(cfg);
    sim::LinkConfig clean = attacked;
    clean.attack.attacked_taps.clear();
    bool paired_equal = true;
    RngStream sym_rng(derive_seed({kSeed, 0x9a11ULL}));
    std::vector<int> tx(100);
    for (long f = 0; f < 10000; ++f) {
      const auto frame = receiver::place_pilots(attacked.pilot_key,
                                                static_cast<std::uint64_t>(f),
                                                100, 20);
      int pi = 0;
      for (int k = 0; k < 100; ++k) {
        if (pi < 20 && frame.pilot_positions[pi] == k)
          tx[k] = frame.pilot_values[pi++];
        else
          tx[k] = sym_rng.bernoulli(0.5) ? 1 : -1;
      }
      const auto oa =
          sim::observe_frame(attacked, tx, frame.pilot_positions, 1.0, kSeed,
                             0, f, 0, f);
      const auto oc = sim::observe_frame(clean, tx, frame.pilot_positions, 1.0,
                                         kSeed, 0, f, 0, f);
      std::vector<cplx> pa(20), pc(20);
      for (int i = 0; i < 20; ++i) {
        pa[i] = oa.taps[1][frame.pilot_positions[i]];
        pc[i] = oc.taps[1][frame.pilot_positions[i]];
      }
      const auto ra =
          receiver::detect_attack(pa, frame.pilot_values, oa.chan.taps[1]);
      const auto rc =
          receiver::detect_attack(pc, frame.pilot_values, oc.chan.taps[1]);
      paired_equal &= ra.attacked == rc.attacked;
    }
    ok &= paired_equal;
    detail += std::string(" paired@0dB:") + (paired_equal ? "equal" : "DIFFER");
  }

  {
    metrics::DetectionScenario scn;
    scn.sigma2 = harness::sigma2_from_snr_db(20.0);
    scn.pilot_aware = false;
    const auto rates = metrics::empirical_detection_rates(
        scn, 10000, derive_seed({kSeed, 0xdecafULL}));
    const double detection_rate = 1.0 - rates.p_miss.rate;
    ok &= detection_rate > 0.999;
    detail += " unaware@20dB:" + fmt(detection_rate);
  }

  report(9, "detection soundness", ok, detail.substr(1));
}

void criterion_10_csv_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flipsim_acceptance";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "det.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "scenario = A-2,C-12\n"
           "block_info_bits = 512\n"
           "snr_db = 0,4,8\n"
           "min_error_events = 50\n"
           "max_info_bits = 8192\n";
  }
  auto run = [&](const std::string& sub, const std::string& extra,
                 const fs::path& out) {
    const std::string cmd = std::string(FLIPSIM_CLI_PATH) + " " + sub +
                            " --config " + cfg_path.string() + extra +
                            " --seed 97 --out " + out.string();
    return std::system(cmd.c_str());
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  bool ok = true;
  std::string detail;
  for (const std::string sub : {"ber-sweep", "pmiss-pfalse"}) {
    const fs::path o1 = dir / (sub + "_1.csv");
    const fs::path o2 = dir / (sub + "_2.csv");
    const int rc1 = run(sub, "", o1);
    const int rc2 = run(sub, "", o2);
    const std::string a = slurp(o1), b = slurp(o2);
    const bool same = !a.empty() && a == b && rc1 == 0 && rc2 == 0;
    ok &= same;
    detail += " " + sub + ":" + (same ? "identical" : "DIFFER");
  }
  report(10, "csv determinism", ok, detail.substr(1) + " (byte compare)");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_zero_capacity();
  criterion_2_error_floor();
  criterion_3_diversity();
  criterion_4_detection_analytics();
  criterion_5_pmiss_oracle();
  criterion_6_smart_combining();
  criterion_7_degeneracy();
  criterion_8_chip_symbol_equivalence();
  criterion_9_detection_soundness();
  criterion_10_csv_determinism();
  std::printf("%s: %d/10 criteria passed in %.1f s\n",
              g_failures == 0 ? "OK" : "FAILED", 10 - g_failures,
              seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
