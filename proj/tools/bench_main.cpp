// Throughput comparison between the serial reference path and the
// OpenMP-parallel Monte Carlo loop on the coded-BER kernel. Both paths must
// produce identical error counts; the benchmark verifies that as it runs.

#include <chrono>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flipsim/harness.hpp"

namespace {

double run_timed(const flipsim::sim::LinkConfig& link, double sigma2,
                 long long bits, flipsim::sim::Exec exec, long long& errors) {
  const auto t0 = std::chrono::steady_clock::now();
  const flipsim::sim::PointResult pt = flipsim::sim::run_ber_point(
      link, sigma2, /*master=*/42, /*snr_index=*/0,
      /*min_error_events=*/1LL << 60, /*min_info_bits=*/bits,
      /*max_info_bits=*/bits, exec);
  const auto t1 = std::chrono::steady_clock::now();
  errors = pt.bit_errors;
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  long long blocks = 24;
  if (argc > 1) blocks = std::atoll(argv[1]);

  flipsim::harness::ExperimentConfig cfg =
      flipsim::harness::parse_config_text("scenario = A-2,SC-12\n"
                                          "eps_frac = 1.0\n");
  const flipsim::sim::LinkConfig link = flipsim::harness::make_link_config(cfg);
  const double sigma2 = flipsim::harness::sigma2_from_snr_db(8.0);
  const long long bits = blocks * link.code.info_length;

  std::cout << "coded-BER kernel, scenario " << cfg.scenario.id << " at 8 dB, "
            << blocks << " blocks (" << bits << " info bits)\n";

  long long errors_serial = 0, errors_parallel = 0;
  const double t_serial =
      run_timed(link, sigma2, bits, flipsim::sim::Exec::Serial, errors_serial);
  std::cout << "serial      : " << t_serial << " s  ("
            << bits / t_serial / 1e3 << " kbit/s)\n";

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  const double t_parallel = run_timed(link, sigma2, bits,
                                      flipsim::sim::Exec::Parallel,
                                      errors_parallel);
  std::cout << "openmp (" << threads << "t) : " << t_parallel << " s  ("
            << bits / t_parallel / 1e3 << " kbit/s)\n";
  std::cout << "speedup     : " << t_serial / t_parallel << "x\n";

  if (errors_serial != errors_parallel) {
    std::cerr << "MISMATCH: serial counted " << errors_serial
              << " errors, parallel counted " << errors_parallel << "\n";
    return 1;
  }
  std::cout << "error counts match (" << errors_serial << ")\n";
  return 0;
}
