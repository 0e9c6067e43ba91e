// SPDX-License-Identifier: Apache-2.0
//
// Timing comparison between the serial reference kernels and the OpenMP
// kernels, plus a small Monte Carlo batch at 1 vs all workers. Build with
// OpenMP and run on a multi-core box to see the speedups; results are
// printed as a plain table.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cyclosense/channel.hpp"
#include "cyclosense/cyclostat.hpp"
#include "cyclosense/detectors.hpp"
#include "cyclosense/harness.hpp"
#include "cyclosense/parallel.hpp"
#include "cyclosense/ref.hpp"

using namespace cyclosense;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("workers: %d\n", worker_count());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  NoiseSpec noise{1.0, 0.5};
  const IQFrame frame = gen_noise(4, 1 << 19, noise, 42);
  IQFrame timed = frame;
  timed.sample_rate_hz = 320e3;

  report("cov_lag (M=4, N=2^19)",
         time_ms([&] { (void)ref::cov_lag(timed, 0); }, 3),
         time_ms([&] { (void)cov_lag(timed, 0); }, 3));

  report("cyclic_cov (M=4, N=2^19)",
         time_ms([&] { (void)ref::cyclic_cov(timed, 160e3, 0, true); }, 3),
         time_ms([&] { (void)cyclic_cov(timed, 160e3, 0, true); }, 3));

  const SampleStream stream = timed.antenna_stream(0);
  report("msdf_peak (N=2^19)",
         time_ms([&] { (void)ref::msdf_peak(stream, 160e3, 128, 3.2e3, true); }, 1),
         time_ms([&] { (void)msdf_peak(stream, 160e3, 128, 3.2e3, true); }, 1));

  // Monte Carlo batch: the same experiment at one worker and at all workers.
  ExperimentConfig config;
  config.kind = ExperimentKind::PdVsSnr;
  config.detectors = {DetectorId::EvCss};
  config.m = {2};
  config.n = {4000};
  config.snr_db = {-14.0};
  config.n_trials = 400;
  config.cal_trials = 100;
  config.master_seed = 7;

#ifdef _OPENMP
  const int max_workers = worker_count();
  omp_set_num_threads(1);
  const double serial = time_ms([&] { (void)run_experiment(config); }, 1);
  omp_set_num_threads(max_workers);
  const double parallel = time_ms([&] { (void)run_experiment(config); }, 1);
  report("monte carlo (400 trials)", serial, parallel);
#else
  const double serial = time_ms([&] { (void)run_experiment(config); }, 1);
  report("monte carlo (400 trials)", serial, serial);
#endif

  return 0;
}
