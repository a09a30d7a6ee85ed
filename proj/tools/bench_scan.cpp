// Benchmark: serial vs OpenMP validity scan over a dense reduced-coordinate
// grid, checking that both paths agree bit-for-bit on the extrema.
#include <chrono>
#include <cmath>
#include <cstdio>

#include "cylfin/finsler.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cylfin;

int main(int argc, char** argv) {
  int side = argc > 1 ? std::atoi(argv[1]) : 65;

  PhiModel model;
  model.phi = parse("sqrt(1 + r^2 - s^2 + exp(x0) * z^2) + s / (1 + r^2)");
  model.n = 3;

  GridSpec grid;
  grid.x0 = {-1.0, 1.0, 9};
  grid.r = {0.1, 0.9, side};
  grid.sfrac = {-0.9, 0.9, side};
  grid.z = {-2.0, 2.0, side};

  auto run = [&](int threads) {
    auto t0 = std::chrono::steady_clock::now();
    ValidityReport rep = validity_scan(model, grid, threads);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    std::printf("threads=%-3d points=%d min_omega=%.17g min_lambda=%.17g  %8.1f ms\n",
                threads, rep.points_scanned, rep.min_omega, rep.min_lambda, ms);
    return std::pair{rep, ms};
  };

  auto [serial, serial_ms] = run(1);
  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  auto [parallel, parallel_ms] = run(max_threads);

  bool agree = serial.min_omega == parallel.min_omega &&
               serial.min_lambda == parallel.min_lambda &&
               serial.points_scanned == parallel.points_scanned;
  std::printf("speedup: %.2fx  extrema %s\n", serial_ms / parallel_ms,
              agree ? "agree" : "DISAGREE");
  return agree ? 0 : 1;
}
