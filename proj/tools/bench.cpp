// Wall-time comparison of the serial reference and the OpenMP worker pool on
// the two batch workloads: a seed sweep and a batch of equilibrium analyses.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pursuit/linearize.hpp"
#include "pursuit/parallel.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/spectral.hpp"

using namespace pursuit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SweepSpec bench_sweep() {
    Scenario base;
    base.name = "bench";
    base.sim.n = 5;
    base.sim.params = {1.0, -5.0};
    base.sim.dt = 1e-3;
    base.sim.t_end = 30.0;
    base.sim.init = RandomInit{20.0, 1};
    base.out_prefix = "bench";
    SweepSpec spec;
    spec.base = base;
    spec.param = SweepParam::k;
    spec.values = {-5.0, -2.0, -1.0};
    spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    return spec;
}

double bench_batch_eigen(bool parallel, int batches) {
    std::mt19937_64 rng(123);
    std::vector<std::vector<double>> bearing_sets(batches);
    for (auto& bearings : bearing_sets) {
        const int n = 4 + static_cast<int>(rng() % 3);
        bearings.resize(n);
        double sum = 0.0;
        for (double& b : bearings) {
            b = 0.2 + uniform01(rng());
            sum += b;
        }
        for (double& b : bearings) b *= pi / sum;
    }
    std::vector<double> max_re(batches);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(bearing_sets.size(), parallel, [&](std::size_t i) {
        auto [xi, desc] = construct_circular_formation(bearing_sets[i], 1.5, 1.0);
        max_re[i] = stability_report(xi, {1.0, -2.0}).max_re_nondiscarded;
    });
    return seconds_since(t0);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif

    {
        const SweepSpec spec = bench_sweep();
        auto t0 = std::chrono::steady_clock::now();
        const auto serial_rows = run_sweep(spec, /*parallel=*/false);
        const double t_serial = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel_rows = run_sweep(spec, /*parallel=*/true);
        const double t_parallel = seconds_since(t0);

        bool identical = serial_rows.size() == parallel_rows.size();
        for (std::size_t i = 0; identical && i < serial_rows.size(); ++i)
            identical = serial_rows[i].converged == parallel_rows[i].converged &&
                        serial_rows[i].mean_settle == parallel_rows[i].mean_settle;
        std::printf("sweep (24 runs, t_end=30): serial %.3fs, parallel %.3fs, speedup %.2fx, "
                    "results %s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    identical ? "identical" : "DIFFER");
    }

    {
        const int batches = 512;
        const double t_serial = bench_batch_eigen(false, batches);
        const double t_parallel = bench_batch_eigen(true, batches);
        std::printf("batch stability reports (%d equilibria): serial %.3fs, parallel %.3fs, "
                    "speedup %.2fx\n",
                    batches, t_serial, t_parallel, t_serial / t_parallel);
    }
    return 0;
}
