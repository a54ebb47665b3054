// Timing harness comparing the serial reference paths against the OpenMP
// lanes for the two hot kernels: sub-density propagation and Monte Carlo
// path simulation. Results are identical by construction; this only measures
// the speedup.

#include "rbe/law.hpp"
#include "rbe/solver.hpp"
#include "rbe/verify.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
        const double t0 = now();
        fn();
        const double t1 = now();
        if (t1 - t0 < best) best = t1 - t0;
    }
    return best;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both lanes run serial code\n");
#endif

    using namespace rbe;

    // propagate benchmark: one representative mid-solve step
    SolverConfig serial;
    serial.parallel = false;
    SolverConfig parallel;
    parallel.parallel = true;

    SubDensity f = propagate_subdensity_1s(SubDensity::delta_at_origin(), 1.0, 2.0, serial);
    const double t_prop_serial =
        time_best_of(3, [&] { (void)propagate_subdensity_1s(f, 1.5, 1.0, serial); });
    const double t_prop_parallel =
        time_best_of(3, [&] { (void)propagate_subdensity_1s(f, 1.5, 1.0, parallel); });

    SubDensity g = propagate_subdensity(SubDensity::delta_at_origin(), 1.0, -1.0, 0.25, serial);
    const double t_strip_serial =
        time_best_of(3, [&] { (void)propagate_subdensity(g, 1.0, -1.0, 0.25, serial); });
    const double t_strip_parallel =
        time_best_of(3, [&] { (void)propagate_subdensity(g, 1.0, -1.0, 0.25, parallel); });

    // simulation benchmark
    const Barrier strip =
        Barrier::from_segments({{std::numeric_limits<double>::infinity(), 1.0, -1.0}});
    SimConfig sim_serial;
    sim_serial.n_paths = 50000;
    sim_serial.seed = 1;
    sim_serial.parallel = false;
    SimConfig sim_parallel = sim_serial;
    sim_parallel.parallel = true;
    const double t_sim_serial = time_best_of(2, [&] { (void)simulate_stopped(strip, sim_serial); });
    const double t_sim_parallel =
        time_best_of(2, [&] { (void)simulate_stopped(strip, sim_parallel); });

    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup");
    auto row = [](const char* name, double ts, double tp) {
        std::printf("%-28s %12.2f %12.2f %8.2fx\n", name, ts * 1e3, tp * 1e3, ts / tp);
    };
    row("propagate 1-sided (G=2048)", t_prop_serial, t_prop_parallel);
    row("propagate strip  (G=2048)", t_strip_serial, t_strip_parallel);
    row("simulate 50k paths", t_sim_serial, t_sim_parallel);
    return 0;
}
