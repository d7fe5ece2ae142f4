// SPDX-License-Identifier: Apache-2.0
//
// Times the factored OpenMP forward/adjoint kernels against the serial
// dense-definition reference at the default operating size, plus one full
// estimation pass. Usage: bench_kernels [reps]
#include "tensorcfo/estimator.hpp"
#include "tensorcfo/frontend.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tcfo;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F> double time_ms(int reps, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        fn();
    return ms_since(t0) / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;

    SystemConfig sys; // defaults: N_r=16, N_t=32, M=64, 2x oversampling
    sys.noise_var = 0.1;
    Rng rng(7);
    const Codebook cb = random_codebook(sys, rng);
    const auto grid = ReducedFrequencyGrid::make(sys.num_meas, sys.leakage_factor, sys.max_cfo_hz,
                                                 sys.symbol_duration_s);
    const SensingOperator op = build_operator(cb, sys, grid);

    ComplexTensor3 g(op.grid_rx(), op.grid_tx(), op.num_slabs());
    for (Index i = 0; i < g.size(); ++i)
        g.data()[i] = rng.complex_normal();
    CVec y(op.num_meas());
    for (Index i = 0; i < y.size(); ++i)
        y(i) = rng.complex_normal();

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("operator: %lld x %lld x %lld grid, M=%lld, threads=%d, reps=%d\n",
                static_cast<long long>(op.grid_rx()), static_cast<long long>(op.grid_tx()),
                static_cast<long long>(op.num_slabs()), static_cast<long long>(op.num_meas()),
                threads, reps);

    const double fwd = time_ms(reps, [&] { volatile auto r = op.forward(g)(0); (void)r; });
    const double fwd_ref = time_ms(1, [&] { volatile auto r = op.forward_ref(g)(0); (void)r; });
    const double adj = time_ms(reps, [&] { volatile auto r = op.adjoint(y)(0, 0, 0); (void)r; });
    const double adj_ref = time_ms(1, [&] { volatile auto r = op.adjoint_ref(y)(0, 0, 0); (void)r; });

    std::printf("forward:  %8.3f ms  (reference %8.3f ms, x%.1f)\n", fwd, fwd_ref, fwd_ref / fwd);
    std::printf("adjoint:  %8.3f ms  (reference %8.3f ms, x%.1f)\n", adj, adj_ref, adj_ref / adj);

    OmpConfig omp;
    omp.epsilon = sys.num_meas * sys.noise_var;
    omp.max_iterations = sys.num_meas;
    const double est = time_ms(std::max(1, reps / 4), [&] {
        volatile bool v = estimate_channel_cfo(y, op, omp, sys.phase_levels, sys.grid_oversampling)
                              .valid;
        (void)v;
    });
    std::printf("estimate_channel_cfo on noise input: %8.3f ms\n", est);
    return 0;
}
