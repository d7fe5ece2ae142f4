// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/eval.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace tcfo {

namespace {

ComplexTensor3 random_tensor(Index n1, Index n2, Index n3, Rng& rng) {
    ComplexTensor3 t(n1, n2, n3);
    for (Index i = 0; i < t.size(); ++i)
        t.data()[i] = rng.complex_normal();
    return t;
}

CVec random_cvec(Index n, Rng& rng) {
    CVec v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.complex_normal();
    return v;
}

struct SmallFixture {
    SystemConfig sys;
    Codebook codebook;
    ReducedFrequencyGrid grid;
    SensingOperator op;
};

SmallFixture small_fixture(Rng& rng) {
    SmallFixture f;
    f.sys.num_rx = 4;
    f.sys.num_tx = 6;
    f.sys.num_meas = 16;
    f.sys.grid_oversampling = 2;
    f.sys.noise_var = 0.0;
    f.codebook = random_codebook(f.sys, rng);
    f.grid = ReducedFrequencyGrid::with_half_count(f.sys.num_meas, 3, f.sys.symbol_duration_s);
    f.op = build_operator(f.codebook, f.sys, f.grid);
    return f;
}

} // namespace

int selftest(std::ostream& out, bool inject_adjoint_fault) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        out << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        if (!ok)
            ++failures;
    };
    Rng rng(20240901);

    { // DFT unitarity
        const Index n = 8;
        const CMat u = dft_matrix(n);
        const double err = ((u * u.adjoint()) / static_cast<double>(n) - CMat::Identity(n, n)).norm();
        check("dft_unitary", err < 1e-12);
    }
    { // unfold round trip, bit exact
        const ComplexTensor3 t = random_tensor(3, 4, 5, rng);
        const ComplexTensor3 back = mode3_fold(mode3_unfold(t), 3, 4);
        bool exact = back.same_dims(t);
        for (Index i = 0; exact && i < t.size(); ++i)
            exact = back.data()[i] == t.data()[i];
        check("mode3_unfold_roundtrip", exact);
    }
    { // adjoint identity <P(G), y> == <G, P*(y)>, optional injected fault
        SmallFixture f = small_fixture(rng);
        const ComplexTensor3 g =
            random_tensor(f.op.grid_rx(), f.op.grid_tx(), f.op.num_slabs(), rng);
        const CVec y = random_cvec(f.op.num_meas(), rng);
        ComplexTensor3 adj = f.op.adjoint(y);
        if (inject_adjoint_fault)
            adj(0, 0, 0) = -adj(0, 0, 0);
        const cdouble lhs = f.op.forward(g).dot(y);          // sum conj(P(G)) y
        const cdouble rhs = inner_product(adj, g);           // sum adj conj(g)... see below
        // <P(G), y>_vec with conj on the second argument equals conj(lhs);
        // <G, P*(y)> equals conj(rhs); compare the conjugate-free forms.
        const double err = std::abs(std::conj(lhs) - std::conj(rhs)) /
                           (frob_norm(g) * y.norm());
        check("adjoint_identity", err < 1e-10);
    }
    { // fast kernels agree with the dense reference
        SmallFixture f = small_fixture(rng);
        const ComplexTensor3 g =
            random_tensor(f.op.grid_rx(), f.op.grid_tx(), f.op.num_slabs(), rng);
        const CVec y = random_cvec(f.op.num_meas(), rng);
        const double ferr = (f.op.forward(g) - f.op.forward_ref(g)).norm() / f.op.forward_ref(g).norm();
        ComplexTensor3 fast = f.op.adjoint(y);
        ComplexTensor3 ref = f.op.adjoint_ref(y);
        double aerr = 0.0, aref = 0.0;
        for (Index i = 0; i < fast.size(); ++i) {
            aerr += std::norm(fast.data()[i] - ref.data()[i]);
            aref += std::norm(ref.data()[i]);
        }
        check("kernels_match_reference", ferr < 1e-12 && std::sqrt(aerr / aref) < 1e-12);
    }
    { // measurement model chain: on-grid channel + on-grid CFO, noiseless
        SystemConfig sys;
        sys.num_rx = 4;
        sys.num_tx = 4;
        sys.num_meas = 16;
        sys.grid_oversampling = 1;
        sys.noise_var = 0.0;
        Rng rng_cb = rng.substream(11);
        const Codebook cb = random_codebook(sys, rng_cb);
        const auto grid = ReducedFrequencyGrid::full(sys.num_meas, sys.symbol_duration_s);
        const SensingOperator op = build_operator(cb, sys, grid);

        Rng rng_c = rng.substream(12);
        const GridCoefficients gc = draw_sparse_coeffs(2, 4, 4, rng_c);
        const CMat h = synth_on_grid(gc.c, 1);
        const int bin = 2;
        const double f_e = bin / (sys.num_meas * sys.symbol_duration_s);
        const auto trace = make_trace(f_e, 0.0, RVec::Zero(sys.num_meas), sys);
        Rng rng_n = rng.substream(13);
        const MeasurementSet meas = simulate_measurements(h, cb, trace, sys, rng_n);

        const CMat u_m = dft_matrix(sys.num_meas);
        const CVec p = (u_m * trace.rotation) / static_cast<double>(sys.num_meas);
        ComplexTensor3 cp(4, 4, sys.num_meas); // C outer p
        for (int k = 0; k < sys.num_meas; ++k)
            cp.slab(k) = gc.c * p(k);
        const double err = (op.forward(cp) - meas.noiseless).norm() / meas.noiseless.norm();
        check("model_chain_on_grid", err < 1e-9);
    }
    { // OMP exact recovery on a tiny noiseless instance
        SystemConfig sys;
        sys.num_rx = 4;
        sys.num_tx = 4;
        sys.num_meas = 32;
        sys.grid_oversampling = 1;
        sys.noise_var = 0.0;
        Rng rng_cb = rng.substream(21);
        const Codebook cb = random_codebook(sys, rng_cb);
        const auto grid = ReducedFrequencyGrid::full(sys.num_meas, sys.symbol_duration_s);
        const SensingOperator op = build_operator(cb, sys, grid);
        ComplexTensor3 truth(4, 4, sys.num_meas);
        truth(1, 2, 5) = cdouble(1.0, -0.5);
        truth(3, 0, 5) = cdouble(-0.3, 0.8);
        const CVec y = op.forward(truth);
        OmpConfig omp;
        omp.epsilon = 1e-20 * y.squaredNorm();
        omp.max_iterations = 8;
        const OmpResult res = tensor_omp(y, op, omp);
        double err = 0.0;
        for (Index i = 0; i < truth.size(); ++i)
            err += std::norm(res.coeffs.data()[i] - truth.data()[i]);
        check("omp_exact_recovery", res.iterations == 2 && std::sqrt(err) / frob_norm(truth) < 1e-8);
    }
    { // quantizer keeps the alphabet and unit norm
        Rng rng_q = rng.substream(31);
        const CVec v = random_cvec(8, rng_q);
        const CVec q = phase_quantize(v, 8);
        bool ok = std::abs(q.norm() - 1.0) < 1e-12;
        const double step = 2.0 * std::numbers::pi / 8;
        for (Index i = 0; ok && i < q.size(); ++i) {
            double arg = std::arg(q(i));
            if (arg < 0)
                arg += 2.0 * std::numbers::pi;
            const double cell = arg / step;
            ok = std::abs(cell - std::round(cell)) < 1e-9;
        }
        check("quantizer_alphabet", ok);
    }
    { // trial determinism
        ExperimentConfig cfg;
        cfg.system.num_rx = 4;
        cfg.system.num_tx = 8;
        cfg.channel.num_rx = 4;
        cfg.channel.num_tx = 8;
        cfg.system.num_meas = 32;
        cfg.trials = 1;
        const auto a = run_trial(cfg, SweepAxis::Snr, 5.0, 32, 0);
        const auto b = run_trial(cfg, SweepAxis::Snr, 5.0, 32, 0);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].rate_bps_hz == b[i].rate_bps_hz && a[i].seed == b[i].seed &&
                   a[i].omp_iters == b[i].omp_iters && a[i].flag == b[i].flag;
        check("trial_determinism", same);
    }
    { // oscillator constant to tau
        const double tau = practical_tau(28e9, 4.7e-18, 0.5e-6);
        check("practical_tau", std::abs(tau - 0.27) < 0.005);
    }
    { // frequency-grid reduction at the default operating point
        const auto grid = ReducedFrequencyGrid::make(64, 2.0, 280e3, 0.5e-6);
        check("kept_slab_count", grid.half_count == 18 && grid.num_slabs() == 37);
    }

    out << (failures == 0 ? "selftest: all checks passed\n" : "selftest: FAILURES present\n");
    return failures;
}

} // namespace tcfo
