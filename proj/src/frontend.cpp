// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/frontend.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace tcfo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void SystemConfig::validate() const {
    if (num_tx < 1 || num_rx < 1 || num_meas < 1)
        throw std::invalid_argument("SystemConfig: array and measurement counts must be >= 1");
    if (phase_levels < 2)
        throw std::invalid_argument("SystemConfig: phase_levels must be >= 2");
    if (symbol_duration_s <= 0.0 || pilot_power <= 0.0 || noise_var < 0.0)
        throw std::invalid_argument("SystemConfig: bad duration, power or noise variance");
    const double band = 2.0 * symbol_duration_s * max_cfo_hz;
    if (band <= 0.0 || band > 1.0)
        throw std::invalid_argument("SystemConfig: need 0 < 2*T*f_max <= 1");
    if (leakage_factor < 1.0 || leakage_factor > 1.0 / band)
        throw std::invalid_argument("SystemConfig: leakage_factor outside [1, 1/(2*T*f_max)]");
    if (grid_oversampling < 1)
        throw std::invalid_argument("SystemConfig: grid_oversampling must be >= 1");
}

double practical_tau(double carrier_freq_hz, double oscillator_constant, double sample_time_s) {
    return kTwoPi * carrier_freq_hz * std::sqrt(oscillator_constant * sample_time_s);
}

RVec draw_phase_noise(int count, double tau, Rng& rng) {
    if (tau < 0.0)
        throw std::invalid_argument("draw_phase_noise: tau must be >= 0");
    RVec phi(count);
    double acc = 0.0;
    for (int n = 0; n < count; ++n) {
        acc += tau * rng.normal();
        phi(n) = acc;
    }
    return phi;
}

ImpairmentTrace make_trace(double cfo_hz, double tau, RVec phase_noise, const SystemConfig& cfg) {
    if (std::abs(cfo_hz) > cfg.max_cfo_hz)
        throw std::invalid_argument("make_trace: |cfo_hz| exceeds max_cfo_hz");
    if (phase_noise.size() != cfg.num_meas)
        throw std::invalid_argument("make_trace: phase-noise path length must equal num_meas");
    ImpairmentTrace trace;
    trace.cfo_hz = cfo_hz;
    trace.omega_e = kTwoPi * cfo_hz * cfg.symbol_duration_s;
    trace.tau = tau;
    trace.phase_noise = std::move(phase_noise);
    trace.rotation.resize(cfg.num_meas);
    for (int n = 0; n < cfg.num_meas; ++n)
        trace.rotation(n) = std::polar(1.0, trace.omega_e * (n + 1) + trace.phase_noise(n));
    return trace;
}

ImpairmentTrace draw_trace(double cfo_hz, double tau, const SystemConfig& cfg, Rng& rng) {
    return make_trace(cfo_hz, tau, draw_phase_noise(cfg.num_meas, tau, rng), cfg);
}

Codebook random_codebook(const SystemConfig& cfg, Rng& rng) {
    Codebook cb;
    cb.rx.resize(cfg.num_rx, cfg.num_meas);
    cb.tx.resize(cfg.num_tx, cfg.num_meas);
    const double mag_rx = 1.0 / std::sqrt(static_cast<double>(cfg.num_rx));
    const double mag_tx = 1.0 / std::sqrt(static_cast<double>(cfg.num_tx));
    const double step = kTwoPi / cfg.phase_levels;
    for (int n = 0; n < cfg.num_meas; ++n) {
        for (int i = 0; i < cfg.num_rx; ++i)
            cb.rx(i, n) = std::polar(mag_rx, step * static_cast<double>(rng.uniform_index(cfg.phase_levels)));
        for (int i = 0; i < cfg.num_tx; ++i)
            cb.tx(i, n) = std::polar(mag_tx, step * static_cast<double>(rng.uniform_index(cfg.phase_levels)));
    }
    return cb;
}

CVec phase_quantize(const CVec& v, int levels) {
    if (levels < 2)
        throw std::invalid_argument("phase_quantize: levels must be >= 2");
    const double step = kTwoPi / levels;
    const double mag = 1.0 / std::sqrt(static_cast<double>(v.size()));
    CVec out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        double phase = 0.0; // convention for zero entries
        if (v(i) != cdouble(0.0, 0.0)) {
            double arg = std::arg(v(i)); // (-pi, pi]
            if (arg < 0.0)
                arg += kTwoPi;
            const int lo = static_cast<int>(std::floor(arg / step));
            const double d_lo = arg - step * lo;
            const double d_hi = step * (lo + 1) - arg;
            int pick;
            if (d_lo < d_hi)
                pick = lo;
            else if (d_hi < d_lo)
                pick = (lo + 1) % levels;
            else
                pick = std::min(lo % levels, (lo + 1) % levels); // tie: smaller phase
            phase = step * (pick % levels);
        }
        out(i) = std::polar(mag, phase);
    }
    return out;
}

MeasurementSet simulate_measurements(const CMat& h, const Codebook& codebook,
                                     const ImpairmentTrace& trace, const SystemConfig& cfg,
                                     Rng& rng) {
    if (h.rows() != cfg.num_rx || h.cols() != cfg.num_tx)
        throw std::invalid_argument("simulate_measurements: channel dims mismatch");
    if (codebook.rx.cols() != cfg.num_meas || codebook.tx.cols() != cfg.num_meas)
        throw std::invalid_argument("simulate_measurements: codebook length mismatch");
    MeasurementSet out;
    out.noiseless.resize(cfg.num_meas);
    out.noise.resize(cfg.num_meas);
    const double noise_scale = std::sqrt(cfg.noise_var / cfg.pilot_power);
    for (int n = 0; n < cfg.num_meas; ++n) {
        const cdouble gain = codebook.rx.col(n).dot(h * codebook.tx.col(n)); // w^H H f
        out.noiseless(n) = gain * trace.rotation(n);
        out.noise(n) = noise_scale * rng.complex_normal();
    }
    out.y = out.noiseless + out.noise;
    return out;
}

} // namespace tcfo
