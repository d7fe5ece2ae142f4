// SPDX-License-Identifier: Apache-2.0
//
// Analog front-end simulation: quantized phase-shifter codebooks, Wiener
// phase noise, CFO rotation and the noisy beam-training measurement sequence
// y[n] = w_n^H H f_n exp(j(omega_e*n + phi_n)) + v[n].
#pragma once

#include "tensorcfo/rng.hpp"
#include "tensorcfo/tensor.hpp"

namespace tcfo {

struct SystemConfig {
    int num_tx = 32;                   // N_t
    int num_rx = 16;                   // N_r
    int num_meas = 64;                 // M
    int phase_levels = 8;              // q, phase-shifter quantization
    double symbol_duration_s = 0.5e-6; // T
    double pilot_power = 1.0;          // rho = |s|^2
    double noise_var = 1.0;            // sigma^2, pre-normalization
    double carrier_freq_hz = 28e9;     // f_c
    double max_cfo_hz = 280e3;         // f_max (10 ppm of f_c)
    double leakage_factor = 2.0;       // gamma, in [1, 1/(2*T*f_max)]
    int grid_oversampling = 2;         // rho_os for the spatial grids

    void validate() const;
};

// Per-burst synchronization impairments. The phase on measurement n
// (1-based) is Omega_n = omega_e*n + phi_n with phi_0 = 0; rotation holds
// exp(j*Omega_n) for n = 1..M at zero-based positions.
struct ImpairmentTrace {
    double cfo_hz = 0.0;       // f_e
    double omega_e = 0.0;      // 2*pi*f_e*T, rad/symbol
    double tau = 0.0;          // phase-noise increment std dev, rad
    RVec phase_noise;          // phi_1..phi_M
    CVec rotation;             // e_Omega, unit-modulus entries
};

struct Codebook {
    CMat rx; // N_r x M, column n = w_n
    CMat tx; // N_t x M, column n = f_n
};

struct MeasurementSet {
    CVec y;         // pilot-normalized measurements
    CVec noiseless; // w^H H f * rotation, diagnostics
    CVec noise;     // v, variance sigma^2 / rho
};

// tau = 2*pi*f_c*sqrt(c*T_s) for oscillator constant c
double practical_tau(double carrier_freq_hz, double oscillator_constant, double sample_time_s);

// Wiener path: cumulative sum of count i.i.d. N(0, tau^2) increments
RVec draw_phase_noise(int count, double tau, Rng& rng);

// Trace from a CFO value and a given phase-noise path (length num_meas).
ImpairmentTrace make_trace(double cfo_hz, double tau, RVec phase_noise, const SystemConfig& cfg);

// Convenience: draws the phase-noise path internally.
ImpairmentTrace draw_trace(double cfo_hz, double tau, const SystemConfig& cfg, Rng& rng);

// Beam-training vectors with entries of magnitude 1/sqrt(N) and phases
// uniform over the q-point alphabet, independent across entries and
// measurements.
Codebook random_codebook(const SystemConfig& cfg, Rng& rng);

// Element-wise phase quantization to the q-point alphabet (nearest phase,
// exact ties to the smaller canonical phase in [0, 2*pi); zero entries
// quantize to phase 0); output scaled to unit l2 norm as 1/sqrt(len).
CVec phase_quantize(const CVec& v, int levels);

MeasurementSet simulate_measurements(const CMat& h, const Codebook& codebook,
                                     const ImpairmentTrace& trace, const SystemConfig& cfg,
                                     Rng& rng);

} // namespace tcfo
