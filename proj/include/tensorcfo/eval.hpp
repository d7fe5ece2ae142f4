// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo harness: seeded per-trial simulation of the three estimation
// strategies over SNR or phase-noise sweeps, CSV emission and a built-in
// selftest. Trials are independent work items and run under OpenMP; every
// record is fully determined by (master_seed, trial), so output is identical
// for any worker count.
#pragma once

#include "tensorcfo/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tcfo {

enum class Method { TensorOmp, OmpCfoIgnored, PerfectCsi };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

enum class SweepAxis { Snr, Tau };

struct ExperimentConfig {
    SystemConfig system;
    ChannelParams channel;
    std::vector<double> snr_db_list{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
    std::vector<double> tau_list{0.0, 0.27, 0.8, 1.6};
    std::vector<int> meas_list{64};
    double cfo_hz = 265625.0; // worst case: maximally off-grid near f_max for M=64
    double tau_rad = 0.27;    // operating tau for SNR sweeps
    double snr_db = 5.0;      // operating SNR for tau sweeps and single runs
    std::vector<Method> methods{Method::TensorOmp, Method::OmpCfoIgnored, Method::PerfectCsi};
    int trials = 200;
    std::uint64_t master_seed = 1;
    int sparsity_hint = 4; // drives the OMP iteration cap

    void validate() const;
};

// Strict-enough JSON loader; missing fields keep their defaults.
ExperimentConfig load_config_file(const std::string& path);

struct TrialRecord {
    std::string method;
    double snr_db = 0.0;
    double tau_rad = 0.0;
    int num_meas = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double rate_bps_hz = 0.0;
    double cfo_err_hz = 0.0;
    double chan_nmse_db = 0.0;
    int omp_iters = 0;
    std::string flag;
    double wall_ms = 0.0; // diagnostics only, not a CSV column
};

// R = log2(1 + pilot_power * |w^H H f|^2 / noise_var), true channel with the
// estimated (unit-norm) beams.
double achievable_rate(const CMat& h_true, const CVec& rx_beam, const CVec& tx_beam,
                       double pilot_power, double noise_var);

// Channel NMSE in dB after the optimal complex-scale alignment of h_est.
double nmse_db_scale_aligned(const CMat& h_true, const CMat& h_est);

// One record per configured method. All methods observe the same channel,
// impairments, codebook and noise, drawn from substreams of
// mix_seed(master_seed, trial).
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, SweepAxis axis, double axis_value,
                                   int num_meas, int trial);

// Cross product of meas_list x axis points x trials x methods, row order
// (num_meas, axis value, trial, method).
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                   std::ostream* progress = nullptr);

std::string csv_header();
void write_csv(const std::vector<TrialRecord>& records, std::ostream& out);

// Mean rate (and flag count) per (method, num_meas, axis value) cell.
void print_summary(const std::vector<TrialRecord>& records, SweepAxis axis, std::ostream& out);

// Small invariant suite over all modules; returns the number of failed
// checks (0 = pass). The fault-injection switch flips one adjoint output
// inside the fixture and must make the suite fail; it exists to prove the
// harness actually checks something.
int selftest(std::ostream& out, bool inject_adjoint_fault = false);

} // namespace tcfo
