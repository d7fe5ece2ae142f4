// SPDX-License-Identifier: Apache-2.0
//
// Greedy recovery of the coefficient tensor (orthogonal matching pursuit on
// the sensing operator), rank-1 splitting of the result into channel grid
// coefficients and a CFO spectrum, channel reconstruction, quantized beam
// selection and a CFO point estimate. Also the matrix-form OMP used by the
// phase-error-ignorant baseline.
#pragma once

#include "tensorcfo/channel.hpp"
#include "tensorcfo/sensing.hpp"

#include <span>
#include <vector>

namespace tcfo {

struct OmpConfig {
    double epsilon = 0.0;          // stop once the squared residual norm is <= epsilon
    int max_iterations = 64;
    double ls_ridge_scale = 1e-10; // ridge factor (times trace scale) on rank deficiency
};

struct SupportEntry {
    Index rx_bin = 0; // a
    Index tx_bin = 0; // b
    Index slab = 0;   // c

    bool operator==(const SupportEntry&) const = default;
};

struct OmpResult {
    ComplexTensor3 coeffs;              // zero outside the support
    std::vector<SupportEntry> support;  // in selection order
    std::vector<double> residual_norms; // l2 norms, starting with ||y||
    int iterations = 0;
    bool ls_regularized = false;
};

// min ||y - B v|| over the columns of b; falls back to a ridge-regularized
// normal system when the QR is rank deficient (sets *regularized).
CVec solve_ls_columns(const CMat& b, const CVec& y, double ridge_scale, bool* regularized);

// Greedy loop: while ||residual||^2 > epsilon and iterations remain, select
// the entry maximizing |adjoint(residual)| (ties: lexicographically smallest
// (a,b,c); previously selected entries are never re-selected), then re-solve
// the support-restricted least squares.
OmpResult tensor_omp(const CVec& y, const SensingOperator& op, const OmpConfig& cfg);

// Least squares restricted to a fixed support, as one tensor.
ComplexTensor3 restricted_least_squares(const CVec& y, const SensingOperator& op,
                                        std::span<const SupportEntry> support,
                                        double ridge_scale = 1e-10, bool* regularized = nullptr);

struct RankOneSplit {
    CMat coeffs;    // C_hat, carries the scale
    CVec spectrum;  // p_hat, unit l2 norm, largest-modulus entry real positive
    double top_sv = 0.0;
    double second_sv = 0.0;
    bool ambiguous = false; // top two singular values (nearly) equal
};

// SVD of the mode-3 unfolding: spectrum is the top left singular vector,
// vec(conj(coeffs)) the top right singular vector scaled by the top singular
// value, phases rotated per the convention above.
RankOneSplit split_rank_one(const ComplexTensor3& g);

// synth_on_grid of the recovered coefficients; the result is known only up
// to a complex scale.
CMat reconstruct_channel(const CMat& coeffs, int oversampling);

struct BeamPair {
    CVec rx; // w_est, unit norm, alphabet-constrained
    CVec tx; // f_est
};

// Top singular vector pair of h_est (phase-normalized so the largest entry
// is real positive), element-wise phase quantized.
BeamPair select_beams(const CMat& h_est, int phase_levels);

// Peak of |spectrum| over the kept slabs refined by the energy-weighted
// centroid over the peak and its neighbors in signed frequency.
double estimate_cfo(const CVec& spectrum, const ReducedFrequencyGrid& grid);

// Matrix-form OMP over the columns of a dense system, same stopping policy.
struct VectorOmpResult {
    CVec x; // full-length, zero outside the support
    std::vector<Index> support;
    std::vector<double> residual_norms;
    int iterations = 0;
    bool ls_regularized = false;
};
VectorOmpResult standard_omp(const CVec& y, const CMat& a, const OmpConfig& cfg);

struct EstimationResult {
    CMat coeffs;       // C_hat
    CVec spectrum;     // p_hat
    CMat h_est;        // N_r x N_t, known up to complex scale
    BeamPair beams;
    double cfo_hz_hat = 0.0;
    OmpResult omp;
    bool split_ambiguous = false;
    bool valid = false; // false when recovery produced a zero tensor
};

// Full pipeline: tensor OMP -> rank-1 split -> channel -> beams -> CFO.
EstimationResult estimate_channel_cfo(const CVec& y, const SensingOperator& op,
                                      const OmpConfig& cfg, int phase_levels, int oversampling);

} // namespace tcfo
