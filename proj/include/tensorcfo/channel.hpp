// SPDX-License-Identifier: Apache-2.0
//
// Clustered narrowband mmWave MIMO channel generation and the DFT-grid
// (virtual) representation: synthesis of a channel matrix from sparse grid
// coefficients and the inverse coefficient extraction.
#pragma once

#include "tensorcfo/rng.hpp"
#include "tensorcfo/tensor.hpp"

namespace tcfo {

struct ChannelParams {
    int num_rx = 16;                   // N_r
    int num_tx = 32;                   // N_t
    int num_clusters = 2;              // N_cl
    int rays_per_cluster = 10;         // N_ray
    double angular_spread_deg = 3.0;   // full per-cluster spread
    double spacing_over_lambda = 0.5;  // d / lambda

    void validate() const;
};

// One entry per propagation path, cluster-major order.
struct PathSet {
    int num_clusters = 0;
    int rays_per_cluster = 0;
    CVec gains;        // complex path gains
    RVec aoa_rad;      // physical angle of arrival
    RVec aod_rad;      // physical angle of departure
    RVec omega_rx;     // 2*pi*(d/lambda)*sin(aoa), rad per antenna
    RVec omega_tx;     // 2*pi*(d/lambda)*sin(aod)

    Index num_paths() const { return gains.size(); }
};

struct ChannelRealization {
    CMat h; // N_r x N_t
    PathSet paths;
};

struct GridCoefficients {
    CMat c;           // grid_rx x grid_tx
    int sparsity = 0; // nonzero count for synthetic draws
};

// Sum of per-path rank-1 terms gain * a_rx(omega_rx) * a_tx(omega_tx)^H with
// the 1/sqrt(num_clusters) and 1/sqrt(rays_per_cluster) normalization.
CMat assemble_channel(const PathSet& paths, int num_rx, int num_tx);

// Cluster centers uniform over [-pi/2, pi/2), AoA/AoD independent; ray angles
// uniform within +-spread/2 of the center; gains i.i.d. CN(0,1).
ChannelRealization draw_channel(const ChannelParams& params, Rng& rng);

// H from grid coefficients: a single nonzero alpha at grid cell (i, j) maps
// to alpha * a_rx(2*pi*i/G_r) * a_tx(2*pi*j/G_t)^T. For oversampling 1 this
// is H = U_Nr^H * C * U_Nt^H.
CMat synth_on_grid(const CMat& coeffs, int oversampling);

// Inverse of synth_on_grid at oversampling 1: (1/(N_r*N_t)) * U_Nr * H * U_Nt.
CMat grid_coefficients_of(const CMat& h);

// K distinct grid cells uniform without replacement, values i.i.d. CN(0,1).
GridCoefficients draw_sparse_coeffs(int sparsity, Index grid_rx, Index grid_tx, Rng& rng);

} // namespace tcfo
