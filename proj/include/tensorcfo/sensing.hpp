// SPDX-License-Identifier: Apache-2.0
//
// Rank-1 measurement tensors over a reduced frequency grid, with the forward
// map P (tensor -> measurements) and its adjoint P*. The fast paths evaluate
// the factored form and are OpenMP-parallel; *_ref variants implement the
// dense definitions serially and are kept as the reference for tests and the
// kernel benchmark. A lifted matrix formulation of the same system is
// provided as an independent route for cross-checking.
#pragma once

#include "tensorcfo/frontend.hpp"
#include "tensorcfo/tensor.hpp"

#include <vector>

namespace tcfo {

// DFT bins retained around the CFO window [-gamma*f_max, +gamma*f_max]:
// zero-based bins {0..P-1} u {M-P-1..M-1}, deduplicated if the ranges
// overlap, in ascending bin order. Bin b maps to frequency b/(M*T) for
// b <= M/2 and (b-M)/(M*T) above.
struct ReducedFrequencyGrid {
    int ambient_size = 0;  // M
    int half_count = 0;    // P
    double bin_hz = 0.0;   // 1/(M*T)
    std::vector<int> kept; // zero-based DFT bins, ascending

    static ReducedFrequencyGrid make(int num_meas, double leakage_factor, double max_cfo_hz,
                                     double symbol_duration_s);
    // every bin kept (num_meas must be even; expressed as P = M/2)
    static ReducedFrequencyGrid full(int num_meas, double symbol_duration_s);
    // explicit P, for tests
    static ReducedFrequencyGrid with_half_count(int num_meas, int half_count,
                                                double symbol_duration_s);

    int num_slabs() const { return static_cast<int>(kept.size()); }
    int dft_bin(int slab) const { return kept[static_cast<std::size_t>(slab)]; }
    // signed frequency of a kept slab, Hz
    double freq_hz(int slab) const;
};

// Nearest point of the resolution-1/(M*T) CFO grid to a frequency. The bin
// is signed (DC = 0, negative bins are the wrapped upper half); exact
// half-bin offsets round toward zero frequency.
struct CfoGridPoint {
    bool on_grid = false;
    int nearest_bin = 0;   // signed, in [-M/2, M/2]
    double offset_hz = 0.0;
};
CfoGridPoint cfo_grid(double cfo_hz, int num_meas, double symbol_duration_s);

// Measurement tensor factors for all M measurements. Tensor n is
//   M_n(a, b, c) = (D_rx w_n)(a) * (D_tx conj(f_n))(b) * exp(-j*2*pi*k_c*n/M)
// with k_c the c-th kept DFT bin (all indices zero-based); only the three
// factor vectors per measurement are stored.
class SensingOperator {
  public:
    static SensingOperator build(const Codebook& codebook, const SteeringDictionary& rx,
                                 const SteeringDictionary& tx, ReducedFrequencyGrid grid);

    Index grid_rx() const { return rx_proj_.rows(); }
    Index grid_tx() const { return tx_proj_.rows(); }
    Index num_slabs() const { return slab_proj_.rows(); }
    Index num_meas() const { return rx_proj_.cols(); }
    const ReducedFrequencyGrid& freq_grid() const { return grid_; }

    // rx factor D_rx w_n, tx factor D_tx conj(f_n), frequency factor
    const CMat& rx_proj() const { return rx_proj_; }
    const CMat& tx_proj() const { return tx_proj_; }
    const CMat& slab_proj() const { return slab_proj_; }

    // component n = <G, M_n>
    CVec forward(const ComplexTensor3& g) const;
    // sum_n y[n] * M_n
    ComplexTensor3 adjoint(const CVec& y) const;

    // serial implementations of the defining formulas, via dense M_n
    CVec forward_ref(const ComplexTensor3& g) const;
    ComplexTensor3 adjoint_ref(const CVec& y) const;

    // dense M_n, for tests and the reference path
    ComplexTensor3 measurement_tensor(Index n) const;

    // column of the linear system restricted to one atom:
    // entry n = <unit tensor at (a,b,c), M_n> = conj(M_n(a,b,c))
    CVec atom_column(Index a, Index b, Index c) const;

    bool dims_match(const ComplexTensor3& g) const {
        return g.dim1() == grid_rx() && g.dim2() == grid_tx() && g.dim3() == num_slabs();
    }

  private:
    CMat rx_proj_;   // G_r x M
    CMat tx_proj_;   // G_t x M
    CMat slab_proj_; // S x M
    ReducedFrequencyGrid grid_;
};

// Builds dictionaries from the config's antenna counts and oversampling.
SensingOperator build_operator(const Codebook& codebook, const SystemConfig& cfg,
                               const ReducedFrequencyGrid& grid);

// Lifted (matrix) form of the same measurement model on the full frequency
// grid: row n of A is kron((D_tx conj(f_n))^H-as-row, (D_rx w_n)^H-as-row) so
// that the phase-error-free measurement is z[n] = A(n,:) * vec(C).
struct LiftedSystem {
    CMat a;        // M x (G_r*G_t)
    CMat dft_conj; // conj(U_M), M x M
    Index grid_rx = 0;
    Index grid_tx = 0;

    static LiftedSystem build(const Codebook& codebook, const SteeringDictionary& rx,
                              const SteeringDictionary& tx);
};

// component n = conj(U_M) row n * X * A row n transposed; for X = p*vec(C)^T
// this equals the tensor forward of C outer p on the full grid
CVec lifted_forward(const LiftedSystem& sys, const CMat& x);

} // namespace tcfo
