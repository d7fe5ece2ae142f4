// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcfo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<int> kept_bins(int num_meas, int half_count) {
    std::vector<int> bins;
    for (int b = 0; b <= half_count - 1; ++b)
        bins.push_back(b);
    for (int b = std::max(half_count, num_meas - half_count - 1); b <= num_meas - 1; ++b)
        bins.push_back(b); // dedup by starting past the first range
    return bins;
}
} // namespace

ReducedFrequencyGrid ReducedFrequencyGrid::with_half_count(int num_meas, int half_count,
                                                           double symbol_duration_s) {
    if (num_meas < 1 || half_count < 1 || symbol_duration_s <= 0.0)
        throw std::invalid_argument("ReducedFrequencyGrid: bad sizes");
    if (half_count > num_meas)
        throw std::invalid_argument("ReducedFrequencyGrid: half_count exceeds the DFT size");
    ReducedFrequencyGrid g;
    g.ambient_size = num_meas;
    g.half_count = half_count;
    g.bin_hz = 1.0 / (num_meas * symbol_duration_s);
    g.kept = kept_bins(num_meas, half_count);
    return g;
}

ReducedFrequencyGrid ReducedFrequencyGrid::make(int num_meas, double leakage_factor,
                                                double max_cfo_hz, double symbol_duration_s) {
    const double window = num_meas * leakage_factor * max_cfo_hz * symbol_duration_s;
    if (!(window > 0.0))
        throw std::invalid_argument("ReducedFrequencyGrid: CFO window is empty");
    const int half = static_cast<int>(std::ceil(window));
    return with_half_count(num_meas, half, symbol_duration_s);
}

ReducedFrequencyGrid ReducedFrequencyGrid::full(int num_meas, double symbol_duration_s) {
    if (num_meas % 2 != 0)
        throw std::invalid_argument("ReducedFrequencyGrid::full: num_meas must be even");
    return with_half_count(num_meas, num_meas / 2, symbol_duration_s);
}

double ReducedFrequencyGrid::freq_hz(int slab) const {
    const int b = dft_bin(slab);
    const int signed_bin = (2 * b <= ambient_size) ? b : b - ambient_size;
    return signed_bin * bin_hz;
}

CfoGridPoint cfo_grid(double cfo_hz, int num_meas, double symbol_duration_s) {
    const double bin_hz = 1.0 / (num_meas * symbol_duration_s);
    if (std::abs(cfo_hz) > 0.5 / symbol_duration_s + 1e-9)
        throw std::invalid_argument("cfo_grid: |cfo_hz| beyond half the symbol rate");
    const double x = cfo_hz / bin_hz;
    double nearest = std::round(x);
    if (std::abs(x - std::trunc(x)) == 0.5)
        nearest = std::trunc(x); // half-bin tie: toward zero frequency
    CfoGridPoint p;
    p.nearest_bin = static_cast<int>(nearest);
    p.offset_hz = cfo_hz - nearest * bin_hz;
    p.on_grid = std::abs(p.offset_hz) <= 1e-6;
    return p;
}

SensingOperator SensingOperator::build(const Codebook& codebook, const SteeringDictionary& rx,
                                       const SteeringDictionary& tx, ReducedFrequencyGrid grid) {
    const Index m = codebook.rx.cols();
    if (codebook.tx.cols() != m)
        throw std::invalid_argument("SensingOperator: codebook halves disagree on M");
    if (grid.ambient_size != m)
        throw std::invalid_argument("SensingOperator: frequency grid sized for a different M");
    if (codebook.rx.rows() != rx.antennas || codebook.tx.rows() != tx.antennas)
        throw std::invalid_argument("SensingOperator: dictionary antenna counts mismatch");

    SensingOperator op;
    op.grid_ = std::move(grid);
    op.rx_proj_ = rx.rows * codebook.rx;
    op.tx_proj_ = tx.rows * codebook.tx.conjugate();
    const int num_slabs = op.grid_.num_slabs();
    op.slab_proj_.resize(num_slabs, m);
    for (int c = 0; c < num_slabs; ++c) {
        const double bin = op.grid_.dft_bin(c);
        for (Index n = 0; n < m; ++n)
            op.slab_proj_(c, n) = std::polar(1.0, -kTwoPi * bin * static_cast<double>(n) /
                                                      static_cast<double>(m));
    }
    return op;
}

SensingOperator build_operator(const Codebook& codebook, const SystemConfig& cfg,
                               const ReducedFrequencyGrid& grid) {
    const SteeringDictionary rx = make_steering_dictionary(cfg.num_rx, cfg.grid_oversampling);
    const SteeringDictionary tx = make_steering_dictionary(cfg.num_tx, cfg.grid_oversampling);
    return SensingOperator::build(codebook, rx, tx, grid);
}

CVec SensingOperator::forward(const ComplexTensor3& g) const {
    if (!dims_match(g))
        throw std::invalid_argument("forward: tensor dims do not match operator");
    const Index m = num_meas();
    const Index gr = grid_rx();
    const Index gt = grid_tx();
    const Index s = num_slabs();
    CVec y(m);
    // component n = t_n^H (q_n^H (u_n^H G_slabs)) via the contiguous layout
    Eigen::Map<const CMat> flat(g.data(), gr, gt * s);
#pragma omp parallel for schedule(static)
    for (Index n = 0; n < m; ++n) {
        const Eigen::RowVectorXcd partial = rx_proj_.col(n).adjoint() * flat; // 1 x (gt*s)
        Eigen::Map<const CMat> by_slab(partial.data(), gt, s);
        const CVec per_slab = by_slab.transpose() * tx_proj_.col(n).conjugate(); // s x 1
        y(n) = slab_proj_.col(n).dot(per_slab);
    }
    return y;
}

ComplexTensor3 SensingOperator::adjoint(const CVec& y) const {
    if (y.size() != num_meas())
        throw std::invalid_argument("adjoint: measurement count mismatch");
    const Index s = num_slabs();
    ComplexTensor3 out(grid_rx(), grid_tx(), s);
    // slab c = U * diag(y .* t_c) * Q^T, one independent product per slab
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < s; ++c) {
        const CVec weights = y.array() * slab_proj_.row(c).transpose().array();
        out.slab(c).noalias() = rx_proj_ * (weights.asDiagonal() * tx_proj_.transpose());
    }
    return out;
}

CVec SensingOperator::forward_ref(const ComplexTensor3& g) const {
    if (!dims_match(g))
        throw std::invalid_argument("forward_ref: tensor dims do not match operator");
    CVec y(num_meas());
    for (Index n = 0; n < num_meas(); ++n)
        y(n) = inner_product(g, measurement_tensor(n));
    return y;
}

ComplexTensor3 SensingOperator::adjoint_ref(const CVec& y) const {
    if (y.size() != num_meas())
        throw std::invalid_argument("adjoint_ref: measurement count mismatch");
    ComplexTensor3 out(grid_rx(), grid_tx(), num_slabs());
    for (Index n = 0; n < num_meas(); ++n) {
        const ComplexTensor3 mn = measurement_tensor(n);
        cdouble* po = out.data();
        const cdouble* pm = mn.data();
        for (Index t = 0; t < out.size(); ++t)
            po[t] += y(n) * pm[t];
    }
    return out;
}

ComplexTensor3 SensingOperator::measurement_tensor(Index n) const {
    return outer3(rx_proj_.col(n), tx_proj_.col(n), slab_proj_.col(n));
}

CVec SensingOperator::atom_column(Index a, Index b, Index c) const {
    return (rx_proj_.row(a).array() * tx_proj_.row(b).array() * slab_proj_.row(c).array())
        .conjugate()
        .transpose();
}

LiftedSystem LiftedSystem::build(const Codebook& codebook, const SteeringDictionary& rx,
                                 const SteeringDictionary& tx) {
    const Index m = codebook.rx.cols();
    LiftedSystem sys;
    sys.grid_rx = rx.grid_size;
    sys.grid_tx = tx.grid_size;
    sys.a.resize(m, sys.grid_rx * sys.grid_tx);
    const CMat rxp = rx.rows * codebook.rx;            // G_r x M
    const CMat txp = tx.rows * codebook.tx.conjugate(); // G_t x M
    for (Index n = 0; n < m; ++n) {
        // row n, column (b*G_r + a) = conj(txp(b,n)) * conj(rxp(a,n)),
        // matching column-major vec(C)
        const CMat block = (rxp.col(n) * txp.col(n).transpose()).conjugate(); // G_r x G_t
        sys.a.row(n) = Eigen::Map<const CVec>(block.data(), block.size()).transpose();
    }
    sys.dft_conj = dft_matrix(m).conjugate();
    return sys;
}

CVec lifted_forward(const LiftedSystem& sys, const CMat& x) {
    const Index m = sys.a.rows();
    if (x.rows() != m || x.cols() != sys.a.cols())
        throw std::invalid_argument("lifted_forward: X must be M x (G_r*G_t)");
    CVec y(m);
    for (Index n = 0; n < m; ++n)
        y(n) = sys.dft_conj.row(n) * (x * sys.a.row(n).transpose());
    return y;
}

} // namespace tcfo
