// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tcfo {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ChannelParams::validate() const {
    if (num_rx < 1 || num_tx < 1 || num_clusters < 1 || rays_per_cluster < 1)
        throw std::invalid_argument("ChannelParams: counts must be >= 1");
    if (angular_spread_deg < 0.0 || angular_spread_deg >= 180.0)
        throw std::invalid_argument("ChannelParams: angular spread out of range");
    if (spacing_over_lambda <= 0.0)
        throw std::invalid_argument("ChannelParams: spacing must be positive");
}

CMat assemble_channel(const PathSet& paths, int num_rx, int num_tx) {
    if (paths.num_paths() != static_cast<Index>(paths.num_clusters) * paths.rays_per_cluster)
        throw std::invalid_argument("assemble_channel: path count mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(paths.num_clusters) *
                                         static_cast<double>(paths.rays_per_cluster));
    CMat h = CMat::Zero(num_rx, num_tx);
    for (Index p = 0; p < paths.num_paths(); ++p) {
        const CVec ar = array_response(num_rx, paths.omega_rx(p));
        const CVec at = array_response(num_tx, paths.omega_tx(p));
        h.noalias() += (scale * paths.gains(p)) * (ar * at.adjoint());
    }
    return h;
}

ChannelRealization draw_channel(const ChannelParams& params, Rng& rng) {
    params.validate();
    const Index total = static_cast<Index>(params.num_clusters) * params.rays_per_cluster;
    PathSet paths;
    paths.num_clusters = params.num_clusters;
    paths.rays_per_cluster = params.rays_per_cluster;
    paths.gains.resize(total);
    paths.aoa_rad.resize(total);
    paths.aod_rad.resize(total);
    paths.omega_rx.resize(total);
    paths.omega_tx.resize(total);

    const double spread = params.angular_spread_deg * kPi / 180.0;
    const double spatial = 2.0 * kPi * params.spacing_over_lambda;
    Index p = 0;
    for (int cl = 0; cl < params.num_clusters; ++cl) {
        const double aoa_center = -kPi / 2.0 + kPi * rng.uniform();
        const double aod_center = -kPi / 2.0 + kPi * rng.uniform();
        for (int ray = 0; ray < params.rays_per_cluster; ++ray, ++p) {
            paths.aoa_rad(p) = aoa_center + spread * (rng.uniform() - 0.5);
            paths.aod_rad(p) = aod_center + spread * (rng.uniform() - 0.5);
            paths.gains(p) = rng.complex_normal();
            paths.omega_rx(p) = spatial * std::sin(paths.aoa_rad(p));
            paths.omega_tx(p) = spatial * std::sin(paths.aod_rad(p));
        }
    }
    ChannelRealization real;
    real.paths = std::move(paths);
    real.h = assemble_channel(real.paths, params.num_rx, params.num_tx);
    return real;
}

CMat synth_on_grid(const CMat& coeffs, int oversampling) {
    if (oversampling < 1)
        throw std::invalid_argument("synth_on_grid: oversampling must be >= 1");
    if (coeffs.rows() % oversampling != 0 || coeffs.cols() % oversampling != 0)
        throw std::invalid_argument("synth_on_grid: grid dims not divisible by oversampling");
    const Index num_rx = coeffs.rows() / oversampling;
    const Index num_tx = coeffs.cols() / oversampling;
    const SteeringDictionary drx = make_steering_dictionary(num_rx, oversampling);
    const SteeringDictionary dtx = make_steering_dictionary(num_tx, oversampling);
    return drx.rows.adjoint() * coeffs * dtx.rows.conjugate();
}

CMat grid_coefficients_of(const CMat& h) {
    const CMat ur = dft_matrix(h.rows());
    const CMat ut = dft_matrix(h.cols());
    return (ur * h * ut) / static_cast<double>(h.rows() * h.cols());
}

GridCoefficients draw_sparse_coeffs(int sparsity, Index grid_rx, Index grid_tx, Rng& rng) {
    const Index total = grid_rx * grid_tx;
    if (sparsity < 0 || static_cast<Index>(sparsity) > total)
        throw std::invalid_argument("draw_sparse_coeffs: sparsity out of range");
    GridCoefficients out;
    out.c = CMat::Zero(grid_rx, grid_tx);
    out.sparsity = sparsity;

    // partial Fisher-Yates for distinct cells
    std::vector<Index> cells(static_cast<std::size_t>(total));
    std::iota(cells.begin(), cells.end(), Index{0});
    for (int k = 0; k < sparsity; ++k) {
        const Index pick = static_cast<Index>(k) +
                           static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(total - k)));
        std::swap(cells[static_cast<std::size_t>(k)], cells[static_cast<std::size_t>(pick)]);
        const Index cell = cells[static_cast<std::size_t>(k)];
        out.c(cell % grid_rx, cell / grid_rx) = rng.complex_normal();
    }
    return out;
}

} // namespace tcfo
