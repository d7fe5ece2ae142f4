// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/estimator.hpp"

#include "tensorcfo/frontend.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace tcfo {

namespace {

struct TopPair {
    double sv1 = 0.0;
    double sv2 = 0.0;
    CVec left;  // length rows
    CVec right; // length cols
};

// Top singular triplet plus the runner-up singular value. Full SVD accuracy
// matters here: the runner-up feeds the rank-1 ambiguity diagnostic, and a
// Gram-matrix shortcut would only resolve it to sqrt(machine epsilon).
TopPair top_singular_pair(const CMat& a) {
    const Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TopPair out;
    out.sv1 = svd.singularValues()(0);
    out.sv2 = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
    out.left = svd.matrixU().col(0);
    out.right = svd.matrixV().col(0);
    return out;
}

// Rotates v so its largest-modulus entry (first on ties) is real positive;
// returns the removed phase.
double normalize_phase(CVec& v) {
    Index best = 0;
    double best_mag = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    const double theta = best_mag > 0.0 ? std::arg(v(best)) : 0.0;
    v *= std::polar(1.0, -theta);
    return theta;
}

CMat columns_for_support(const SensingOperator& op, std::span<const SupportEntry> support) {
    CMat b(op.num_meas(), static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s)
        b.col(static_cast<Index>(s)) = op.atom_column(support[s].rx_bin, support[s].tx_bin, support[s].slab);
    return b;
}

} // namespace

CVec solve_ls_columns(const CMat& b, const CVec& y, double ridge_scale, bool* regularized) {
    if (b.cols() == 0)
        return CVec();
    Eigen::ColPivHouseholderQR<CMat> qr(b);
    if (qr.rank() == b.cols())
        return qr.solve(y);
    if (regularized)
        *regularized = true;
    CMat normal = b.adjoint() * b;
    const double ridge = ridge_scale * normal.trace().real() / static_cast<double>(b.cols());
    normal.diagonal().array() += ridge;
    return normal.ldlt().solve(b.adjoint() * y);
}

OmpResult tensor_omp(const CVec& y, const SensingOperator& op, const OmpConfig& cfg) {
    if (y.size() != op.num_meas())
        throw std::invalid_argument("tensor_omp: measurement count mismatch");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("tensor_omp: max_iterations must be >= 1");

    OmpResult result;
    result.coeffs = ComplexTensor3(op.grid_rx(), op.grid_tx(), op.num_slabs());

    CVec residual = y;
    double res_sq = residual.squaredNorm();
    result.residual_norms.push_back(std::sqrt(res_sq));

    std::vector<char> chosen(static_cast<std::size_t>(result.coeffs.size()), 0);
    CMat basis(op.num_meas(), 0);
    CVec values;

    while (res_sq > cfg.epsilon && result.iterations < cfg.max_iterations) {
        const ComplexTensor3 corr = op.adjoint(residual);

        // argmax of |corr| over unselected entries, ties to the
        // lexicographically smallest (a, b, c)
        double best_mag = -1.0;
        std::tuple<Index, Index, Index> best{0, 0, 0};
        for (Index a = 0; a < corr.dim1(); ++a)
            for (Index b = 0; b < corr.dim2(); ++b)
                for (Index c = 0; c < corr.dim3(); ++c) {
                    if (chosen[static_cast<std::size_t>(corr.linear_index(a, b, c))])
                        continue;
                    const double m = std::abs(corr(a, b, c));
                    if (m > best_mag) {
                        best_mag = m;
                        best = {a, b, c};
                    }
                }
        if (best_mag <= 0.0)
            break; // residual uncorrelated with every remaining atom

        const auto [a, b, c] = best;
        chosen[static_cast<std::size_t>(result.coeffs.linear_index(a, b, c))] = 1;
        result.support.push_back({a, b, c});

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = op.atom_column(a, b, c);
        values = solve_ls_columns(basis, y, cfg.ls_ridge_scale, &result.ls_regularized);

        residual = y - basis * values;
        res_sq = residual.squaredNorm();
        result.residual_norms.push_back(std::sqrt(res_sq));
        ++result.iterations;
    }

    for (std::size_t s = 0; s < result.support.size(); ++s) {
        const SupportEntry& e = result.support[s];
        result.coeffs(e.rx_bin, e.tx_bin, e.slab) = values(static_cast<Index>(s));
    }
    return result;
}

ComplexTensor3 restricted_least_squares(const CVec& y, const SensingOperator& op,
                                        std::span<const SupportEntry> support,
                                        double ridge_scale, bool* regularized) {
    if (static_cast<Index>(support.size()) > op.num_meas())
        throw std::invalid_argument("restricted_least_squares: support larger than M");
    ComplexTensor3 out(op.grid_rx(), op.grid_tx(), op.num_slabs());
    if (support.empty())
        return out;
    const CMat basis = columns_for_support(op, support);
    const CVec values = solve_ls_columns(basis, y, ridge_scale, regularized);
    for (std::size_t s = 0; s < support.size(); ++s)
        out(support[s].rx_bin, support[s].tx_bin, support[s].slab) = values(static_cast<Index>(s));
    return out;
}

RankOneSplit split_rank_one(const ComplexTensor3& g) {
    if (frob_norm(g) == 0.0)
        throw std::invalid_argument("split_rank_one: zero tensor");
    const CMat unfolded = mode3_unfold(g); // S x (G_r*G_t)
    TopPair top = top_singular_pair(unfolded);

    RankOneSplit split;
    split.top_sv = top.sv1;
    split.second_sv = top.sv2;
    split.ambiguous = (top.sv1 - top.sv2) <= 1e-10 * top.sv1;

    split.spectrum = top.left;
    const double theta = normalize_phase(split.spectrum);
    // spectrum * vec(coeffs)^T must equal sv1 * u * v^H
    CVec vec_coeffs = (split.top_sv * std::polar(1.0, theta)) * top.right.conjugate();
    split.coeffs = Eigen::Map<const CMat>(vec_coeffs.data(), g.dim1(), g.dim2());
    return split;
}

CMat reconstruct_channel(const CMat& coeffs, int oversampling) {
    return synth_on_grid(coeffs, oversampling);
}

BeamPair select_beams(const CMat& h_est, int phase_levels) {
    if (h_est.norm() == 0.0)
        throw std::invalid_argument("select_beams: zero channel estimate");
    TopPair top = top_singular_pair(h_est);
    normalize_phase(top.left);
    normalize_phase(top.right);
    BeamPair beams;
    beams.rx = phase_quantize(top.left, phase_levels);
    beams.tx = phase_quantize(top.right, phase_levels);
    return beams;
}

double estimate_cfo(const CVec& spectrum, const ReducedFrequencyGrid& grid) {
    if (spectrum.size() != static_cast<Index>(grid.num_slabs()))
        throw std::invalid_argument("estimate_cfo: spectrum length must match kept slabs");
    if (spectrum.norm() == 0.0)
        throw std::invalid_argument("estimate_cfo: zero spectrum");

    int peak = 0;
    double peak_mag = -1.0;
    for (int c = 0; c < grid.num_slabs(); ++c) {
        const double m = std::abs(spectrum(c));
        if (m > peak_mag) {
            peak_mag = m;
            peak = c;
        }
    }

    // slabs ordered by signed frequency; centroid over the peak and its
    // available neighbors
    std::vector<int> order(static_cast<std::size_t>(grid.num_slabs()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int lhs, int rhs) { return grid.freq_hz(lhs) < grid.freq_hz(rhs); });
    const auto pos_it = std::find(order.begin(), order.end(), peak);
    const int pos = static_cast<int>(pos_it - order.begin());

    double energy = 0.0;
    double weighted = 0.0;
    for (int d = -1; d <= 1; ++d) {
        const int p = pos + d;
        if (p < 0 || p >= static_cast<int>(order.size()))
            continue;
        const int slab = order[static_cast<std::size_t>(p)];
        const double e = std::norm(spectrum(slab));
        energy += e;
        weighted += e * grid.freq_hz(slab);
    }
    return weighted / energy;
}

VectorOmpResult standard_omp(const CVec& y, const CMat& a, const OmpConfig& cfg) {
    if (y.size() != a.rows())
        throw std::invalid_argument("standard_omp: measurement count mismatch");

    VectorOmpResult result;
    result.x = CVec::Zero(a.cols());

    CVec residual = y;
    double res_sq = residual.squaredNorm();
    result.residual_norms.push_back(std::sqrt(res_sq));

    std::vector<char> chosen(static_cast<std::size_t>(a.cols()), 0);
    CMat basis(a.rows(), 0);
    CVec values;

    while (res_sq > cfg.epsilon && result.iterations < cfg.max_iterations) {
        const CVec corr = a.adjoint() * residual;
        Index pick = -1;
        double best_mag = -1.0;
        for (Index i = 0; i < corr.size(); ++i) {
            if (chosen[static_cast<std::size_t>(i)])
                continue;
            const double m = std::abs(corr(i));
            if (m > best_mag) {
                best_mag = m;
                pick = i;
            }
        }
        if (pick < 0 || best_mag <= 0.0)
            break;

        chosen[static_cast<std::size_t>(pick)] = 1;
        result.support.push_back(pick);
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = a.col(pick);
        values = solve_ls_columns(basis, y, cfg.ls_ridge_scale, &result.ls_regularized);

        residual = y - basis * values;
        res_sq = residual.squaredNorm();
        result.residual_norms.push_back(std::sqrt(res_sq));
        ++result.iterations;
    }

    for (std::size_t s = 0; s < result.support.size(); ++s)
        result.x(result.support[s]) = values(static_cast<Index>(s));
    return result;
}

EstimationResult estimate_channel_cfo(const CVec& y, const SensingOperator& op,
                                      const OmpConfig& cfg, int phase_levels, int oversampling) {
    EstimationResult est;
    est.omp = tensor_omp(y, op, cfg);
    if (est.omp.support.empty() || frob_norm(est.omp.coeffs) == 0.0)
        return est; // nothing recovered; caller decides on a fallback

    const RankOneSplit split = split_rank_one(est.omp.coeffs);
    est.coeffs = split.coeffs;
    est.spectrum = split.spectrum;
    est.split_ambiguous = split.ambiguous;
    est.h_est = reconstruct_channel(split.coeffs, oversampling);
    est.cfo_hz_hat = estimate_cfo(split.spectrum, op.freq_grid());
    if (est.h_est.norm() == 0.0)
        return est;
    est.beams = select_beams(est.h_est, phase_levels);
    est.valid = true;
    return est;
}

} // namespace tcfo
