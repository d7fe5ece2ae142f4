// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/tensor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcfo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ComplexTensor3::ComplexTensor3(Index n1, Index n2, Index n3) : n1_(n1), n2_(n2), n3_(n3) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0)
        throw std::invalid_argument("ComplexTensor3: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), cdouble(0.0, 0.0));
}

cdouble inner_product(const ComplexTensor3& a, const ComplexTensor3& b) {
    if (!a.same_dims(b))
        throw std::invalid_argument("inner_product: dimension mismatch");
    cdouble acc(0.0, 0.0);
    const cdouble* pa = a.data();
    const cdouble* pb = b.data();
    const Index n = a.size();
    for (Index t = 0; t < n; ++t)
        acc += pa[t] * std::conj(pb[t]);
    return acc;
}

double l1_norm(const ComplexTensor3& a) {
    double acc = 0.0;
    const cdouble* p = a.data();
    for (Index t = 0; t < a.size(); ++t)
        acc += std::abs(p[t]);
    return acc;
}

double frob_norm(const ComplexTensor3& a) {
    double acc = 0.0;
    const cdouble* p = a.data();
    for (Index t = 0; t < a.size(); ++t)
        acc += std::norm(p[t]);
    return std::sqrt(acc);
}

CMat mode3_unfold(const ComplexTensor3& a) {
    // each slab is contiguous, so the unfolding is the transpose of the
    // (n1*n2) x n3 column-major view of the storage
    Eigen::Map<const CMat> flat(a.data(), a.dim1() * a.dim2(), a.dim3());
    return flat.transpose();
}

ComplexTensor3 mode3_fold(const CMat& unfolded, Index n1, Index n2) {
    if (unfolded.cols() != n1 * n2)
        throw std::invalid_argument("mode3_fold: column count must equal n1*n2");
    ComplexTensor3 out(n1, n2, unfolded.rows());
    Eigen::Map<CMat> flat(out.data(), n1 * n2, unfolded.rows());
    flat = unfolded.transpose();
    return out;
}

ComplexTensor3 outer3(const CVec& u, const CVec& v, const CVec& w) {
    ComplexTensor3 out(u.size(), v.size(), w.size());
    for (Index k = 0; k < w.size(); ++k)
        out.slab(k) = w(k) * (u * v.transpose());
    return out;
}

CVec array_response(Index n, double theta) {
    CVec a(n);
    for (Index i = 0; i < n; ++i)
        a(i) = std::polar(1.0, static_cast<double>(i) * theta);
    return a;
}

CMat dft_matrix(Index n) {
    if (n <= 0)
        throw std::invalid_argument("dft_matrix: size must be positive");
    CMat u(n, n);
    for (Index k = 0; k < n; ++k)
        for (Index l = 0; l <= k; ++l) {
            const cdouble e = std::polar(1.0, -kTwoPi * static_cast<double>(k) * static_cast<double>(l) / static_cast<double>(n));
            u(k, l) = e;
            u(l, k) = e;
        }
    return u;
}

double SteeringDictionary::grid_angle(Index g) const {
    return kTwoPi * static_cast<double>(g) / static_cast<double>(grid_size);
}

SteeringDictionary make_steering_dictionary(Index antennas, int oversampling) {
    if (antennas <= 0 || oversampling < 1)
        throw std::invalid_argument("make_steering_dictionary: bad sizes");
    SteeringDictionary d;
    d.antennas = antennas;
    d.grid_size = antennas * oversampling;
    d.rows.resize(d.grid_size, antennas);
    for (Index g = 0; g < d.grid_size; ++g)
        d.rows.row(g) = array_response(antennas, d.grid_angle(g)).adjoint();
    return d;
}

} // namespace tcfo
