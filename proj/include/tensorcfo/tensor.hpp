// SPDX-License-Identifier: Apache-2.0
//
// Dense complex order-3 tensors and the small algebraic toolbox built on
// them: inner product, norms, mode-3 unfolding, three-way outer products,
// DFT matrices, oversampled steering dictionaries and ULA array responses.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace tcfo {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// Order-3 complex tensor with a fixed linearization: element (i, j, k),
// zero-based, lives at data[i + n1*j + n1*n2*k]. The first index runs
// fastest, so each frontal slab (:,:,k) is a contiguous column-major
// n1 x n2 block and vec of a slab is just its storage.
class ComplexTensor3 {
  public:
    ComplexTensor3() = default;
    ComplexTensor3(Index n1, Index n2, Index n3);

    Index dim1() const { return n1_; }
    Index dim2() const { return n2_; }
    Index dim3() const { return n3_; }
    Index size() const { return static_cast<Index>(data_.size()); }
    bool same_dims(const ComplexTensor3& other) const {
        return n1_ == other.n1_ && n2_ == other.n2_ && n3_ == other.n3_;
    }

    cdouble& operator()(Index i, Index j, Index k) { return data_[linear_index(i, j, k)]; }
    const cdouble& operator()(Index i, Index j, Index k) const { return data_[linear_index(i, j, k)]; }

    Index linear_index(Index i, Index j, Index k) const { return i + n1_ * (j + n2_ * k); }

    cdouble* data() { return data_.data(); }
    const cdouble* data() const { return data_.data(); }

    // frontal slab (:,:,k) as an n1 x n2 matrix view
    Eigen::Map<CMat> slab(Index k) {
        return Eigen::Map<CMat>(data_.data() + n1_ * n2_ * k, n1_, n2_);
    }
    Eigen::Map<const CMat> slab(Index k) const {
        return Eigen::Map<const CMat>(data_.data() + n1_ * n2_ * k, n1_, n2_);
    }

    void set_zero() { std::fill(data_.begin(), data_.end(), cdouble(0.0, 0.0)); }

  private:
    Index n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<cdouble> data_;
};

// sum_{i,j,k} A(i,j,k) * conj(B(i,j,k)); dims must match
cdouble inner_product(const ComplexTensor3& a, const ComplexTensor3& b);

// sum of entry moduli
double l1_norm(const ComplexTensor3& a);

// sqrt(Re <A, A>)
double frob_norm(const ComplexTensor3& a);

// n3 x (n1*n2) matrix whose row k is vec(A(:,:,k))^T, vec stacking slab
// columns; exact inverse is mode3_fold
CMat mode3_unfold(const ComplexTensor3& a);
ComplexTensor3 mode3_fold(const CMat& unfolded, Index n1, Index n2);

// result(i,j,k) = u(i) * v(j) * w(k), no conjugation
ComplexTensor3 outer3(const CVec& u, const CVec& v, const CVec& w);

// ULA array response: entry i = exp(+j * i * theta), i = 0..n-1
CVec array_response(Index n, double theta);

// DFT matrix U_N(k,l) = exp(-j*2*pi*k*l/N), zero-based k,l. Symmetric,
// (1/N) * U * U^H = I.
CMat dft_matrix(Index n);

// Rows of an oversampled spatial grid: D is G x N with
// D(g, i) = exp(-j*2*pi*g*i/G), i.e. row g = array_response(N, 2*pi*g/G)^H.
// For G == N this is the DFT matrix.
struct SteeringDictionary {
    Index antennas = 0;  // N
    Index grid_size = 0; // G = oversampling * N
    CMat rows;           // G x N

    double grid_angle(Index g) const;
};

SteeringDictionary make_steering_dictionary(Index antennas, int oversampling);

} // namespace tcfo
