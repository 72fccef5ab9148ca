#pragma once

// Dense N-th order tensors and the index-juggling primitives built on them.
//
// Layout: element (i_1, ..., i_N) lives at flat offset
//     i_1 + I_1 * (i_2 + I_2 * (i_3 + ...))
// i.e. the first index runs fastest. In the 1-based notation of the
// formulas this is the linear index 1 + sum_n (i_n - 1) prod_{j<n} I_j.
//
// Mode indices are 0-based everywhere in this API: "mode n" of the formulas
// is argument n - 1. The split point of n_unfold counts modes and therefore
// has the same value in both conventions.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tenring {

/// Column-major (first-index-fastest) dense matrix, the result type of all unfoldings.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using Dims = std::vector<std::size_t>;

/// Product of all extents; 1 for an empty list.
std::size_t num_elements(std::span<const std::size_t> dims);

std::string dims_to_string(std::span<const std::size_t> dims);

/// Largest dense tensor (in elements) the library will materialise.
/// Defaults to 2^27, overridable through the TENRING_BUDGET environment variable.
std::size_t element_budget();
void check_budget(std::size_t elements);

class DenseTensor {
public:
    /// Scalar zero, stored as an order-1 tensor of extent 1.
    DenseTensor();
    /// Zero-filled tensor of the given extents.
    explicit DenseTensor(Dims dims);
    DenseTensor(Dims dims, std::vector<double> data);

    std::size_t order() const noexcept { return dims_.size(); }
    const Dims& dims() const noexcept { return dims_; }
    std::size_t dim(std::size_t n) const { return dims_.at(n); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double* raw() noexcept { return data_.data(); }
    const double* raw() const noexcept { return data_.data(); }

    std::size_t linear_index(std::span<const std::size_t> idx) const;

    double& operator()(std::span<const std::size_t> idx) { return data_[linear_index(idx)]; }
    double operator()(std::span<const std::size_t> idx) const { return data_[linear_index(idx)]; }
    double& operator()(std::initializer_list<std::size_t> idx) {
        return (*this)(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    double operator()(std::initializer_list<std::size_t> idx) const {
        return (*this)(std::span<const std::size_t>(idx.begin(), idx.size()));
    }

    /// Flat buffer viewed as a column vector.
    Eigen::Map<Vector> as_vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
    Eigen::Map<const Vector> as_vector() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }

    DenseTensor& operator*=(double s);
    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Dims dims_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double s, DenseTensor a);

/// Which matricization a fold/unfold pair refers to.
enum class Unfolding {
    classical,  ///< X_(n): columns ordered i_1..i_{n-1} i_{n+1}..i_N
    cyclic,     ///< X_[n]: columns ordered i_{n+1}..i_N i_1..i_{n-1}
    split,      ///< X_<n>: rows i_1..i_n, columns i_{n+1}..i_N
};

Matrix classical_mode_n_unfold(const DenseTensor& x, std::size_t n);
Matrix mode_n_unfold(const DenseTensor& x, std::size_t n);
/// Buffer reinterpretation; `split` may be 0 (row vector) or order() (column vector).
Matrix n_unfold(const DenseTensor& x, std::size_t split);
Matrix unfold(const DenseTensor& x, std::size_t n, Unfolding flavor);

/// Exact inverse of `unfold(x, n, flavor)` for a tensor of extents `dims`.
DenseTensor fold(const Matrix& m, std::size_t n, const Dims& dims, Unfolding flavor);

/// Axis permutation: result dimension k is input dimension perm[k].
DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm);
DenseTensor permute(const DenseTensor& x, std::initializer_list<std::size_t> perm);

/// x ×_n u, u of shape J × I_n.
DenseTensor ttm(const DenseTensor& x, const Matrix& u, std::size_t n);

struct ModeFactor {
    std::size_t mode;
    Matrix matrix;
};

/// Sequential TTMs over distinct modes, applied in the given order.
DenseTensor multi_ttm(const DenseTensor& x, std::span<const ModeFactor> factors);

DenseTensor outer_product(const DenseTensor& a, const DenseTensor& b);

/// a ×_n^m b: single-mode contraction, free modes of a first then free modes of b.
DenseTensor contracted_product(const DenseTensor& a, std::size_t n, const DenseTensor& b,
                               std::size_t m);

/// (a ×_{2,4}^{1,3} b)(i1,i2,r1,r2) = sum_{j,k} a(i1,j,r1,k) b(j,i2,k,r2)
/// for a of extents (I1,J,R1,K) and b of extents (J,I2,K,R2).
DenseTensor general_contracted_product_24_13(const DenseTensor& a, const DenseTensor& b);

double frobenius_inner(const DenseTensor& a, const DenseTensor& b);
double frobenius_norm(const DenseTensor& a);

}  // namespace tenring
