#include "tenring/tensor.hpp"

#include "tenring/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace tenring {

namespace {

using Index = Eigen::Index;
using StridedMap = Eigen::Map<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using StridedMutMap = Eigen::Map<Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

constexpr std::size_t kDefaultBudget = std::size_t{1} << 27;

void check_mode(const DenseTensor& x, std::size_t n, const char* what) {
    if (n >= x.order()) {
        throw DimensionError(std::string(what) + ": mode " + std::to_string(n) +
                             " out of range for order " + std::to_string(x.order()));
    }
}

// Extents before, at and after mode n.
struct ModeSplit {
    std::size_t left;
    std::size_t mid;
    std::size_t right;
};

ModeSplit split_at(const Dims& dims, std::size_t n) {
    ModeSplit s{1, dims[n], 1};
    for (std::size_t j = 0; j < n; ++j) s.left *= dims[j];
    for (std::size_t j = n + 1; j < dims.size(); ++j) s.right *= dims[j];
    return s;
}

}  // namespace

std::size_t num_elements(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::string dims_to_string(std::span<const std::size_t> dims) {
    std::ostringstream os;
    for (std::size_t k = 0; k < dims.size(); ++k) os << (k ? "x" : "") << dims[k];
    return os.str();
}

std::size_t element_budget() {
    if (const char* env = std::getenv("TENRING_BUDGET"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultBudget;
}

void check_budget(std::size_t elements) {
    const std::size_t budget = element_budget();
    if (elements > budget) throw BudgetExceeded(elements, budget);
}

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor() : dims_{1}, data_(1, 0.0) {}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
    if (dims_.empty()) dims_ = {1};
    if (std::find(dims_.begin(), dims_.end(), 0) != dims_.end()) {
        throw DimensionError("tensor extents must be positive, got " + dims_to_string(dims_));
    }
    data_.assign(num_elements(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data) : DenseTensor(std::move(dims)) {
    if (data.size() != data_.size()) {
        throw DimensionError("buffer of length " + std::to_string(data.size()) +
                             " does not match extents " + dims_to_string(dims_));
    }
    data_ = std::move(data);
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> idx) const {
    if (idx.size() != dims_.size()) throw DimensionError("index arity does not match order");
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        if (idx[n] >= dims_[n]) throw DimensionError("index out of range");
        lin += idx[n] * stride;
        stride *= dims_[n];
    }
    return lin;
}

DenseTensor& DenseTensor::operator*=(double s) {
    as_vector() *= s;
    return *this;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    if (other.dims_ != dims_) throw DimensionError("tensor sum: extents differ");
    as_vector() += other.as_vector();
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    if (other.dims_ != dims_) throw DimensionError("tensor difference: extents differ");
    as_vector() -= other.as_vector();
    return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

// ---------------------------------------------------------------------------
// Unfoldings

Matrix classical_mode_n_unfold(const DenseTensor& x, std::size_t n) {
    check_mode(x, n, "classical_mode_n_unfold");
    const auto [left, mid, right] = split_at(x.dims(), n);
    Matrix out(static_cast<Index>(mid), static_cast<Index>(left * right));
    // Slab r is the left x mid matrix X(:, :, r); it lands transposed in
    // columns [left*r, left*(r+1)).
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Matrix> slab(x.raw() + r * left * mid, static_cast<Index>(left),
                                      static_cast<Index>(mid));
        out.middleCols(static_cast<Index>(r * left), static_cast<Index>(left)) = slab.transpose();
    }
    return out;
}

Matrix mode_n_unfold(const DenseTensor& x, std::size_t n) {
    check_mode(x, n, "mode_n_unfold");
    const auto [left, mid, right] = split_at(x.dims(), n);
    Matrix out(static_cast<Index>(mid), static_cast<Index>(left * right));
    // Column r + right*l holds the fiber X(l, :, r).
    for (std::size_t l = 0; l < left; ++l) {
        StridedMap block(x.raw() + l, static_cast<Index>(mid), static_cast<Index>(right),
                         Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(
                             static_cast<Index>(left * mid), static_cast<Index>(left)));
        out.middleCols(static_cast<Index>(l * right), static_cast<Index>(right)) = block;
    }
    return out;
}

Matrix n_unfold(const DenseTensor& x, std::size_t split) {
    if (split > x.order()) {
        throw DimensionError("n_unfold: split " + std::to_string(split) +
                             " out of range for order " + std::to_string(x.order()));
    }
    std::size_t rows = 1;
    for (std::size_t j = 0; j < split; ++j) rows *= x.dim(j);
    return Eigen::Map<const Matrix>(x.raw(), static_cast<Index>(rows),
                                    static_cast<Index>(x.size() / rows));
}

Matrix unfold(const DenseTensor& x, std::size_t n, Unfolding flavor) {
    switch (flavor) {
        case Unfolding::classical: return classical_mode_n_unfold(x, n);
        case Unfolding::cyclic: return mode_n_unfold(x, n);
        case Unfolding::split: return n_unfold(x, n);
    }
    throw DimensionError("unknown unfolding");
}

DenseTensor fold(const Matrix& m, std::size_t n, const Dims& dims, Unfolding flavor) {
    DenseTensor out(dims);
    const std::size_t total = out.size();
    if (static_cast<std::size_t>(m.size()) != total) {
        throw DimensionError("fold: matrix of " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " does not match extents " +
                             dims_to_string(dims));
    }
    if (flavor == Unfolding::split) {
        if (n > out.order()) throw DimensionError("fold: split out of range");
        std::size_t rows = 1;
        for (std::size_t j = 0; j < n; ++j) rows *= dims[j];
        if (static_cast<std::size_t>(m.rows()) != rows) throw DimensionError("fold: row count mismatch");
        std::copy(m.data(), m.data() + total, out.raw());
        return out;
    }
    check_mode(out, n, "fold");
    const auto [left, mid, right] = split_at(out.dims(), n);
    if (static_cast<std::size_t>(m.rows()) != mid) throw DimensionError("fold: row count mismatch");
    if (flavor == Unfolding::classical) {
        for (std::size_t r = 0; r < right; ++r) {
            Eigen::Map<Matrix> slab(out.raw() + r * left * mid, static_cast<Index>(left),
                                    static_cast<Index>(mid));
            slab = m.middleCols(static_cast<Index>(r * left), static_cast<Index>(left)).transpose();
        }
    } else {
        for (std::size_t l = 0; l < left; ++l) {
            StridedMutMap block(out.raw() + l, static_cast<Index>(mid), static_cast<Index>(right),
                                Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(
                                    static_cast<Index>(left * mid), static_cast<Index>(left)));
            block = m.middleCols(static_cast<Index>(l * right), static_cast<Index>(right));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Products

DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> perm) {
    const std::size_t order = x.order();
    if (perm.size() != order) throw DimensionError("permute: permutation length != order");
    std::vector<bool> seen(order, false);
    for (auto p : perm) {
        if (p >= order || seen[p]) throw DimensionError("permute: not a permutation");
        seen[p] = true;
    }
    Dims out_dims(order);
    for (std::size_t k = 0; k < order; ++k) out_dims[k] = x.dim(perm[k]);
    DenseTensor out(out_dims);

    // Input stride of each output axis; walk the output in storage order.
    std::vector<std::size_t> in_stride(order);
    {
        std::vector<std::size_t> stride(order);
        std::size_t s = 1;
        for (std::size_t j = 0; j < order; ++j) {
            stride[j] = s;
            s *= x.dim(j);
        }
        for (std::size_t k = 0; k < order; ++k) in_stride[k] = stride[perm[k]];
    }
    std::vector<std::size_t> idx(order, 0);
    std::size_t src = 0;
    const double* in = x.raw();
    double* dst = out.raw();
    for (std::size_t lin = 0; lin < out.size(); ++lin) {
        dst[lin] = in[src];
        for (std::size_t k = 0; k < order; ++k) {
            if (++idx[k] < out_dims[k]) {
                src += in_stride[k];
                break;
            }
            src -= (out_dims[k] - 1) * in_stride[k];
            idx[k] = 0;
        }
    }
    return out;
}

DenseTensor permute(const DenseTensor& x, std::initializer_list<std::size_t> perm) {
    return permute(x, std::span<const std::size_t>(perm.begin(), perm.size()));
}

DenseTensor ttm(const DenseTensor& x, const Matrix& u, std::size_t n) {
    check_mode(x, n, "ttm");
    if (static_cast<std::size_t>(u.cols()) != x.dim(n)) {
        throw DimensionError("ttm: factor has " + std::to_string(u.cols()) +
                             " columns but mode " + std::to_string(n) + " has extent " +
                             std::to_string(x.dim(n)));
    }
    const auto [left, mid, right] = split_at(x.dims(), n);
    Dims out_dims = x.dims();
    out_dims[n] = static_cast<std::size_t>(u.rows());
    DenseTensor out(out_dims);
    const auto rows = static_cast<Index>(u.rows());
    if (left == 1) {
        Eigen::Map<const Matrix> in(x.raw(), static_cast<Index>(mid), static_cast<Index>(right));
        Eigen::Map<Matrix>(out.raw(), rows, static_cast<Index>(right)).noalias() = u * in;
        return out;
    }
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Matrix> in(x.raw() + r * left * mid, static_cast<Index>(left),
                                    static_cast<Index>(mid));
        Eigen::Map<Matrix>(out.raw() + r * left * static_cast<std::size_t>(rows),
                           static_cast<Index>(left), rows)
            .noalias() = in * u.transpose();
    }
    return out;
}

DenseTensor multi_ttm(const DenseTensor& x, std::span<const ModeFactor> factors) {
    std::vector<bool> used(x.order(), false);
    for (const auto& f : factors) {
        check_mode(x, f.mode, "multi_ttm");
        if (used[f.mode]) throw DimensionError("multi_ttm: duplicate mode " + std::to_string(f.mode));
        used[f.mode] = true;
    }
    if (factors.empty()) return x;
    DenseTensor y = ttm(x, factors.front().matrix, factors.front().mode);
    for (std::size_t k = 1; k < factors.size(); ++k) y = ttm(y, factors[k].matrix, factors[k].mode);
    return y;
}

DenseTensor outer_product(const DenseTensor& a, const DenseTensor& b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    DenseTensor out(dims);
    Eigen::Map<Matrix>(out.raw(), static_cast<Index>(a.size()), static_cast<Index>(b.size()))
        .noalias() = a.as_vector() * b.as_vector().transpose();
    return out;
}

DenseTensor contracted_product(const DenseTensor& a, std::size_t n, const DenseTensor& b,
                               std::size_t m) {
    check_mode(a, n, "contracted_product");
    check_mode(b, m, "contracted_product");
    if (a.dim(n) != b.dim(m)) {
        throw DimensionError("contracted_product: contracted extents " + std::to_string(a.dim(n)) +
                             " and " + std::to_string(b.dim(m)) + " differ");
    }
    Dims dims;
    for (std::size_t j = 0; j < a.order(); ++j)
        if (j != n) dims.push_back(a.dim(j));
    for (std::size_t j = 0; j < b.order(); ++j)
        if (j != m) dims.push_back(b.dim(j));
    // Contracting two vectors leaves a scalar.
    DenseTensor out(dims);
    const Matrix an = classical_mode_n_unfold(a, n);
    const Matrix bm = classical_mode_n_unfold(b, m);
    Eigen::Map<Matrix>(out.raw(), an.cols(), bm.cols()).noalias() = an.transpose() * bm;
    return out;
}

DenseTensor general_contracted_product_24_13(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() != 4 || b.order() != 4) {
        throw DimensionError("general contracted product needs two 4th-order tensors");
    }
    if (a.dim(1) != b.dim(0) || a.dim(3) != b.dim(2)) {
        throw DimensionError("general contracted product: contracted extents differ (" +
                             dims_to_string(a.dims()) + " vs " + dims_to_string(b.dims()) + ")");
    }
    const std::size_t i1 = a.dim(0), j = a.dim(1), r1 = a.dim(2), k = a.dim(3);
    const std::size_t i2 = b.dim(1), r2 = b.dim(3);
    // a -> (i1, r1, j, k) and b -> (j, k, i2, r2) make the contraction one GEMM.
    const DenseTensor ap = permute(a, {0, 2, 1, 3});
    const DenseTensor bp = permute(b, {0, 2, 1, 3});
    DenseTensor prod({i1, r1, i2, r2});
    Eigen::Map<Matrix>(prod.raw(), static_cast<Index>(i1 * r1), static_cast<Index>(i2 * r2))
        .noalias() = Eigen::Map<const Matrix>(ap.raw(), static_cast<Index>(i1 * r1),
                                              static_cast<Index>(j * k)) *
                     Eigen::Map<const Matrix>(bp.raw(), static_cast<Index>(j * k),
                                              static_cast<Index>(i2 * r2));
    return permute(prod, {0, 2, 1, 3});
}

double frobenius_inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims()) {
        throw DimensionError("frobenius_inner: extents " + dims_to_string(a.dims()) + " and " +
                             dims_to_string(b.dims()) + " differ");
    }
    return a.as_vector().dot(b.as_vector());
}

double frobenius_norm(const DenseTensor& a) { return a.as_vector().norm(); }

}  // namespace tenring
