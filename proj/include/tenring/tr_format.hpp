#pragma once

// Tensor-ring representation: cores, subchain products, Gram tensors and the
// cheap inner-product / norm formulas.
//
// Core n has extents R_n x I_n x R_{n+1} with R_N = R_0 (ring closure).
// Its lateral slice G_n(i) = G_n(:, i, :) is an R_n x R_{n+1} matrix and
//     X(i_0, ..., i_{N-1}) = Trace(G_0(i_0) G_1(i_1) ... G_{N-1}(i_{N-1})).
//
// Gram tensor axis layout
// -----------------------
// P = sum_i G(i)^T o Z(i)^T is stored in plain outer-product order
//
//     P(a, b, c, d) = sum_i G(b, i, a) * Z(d, i, c)
//        a: row of G(i)^T  (R_{n+1})     c: row of Z(i)^T  (S_{n+1})
//        b: col of G(i)^T  (R_n)         d: col of Z(i)^T  (S_n)
//
// so that chaining with general_contracted_product_24_13 contracts the
// shared bond (b of the left factor with a of the right one, d with c):
//
//     P_{n-1} x_{2,4}^{1,3} P_{n-2}:   (R_n, [R_{n-1}], S_n, [S_{n-1}])
//                                   x ([R_{n-1}], R_{n-2}, [S_{n-1}], S_{n-2})
//
// With this layout a self-Gram satisfies P = Permute(P, [3,4,1,2]) and the
// "transpose" Permute(P, [2,1,4,3]) has 2-unfolding G_(2)^T G_(2).

#include "tenring/tensor.hpp"

#include <span>
#include <vector>

namespace tenring {

class TrCores {
public:
    TrCores() = default;
    /// Validates third order and ring-consistent bond extents.
    explicit TrCores(std::vector<DenseTensor> cores);

    /// All-zero cores, core n of extents ranks[n] x dims[n] x ranks[(n+1) % N].
    static TrCores zeros(const Dims& dims, const Dims& ranks);

    std::size_t order() const noexcept { return cores_.size(); }
    const DenseTensor& core(std::size_t n) const { return cores_.at(n); }
    DenseTensor& core(std::size_t n) { return cores_.at(n); }
    const std::vector<DenseTensor>& cores() const noexcept { return cores_; }

    /// R_n, the leading bond extent of core n.
    std::size_t rank(std::size_t n) const { return cores_.at(n).dim(0); }
    Dims ranks() const;
    /// Extents I_0..I_{N-1} of the represented tensor.
    Dims dims() const;

    /// Replace core n; the new core must keep both bond extents and I_n.
    void set_core(std::size_t n, DenseTensor core);

private:
    std::vector<DenseTensor> cores_;
};

struct GramTensor4 {
    DenseTensor tensor;
};

/// Mode-2 QR factorization x = r_tensor x_2 q.
struct Mode2Qr {
    DenseTensor r_tensor;
    Matrix q;
};

/// a (I1 x J1 x K) boxtimes_2 b (K x J2 x I2): slice j1 + J1*j2 is A(j1) * B(j2).
DenseTensor subchain_product_mode2(const DenseTensor& a, const DenseTensor& b);

/// Left-to-right subchain product of every tensor except `excluded`, taken in
/// ring order excluded+1, ..., N-1, 0, ..., excluded-1.
DenseTensor subchain_excluding(std::span<const DenseTensor> chain, std::size_t excluded);

/// G^{!=n}, extents R_{n+1} x prod_{j!=n} I_j x R_n.
DenseTensor subchain_tensor(const TrCores& cores, std::size_t n);

/// Full tensor; refuses when the result exceeds element_budget().
DenseTensor tr_reconstruct(const TrCores& cores);

GramTensor4 core_cross_gram(const DenseTensor& g, const DenseTensor& z);
GramTensor4 core_self_gram(const DenseTensor& g);

/// Left-to-right x_{2,4}^{1,3} contraction of the chain, as a 4th-order tensor.
DenseTensor gram_chain_tensor(std::span<const GramTensor4> grams);

/// 2-unfolding of the contracted chain. For self-Grams fed in the order
/// P_{n-1}, ..., P_0, P_{N-1}, ..., P_{n+1} this is (G^{!=n}_[2])^T G^{!=n}_[2].
Matrix gram_chain(std::span<const GramTensor4> grams);

/// gram_chain over all Grams except `excluded`, in the order above.
Matrix gram_chain_excluding(std::span<const GramTensor4> grams, std::size_t excluded);

/// 2-unfolding of Permute(P, [2,1,4,3]), i.e. G_(2)^T Z_(2).
Matrix gram_transpose_unfolding(const GramTensor4& p);

/// Mode-2 QR through the chosen unfolding (classical or cyclic); the
/// returned r_tensor has that unfolding upper triangular.
Mode2Qr mode2_qr(const DenseTensor& x, Unfolding flavor);
/// Mode-2 QR of a TR-core, through the classical unfolding G_n(2).
Mode2Qr mode2_qr_core(const DenseTensor& g);

/// <TR(a), TR(b)> from the Gram chain; ranks of a and b may differ.
double tr_inner_product(const TrCores& a, const TrCores& b);
double tr_frobenius_norm(const TrCores& a);

}  // namespace tenring
