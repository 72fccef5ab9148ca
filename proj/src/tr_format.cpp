#include "tenring/tr_format.hpp"

#include "tenring/error.hpp"
#include "tenring/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tenring {

using Index = Eigen::Index;

namespace {

void require_third_order(const DenseTensor& t, const char* what) {
    if (t.order() != 3) {
        throw DimensionError(std::string(what) + ": expected a third-order tensor, got extents " +
                             dims_to_string(t.dims()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// TrCores

TrCores::TrCores(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
    const std::size_t n = cores_.size();
    for (std::size_t k = 0; k < n; ++k) {
        require_third_order(cores_[k], "TrCores");
        const std::size_t next = (k + 1) % n;
        if (cores_[k].dim(2) != cores_[next].dim(0)) {
            throw DimensionError("TrCores: core " + std::to_string(k) + " trailing rank " +
                                 std::to_string(cores_[k].dim(2)) + " != core " +
                                 std::to_string(next) + " leading rank " +
                                 std::to_string(cores_[next].dim(0)));
        }
    }
}

TrCores TrCores::zeros(const Dims& dims, const Dims& ranks) {
    if (dims.size() != ranks.size()) {
        throw DimensionError("TrCores::zeros: " + std::to_string(ranks.size()) + " ranks for order " +
                             std::to_string(dims.size()));
    }
    std::vector<DenseTensor> cores;
    const std::size_t n = dims.size();
    for (std::size_t k = 0; k < n; ++k) cores.emplace_back(Dims{ranks[k], dims[k], ranks[(k + 1) % n]});
    return TrCores(std::move(cores));
}

Dims TrCores::ranks() const {
    Dims r;
    for (const auto& c : cores_) r.push_back(c.dim(0));
    return r;
}

Dims TrCores::dims() const {
    Dims d;
    for (const auto& c : cores_) d.push_back(c.dim(1));
    return d;
}

void TrCores::set_core(std::size_t n, DenseTensor core) {
    if (core.dims() != cores_.at(n).dims()) {
        throw DimensionError("set_core: extents " + dims_to_string(core.dims()) + " != " +
                             dims_to_string(cores_[n].dims()));
    }
    cores_[n] = std::move(core);
}

// ---------------------------------------------------------------------------
// Subchain products

DenseTensor subchain_product_mode2(const DenseTensor& a, const DenseTensor& b) {
    require_third_order(a, "subchain_product_mode2");
    require_third_order(b, "subchain_product_mode2");
    if (a.dim(2) != b.dim(0)) {
        throw DimensionError("subchain_product_mode2: bond extents " + std::to_string(a.dim(2)) +
                             " and " + std::to_string(b.dim(0)) + " differ");
    }
    const std::size_t i1 = a.dim(0), j1 = a.dim(1), k = a.dim(2);
    const std::size_t j2 = b.dim(1), i2 = b.dim(2);
    DenseTensor out({i1, j1 * j2, i2});

    // With A viewed as its (I1*J1) x K 2-unfolding, all slices pairing with
    // B(j2) come out of one product, landing at column stride I1*J1*J2.
    Eigen::Map<const Matrix> a2(a.raw(), static_cast<Index>(i1 * j1), static_cast<Index>(k));
    for (std::size_t s = 0; s < j2; ++s) {
        Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> bs(
            b.raw() + k * s, static_cast<Index>(k), static_cast<Index>(i2),
            Eigen::OuterStride<>(static_cast<Index>(k * j2)));
        Eigen::Map<Matrix, 0, Eigen::OuterStride<>> cs(
            out.raw() + i1 * j1 * s, static_cast<Index>(i1 * j1), static_cast<Index>(i2),
            Eigen::OuterStride<>(static_cast<Index>(i1 * j1 * j2)));
        cs.noalias() = a2 * bs;
    }
    return out;
}

DenseTensor subchain_excluding(std::span<const DenseTensor> chain, std::size_t excluded) {
    const std::size_t n = chain.size();
    if (n < 2) throw DimensionError("subchain tensor needs at least two cores");
    if (excluded >= n) throw DimensionError("subchain tensor: excluded mode out of range");
    DenseTensor acc = chain[(excluded + 1) % n];
    for (std::size_t t = 2; t < n; ++t) acc = subchain_product_mode2(acc, chain[(excluded + t) % n]);
    return acc;
}

DenseTensor subchain_tensor(const TrCores& cores, std::size_t n) {
    return subchain_excluding(cores.cores(), n);
}

DenseTensor tr_reconstruct(const TrCores& cores) {
    if (cores.order() < 2) throw DimensionError("tr_reconstruct needs at least two cores");
    const Dims dims = cores.dims();
    check_budget(num_elements(dims));
    // X_[1] = G_1(2) (G^{!=1}_[2])^T, and X_[1] is the flat buffer itself.
    const Matrix g0 = classical_mode_n_unfold(cores.core(0), 1);
    const Matrix rest = mode_n_unfold(subchain_tensor(cores, 0), 1);
    DenseTensor out(dims);
    Eigen::Map<Matrix>(out.raw(), g0.rows(), rest.rows()).noalias() = g0 * rest.transpose();
    return out;
}

// ---------------------------------------------------------------------------
// Gram tensors

namespace {

// Column i is vec(G(i)^T) in first-index-fastest order: row a + R_{n+1} * b
// holds G(b, i, a).
Matrix transposed_slices(const DenseTensor& g) {
    const std::size_t r0 = g.dim(0), len = g.dim(1), r1 = g.dim(2);
    Matrix out(static_cast<Index>(r1 * r0), static_cast<Index>(len));
    const double* p = g.raw();
    for (std::size_t a = 0; a < r1; ++a)
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t b = 0; b < r0; ++b)
                out(static_cast<Index>(a + r1 * b), static_cast<Index>(i)) = p[b + r0 * (i + len * a)];
    return out;
}

}  // namespace

GramTensor4 core_cross_gram(const DenseTensor& g, const DenseTensor& z) {
    require_third_order(g, "core_cross_gram");
    require_third_order(z, "core_cross_gram");
    if (g.dim(1) != z.dim(1)) {
        throw DimensionError("core_cross_gram: lateral slice counts " + std::to_string(g.dim(1)) +
                             " and " + std::to_string(z.dim(1)) + " differ");
    }
    const Matrix gt = transposed_slices(g);
    const Matrix zt = &g == &z ? gt : transposed_slices(z);
    GramTensor4 p{DenseTensor({g.dim(2), g.dim(0), z.dim(2), z.dim(0)})};
    Eigen::Map<Matrix>(p.tensor.raw(), gt.rows(), zt.rows()).noalias() = gt * zt.transpose();
    return p;
}

GramTensor4 core_self_gram(const DenseTensor& g) { return core_cross_gram(g, g); }

DenseTensor gram_chain_tensor(std::span<const GramTensor4> grams) {
    if (grams.empty()) throw DimensionError("gram_chain: empty chain");
    for (const auto& p : grams) {
        if (p.tensor.order() != 4) throw DimensionError("gram_chain: Gram tensors are 4th order");
    }
    DenseTensor acc = grams.front().tensor;
    for (std::size_t k = 1; k < grams.size(); ++k) {
        acc = general_contracted_product_24_13(acc, grams[k].tensor);
    }
    return acc;
}

Matrix gram_chain(std::span<const GramTensor4> grams) { return n_unfold(gram_chain_tensor(grams), 2); }

Matrix gram_chain_excluding(std::span<const GramTensor4> grams, std::size_t excluded) {
    const std::size_t n = grams.size();
    if (n < 2) throw DimensionError("gram_chain_excluding needs at least two Gram tensors");
    if (excluded >= n) throw DimensionError("gram_chain_excluding: mode out of range");
    DenseTensor acc = grams[(excluded + n - 1) % n].tensor;
    for (std::size_t t = 2; t < n; ++t) {
        acc = general_contracted_product_24_13(acc, grams[(excluded + n - t) % n].tensor);
    }
    return n_unfold(acc, 2);
}

Matrix gram_transpose_unfolding(const GramTensor4& p) {
    return n_unfold(permute(p.tensor, {1, 0, 3, 2}), 2);
}

// ---------------------------------------------------------------------------
// Mode-2 QR

Mode2Qr mode2_qr(const DenseTensor& x, Unfolding flavor) {
    require_third_order(x, "mode2_qr");
    if (flavor == Unfolding::split) throw DimensionError("mode2_qr: split unfolding has no mode-2 QR");
    QrPair qr = qr_economy(unfold(x, 1, flavor));
    Dims rdims = x.dims();
    rdims[1] = static_cast<std::size_t>(qr.q.cols());
    return Mode2Qr{fold(qr.r, 1, rdims, flavor), std::move(qr.q)};
}

Mode2Qr mode2_qr_core(const DenseTensor& g) { return mode2_qr(g, Unfolding::classical); }

// ---------------------------------------------------------------------------
// Inner product

double tr_inner_product(const TrCores& a, const TrCores& b) {
    if (a.order() != b.order() || a.order() == 0) {
        throw DimensionError("tr_inner_product: orders differ");
    }
    if (a.dims() != b.dims()) {
        throw DimensionError("tr_inner_product: mode extents " + dims_to_string(a.dims()) + " and " +
                             dims_to_string(b.dims()) + " differ");
    }
    const std::size_t n = a.order();
    std::vector<GramTensor4> grams;
    grams.reserve(n);
    for (std::size_t k = n; k-- > 0;) grams.push_back(core_cross_gram(a.core(k), b.core(k)));
    // T(l1, i1, l2, i2) = sum_j Ga(j)(i1, l1) Gb(j)(i2, l2) for the full ring
    // products Ga(j), Gb(j); closing both rings gives sum_{a,b} T(a, a, b, b).
    const DenseTensor t = gram_chain_tensor(grams);
    const std::size_t ra = t.dim(0), sb = t.dim(2);
    double sum = 0.0;
    for (std::size_t p = 0; p < ra; ++p)
        for (std::size_t q = 0; q < sb; ++q) sum += t({p, p, q, q});
    return sum;
}

double tr_frobenius_norm(const TrCores& a) { return std::sqrt(std::max(0.0, tr_inner_product(a, a))); }

}  // namespace tenring
