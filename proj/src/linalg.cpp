#include "tenring/linalg.hpp"

#include "tenring/error.hpp"

#include <algorithm>
#include <cmath>

namespace tenring {

using Index = Eigen::Index;

QrPair qr_economy(const Matrix& a) {
    if (a.size() == 0) throw DimensionError("qr_economy: empty matrix");
    const Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Matrix> qr(a);
    QrPair out;
    out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index i = 0; i < k; ++i) {
        if (out.r(i, i) < 0.0) {
            out.r.row(i) *= -1.0;
            out.q.col(i) *= -1.0;
        }
    }
    return out;
}

SpdSolveResult spd_solve(const Matrix& s, const Matrix& rhs) {
    if (s.rows() != s.cols()) throw DimensionError("spd_solve: matrix is not square");
    if (rhs.cols() != s.rows()) throw DimensionError("spd_solve: right-hand side width mismatch");
    const double scale = s.cwiseAbs().maxCoeff();
    if (scale > 0.0 && (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw DimensionError("spd_solve: matrix is not symmetric");
    }
    // Z s = rhs  <=>  s Z^T = rhs^T since s is symmetric.
    SpdSolveResult out;
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() == Eigen::Success && scale > 0.0) {
        out.z = llt.solve(rhs.transpose()).transpose();
        if (out.z.allFinite()) return out;
    }
    out.fallback_used = true;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(s);
    out.z = cod.solve(rhs.transpose()).transpose();
    return out;
}

Matrix tri_solve_right(const Matrix& r, const Matrix& rhs, double relative_floor) {
    if (r.rows() != r.cols()) throw DimensionError("tri_solve_right: matrix is not square");
    if (rhs.cols() != r.rows()) {
        throw DimensionError("tri_solve_right: right-hand side width mismatch");
    }
    const Index n = r.rows();
    const double floor = relative_floor * r.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
        const double d = std::abs(r(i, i));
        if (!(d > floor) || d == 0.0) throw DegenerateTriangular(static_cast<std::size_t>(i), d, floor);
    }
    // Row z of Z satisfies r * z^T = rhs_row^T; solve all rows at once on Y = Z^T.
    Matrix y = rhs.transpose();
    for (Index i = n - 1; i >= 0; --i) {
        if (i + 1 < n) {
            y.row(i).noalias() -= r.row(i).tail(n - i - 1) * y.bottomRows(n - i - 1);
        }
        y.row(i) /= r(i, i);
    }
    return y.transpose();
}

Matrix svd_solve_right(const Matrix& r, const Matrix& rhs, double rcond) {
    if (rhs.cols() != r.rows()) {
        throw DimensionError("svd_solve_right: right-hand side width mismatch");
    }
    // Z r^T = rhs  <=>  r Z^T = rhs^T; minimum-norm Z^T = pinv(r) rhs^T.
    Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double smax = sigma.size() ? sigma(0) : 0.0;
    Vector inv = Vector::Zero(sigma.size());
    for (Index i = 0; i < sigma.size(); ++i) {
        if (smax > 0.0 && sigma(i) > rcond * smax) inv(i) = 1.0 / sigma(i);
    }
    const Matrix zt = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * rhs.transpose());
    return zt.transpose();
}

Matrix lstsq_qr_right(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.cols()) throw DimensionError("lstsq_qr_right: row counts differ");
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.solve(b.transpose()).transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace tenring
