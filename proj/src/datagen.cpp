#include "tenring/datagen.hpp"

#include "tenring/error.hpp"
#include "tenring/linalg.hpp"
#include "tenring/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tenring {

namespace {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Philox4x32& rng) {
    std::normal_distribution<double> normal;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
    return m;
}

Matrix congruent_matrix(std::size_t rows, std::size_t cols, double gamma, Philox4x32& rng) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("congruent_matrix: gamma must lie in [0, 1)");
    if (cols == 0 || rows < cols) {
        throw DimensionError("congruent_matrix: need rows >= cols >= 1, got " + std::to_string(rows) + " x " +
                             std::to_string(cols));
    }
    const Matrix basis = qr_economy(gaussian_matrix(rows, cols, rng)).q;
    // (1-gamma) I + gamma J has eigenvalue 1-gamma off the ones vector and
    // 1+(n-1)gamma on it; its square root keeps the same eigenvectors.
    const double n = static_cast<double>(cols);
    const double lo = std::sqrt(1.0 - gamma);
    const double hi = std::sqrt(1.0 + (n - 1.0) * gamma);
    const auto k = static_cast<Eigen::Index>(cols);
    Matrix root = Matrix::Constant(k, k, (hi - lo) / n);
    root.diagonal().array() += lo;
    return basis * root;
}

Matrix student_t_matrix(std::size_t samples, std::size_t vars, double theta, double dof, Philox4x32& rng) {
    if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("student_t: theta must lie in [0, 1)");
    if (!(dof >= 1.0)) throw std::invalid_argument("student_t: degrees of freedom must be >= 1");
    std::normal_distribution<double> normal;
    std::gamma_distribution<double> chi2(dof / 2.0, 2.0);
    // AR(1) with unit marginal variance has correlation theta^|i-j|.
    const double innovation = std::sqrt((1.0 - theta) * (1.0 + theta));
    Matrix m(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(vars));
    for (Eigen::Index s = 0; s < m.rows(); ++s) {
        double prev = normal(rng);
        m(s, 0) = prev;
        for (Eigen::Index j = 1; j < m.cols(); ++j) {
            prev = theta * prev + innovation * normal(rng);
            m(s, j) = prev;
        }
        const double scale = std::sqrt(chi2(rng) / dof);
        m.row(s) /= scale;
    }
    return m;
}

}  // namespace

const char* to_string(CoreKind k) noexcept {
    switch (k) {
        case CoreKind::gaussian: return "gaussian";
        case CoreKind::congruent: return "congruent";
        case CoreKind::student_t: return "student_t";
    }
    return "?";
}

CoreKind parse_core_kind(const std::string& name) {
    for (CoreKind k : {CoreKind::gaussian, CoreKind::congruent, CoreKind::student_t})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown core kind '" + name + "'");
}

void SynthSpec::validate() const {
    if (order < 2) throw std::invalid_argument("synth: order must be >= 2");
    if (dim == 0 || true_rank == 0) throw std::invalid_argument("synth: dim and rank must be positive");
    if (!(eta >= 0.0)) throw std::invalid_argument("synth: eta must be >= 0");
    if (core_kind == CoreKind::congruent && !(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("synth: gamma must lie in [0, 1)");
    if (core_kind == CoreKind::student_t) {
        if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("synth: theta must lie in [0, 1)");
        if (!(dof >= 1.0)) throw std::invalid_argument("synth: dof must be >= 1");
    }
}

TrCores gaussian_cores(const SynthSpec& spec) {
    spec.validate();
    const Dims dims(spec.order, spec.dim), ranks(spec.order, spec.true_rank);
    TrCores cores = TrCores::zeros(dims, ranks);
    Philox4x32 rng(spec.seed, streams::cores);
    std::normal_distribution<double> normal;
    for (std::size_t n = 0; n < cores.order(); ++n)
        for (double& v : cores.core(n).data()) v = normal(rng);
    return cores;
}

Matrix congruent_matrix(std::size_t rows, std::size_t cols, double gamma, std::uint64_t seed) {
    Philox4x32 rng(seed, streams::basis);
    return congruent_matrix(rows, cols, gamma, rng);
}

Matrix student_t_matrix(std::size_t samples, std::size_t vars, double theta, double dof, std::uint64_t seed) {
    Philox4x32 rng(seed, streams::cores);
    return student_t_matrix(samples, vars, theta, dof, rng);
}

DenseTensor matrix_to_core(const Matrix& m, std::size_t rank) {
    if (rank == 0 || static_cast<std::size_t>(m.cols()) != rank * rank) {
        throw DimensionError("matrix_to_core: " + std::to_string(m.cols()) + " columns is not rank^2 for rank " +
                             std::to_string(rank));
    }
    return fold(m, 1, Dims{rank, static_cast<std::size_t>(m.rows()), rank}, Unfolding::classical);
}

Matrix core_to_matrix(const DenseTensor& g) {
    if (g.order() != 3) throw DimensionError("core_to_matrix: expected a third-order core");
    return classical_mode_n_unfold(g, 1);
}

TrCores congruent_cores(const SynthSpec& spec) {
    spec.validate();
    const std::size_t r = spec.true_rank;
    Philox4x32 rng(spec.seed, streams::basis);
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0; n < spec.order; ++n)
        cores.push_back(matrix_to_core(congruent_matrix(spec.dim, r * r, spec.gamma, rng), r));
    return TrCores(std::move(cores));
}

TrCores student_t_cores(const SynthSpec& spec) {
    spec.validate();
    const std::size_t r = spec.true_rank;
    Philox4x32 rng(spec.seed, streams::cores);
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0; n < spec.order; ++n)
        cores.push_back(matrix_to_core(student_t_matrix(spec.dim, r * r, spec.theta, spec.dof, rng), r));
    return TrCores(std::move(cores));
}

TrCores synth_cores(const SynthSpec& spec) {
    switch (spec.core_kind) {
        case CoreKind::gaussian: return gaussian_cores(spec);
        case CoreKind::congruent: return congruent_cores(spec);
        case CoreKind::student_t: return student_t_cores(spec);
    }
    throw std::invalid_argument("unknown core kind");
}

DenseTensor add_noise(const DenseTensor& x_true, double eta, std::uint64_t seed) {
    if (!(eta >= 0.0)) throw std::invalid_argument("add_noise: eta must be >= 0");
    if (eta == 0.0) return x_true;
    Philox4x32 rng(seed, streams::noise);
    std::normal_distribution<double> normal;
    DenseTensor noise(x_true.dims());
    for (double& v : noise.data()) v = normal(rng);
    const double scale = eta * frobenius_norm(x_true) / frobenius_norm(noise);
    DenseTensor out = x_true;
    out.as_vector() += scale * noise.as_vector();
    return out;
}

SynthResult synthesize(const SynthSpec& spec) {
    SynthResult out{synth_cores(spec), DenseTensor()};
    out.tensor = add_noise(tr_reconstruct(out.truth), spec.eta, spec.seed);
    return out;
}

}  // namespace tenring
