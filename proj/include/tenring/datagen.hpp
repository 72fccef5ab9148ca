#pragma once

// Synthetic tensors: Gaussian cores, collinearity-controlled cores,
// multivariate-t cores, and additive Gaussian noise.
//
// Structured kinds (congruent, student_t) draw one rows x cols matrix per
// core and reshape it first-index-fastest into an R x I x R core: the rows
// become the middle mode, the columns split into the two bond modes,
//     G(a, i, b) = M(i, a + R * b).
// The experiments use dim = 100, rank = 5, i.e. 100 x 25 -> 5 x 100 x 5.

#include "tenring/tr_format.hpp"

#include <cstdint>

namespace tenring {

enum class CoreKind { gaussian, congruent, student_t };

const char* to_string(CoreKind k) noexcept;
CoreKind parse_core_kind(const std::string& name);

struct SynthSpec {
    std::size_t order = 3;
    std::size_t dim = 100;
    std::size_t true_rank = 5;
    CoreKind core_kind = CoreKind::gaussian;
    /// Common inner product of the unit generator columns (congruent).
    double gamma = 0.0;
    /// Correlation C(i, j) = theta^|i-j| and degrees of freedom (student_t).
    double theta = 0.0;
    double dof = 1.0;
    double eta = 0.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on parameters outside their ranges.
    void validate() const;
};

/// N cores true_rank x dim x true_rank with i.i.d. standard normal entries.
TrCores gaussian_cores(const SynthSpec& spec);

/// rows x cols, unit columns with every pairwise inner product equal to gamma.
Matrix congruent_matrix(std::size_t rows, std::size_t cols, double gamma, std::uint64_t seed);

/// `samples` draws (rows) of a `vars`-variate t distribution with correlation
/// theta^|i-j| and `dof` degrees of freedom.
Matrix student_t_matrix(std::size_t samples, std::size_t vars, double theta, double dof,
                        std::uint64_t seed);

/// M(i, a + R*b) -> G(a, i, b) and back.
DenseTensor matrix_to_core(const Matrix& m, std::size_t rank);
Matrix core_to_matrix(const DenseTensor& g);

TrCores congruent_cores(const SynthSpec& spec);
TrCores student_t_cores(const SynthSpec& spec);
/// Dispatches on spec.core_kind.
TrCores synth_cores(const SynthSpec& spec);

/// x_true + eta * (||x_true|| / ||N||) * N with standard-normal N.
/// eta = 0 returns x_true unchanged.
DenseTensor add_noise(const DenseTensor& x_true, double eta, std::uint64_t seed);

struct SynthResult {
    TrCores truth;
    DenseTensor tensor;
};

/// Cores, their dense reconstruction, and noise drawn from the same seed.
SynthResult synthesize(const SynthSpec& spec);

}  // namespace tenring
