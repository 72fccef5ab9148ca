#pragma once

// Alternating least squares for tensor-ring decomposition.
//
// Four solvers share one driver and differ only in how the mode-n
// subproblem  min || G^{!=n}_[2] G_n(2)^T - X_[n]^T ||_F  is formed and solved:
//
//   als   dense Householder QR of the explicit G^{!=n}_[2]
//   ne    normal equations; the Gram matrix comes from the Gram-tensor chain
//         and the right-hand side from X_[n] G^{!=n}_[2] (MTTSP)
//   qr    mode-2 QR of every core, a QR of the small subchain V_n of the
//         triangular factors, Multi-TTM of X by the Q_j^T, and a triangular solve
//   qrne  the projected problem of `qr` solved by normal equations built from
//         Gram tensors of the triangular factors
//
// Modes are swept 0..N-1 in every outer iteration.

#include "tenring/tr_format.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tenring {

enum class Variant { als, ne, qr, qrne };
enum class ErrorMode { exact, cheap, none };
enum class Termination { max_iters, tolerance, zero_input, degenerate_triangular };

const char* to_string(Variant v) noexcept;
const char* to_string(ErrorMode m) noexcept;
const char* to_string(Termination t) noexcept;
/// Accepts the names produced by to_string; throws std::invalid_argument otherwise.
Variant parse_variant(const std::string& name);
ErrorMode parse_error_mode(const std::string& name);

struct AlsConfig {
    Dims target_ranks;
    std::size_t max_iters = 20;
    /// Stop once |e_k - e_{k-1}| < tol; 0 disables (the run always does max_iters).
    double tol = 0.0;
    std::uint64_t seed = 0;
    ErrorMode error_mode = ErrorMode::exact;
    /// Switch the QR solver to the truncated-SVD solve when R_[2] is degenerate.
    bool rank_deficient_fallback = true;
    double svd_rcond = 1e-12;
    /// Start from these cores instead of a seeded standard-normal draw.
    std::optional<TrCores> initial_cores;
    /// Cross-check S_n against the explicit Gram (ne) and the assembled QR of
    /// G^{!=n}_[2] (qr) every mode update. Small problems only.
    bool debug_checks = false;
};

/// Per-iteration wall time split after the columns of the cost model:
///   subchain  G^{!=n} or V_n
///   mttsp     unfolding of X, MTTSP or Multi-TTM, W_n / M_n
///   solve     least-squares, normal-equation or triangular solve
///   gram_qr   refreshing the Gram tensor / mode-2 QR of the updated core
///   other     Gram chain S_n, QR of V_n, bookkeeping
struct TimingBuckets {
    double subchain = 0.0;
    double mttsp = 0.0;
    double solve = 0.0;
    double gram_qr = 0.0;
    double other = 0.0;

    double total() const noexcept { return subchain + mttsp + solve + gram_qr + other; }
    TimingBuckets& operator+=(const TimingBuckets& o) noexcept;
};

struct AlsReport {
    Variant variant = Variant::als;
    ErrorMode error_mode = ErrorMode::exact;
    std::size_t iterations = 0;
    /// Relative error after each completed sweep; empty for ErrorMode::none.
    std::vector<double> rel_errors;
    std::vector<double> iter_seconds;
    std::vector<TimingBuckets> buckets;
    /// Setup before the first sweep (initial Gram tensors / QRs).
    double upfront_seconds = 0.0;
    /// Time spent evaluating errors, excluded from iter_seconds.
    double error_seconds = 0.0;
    double total_seconds = 0.0;
    Termination termination = Termination::max_iters;
    std::string termination_detail;
    std::size_t fallback_count = 0;
    /// Largest relative deviation seen by debug_checks.
    double debug_max_deviation = 0.0;

    /// Last tracked error, NaN if none.
    double final_error() const noexcept;
    double mean_iter_seconds() const noexcept;
};

/// Quantities left behind by the last mode update, enough to estimate the
/// error without reconstructing the tensor:
///
///   variant  projected        chain_gram          core_gram
///   ne       M_N              S_N<2>              (P_N^T)_<2>
///   qr       W_N              R_[2]^T R_[2]       R_N(2)^T R_N(2)
///   qrne     Y_N[N] V_N[2]    S_N<2> = V^T V      R_N(2)^T R_N(2)
///
/// with core_unfolding = G_N(2) of the updated core and, for qr, triangular = R_[2].
struct SweepCache {
    Variant variant = Variant::ne;
    std::size_t order = 0;
    /// Mode whose update last touched the cache.
    std::size_t updated_mode = static_cast<std::size_t>(-1);
    double x_norm = 0.0;
    Matrix projected;
    Matrix core_unfolding;
    Matrix chain_gram;
    Matrix core_gram;
    Matrix triangular;
};

struct AlsResult {
    TrCores cores;
    AlsReport report;
    /// Final cache when error_mode is cheap.
    std::optional<SweepCache> cache;
};

AlsResult tr_als(const DenseTensor& x, const AlsConfig& cfg);
AlsResult tr_als_ne(const DenseTensor& x, const AlsConfig& cfg);
AlsResult tr_als_qr(const DenseTensor& x, const AlsConfig& cfg);
AlsResult tr_als_qrne(const DenseTensor& x, const AlsConfig& cfg);
AlsResult decompose(const DenseTensor& x, Variant variant, const AlsConfig& cfg);

/// ||x - TR(cores)||_F / ||x||_F through a dense reconstruction; 0 when x = 0.
double exact_relative_error(const DenseTensor& x, const TrCores& cores);

/// sqrt(max(0, ||X||^2 - 2<X, X^> + ||X^||^2)) / ||X|| from an end-of-sweep cache.
/// Throws StaleCache if the cache is not at the last mode or belongs to another variant.
double cheap_relative_error(Variant variant, const SweepCache& cache);

/// Standard-normal cores for the given extents and ring ranks.
TrCores gaussian_init(const Dims& dims, const Dims& ranks, std::uint64_t seed);

}  // namespace tenring
