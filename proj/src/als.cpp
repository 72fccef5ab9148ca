#include "tenring/als.hpp"

#include "tenring/error.hpp"
#include "tenring/linalg.hpp"
#include "tenring/random.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

namespace tenring {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Adds the lifetime of the scope to one bucket.
class Stopwatch {
public:
    explicit Stopwatch(double& sink) : sink_(sink), t0_(Clock::now()) {}
    ~Stopwatch() { sink_ += seconds_since(t0_); }
    Stopwatch(const Stopwatch&) = delete;
    Stopwatch& operator=(const Stopwatch&) = delete;

private:
    double& sink_;
    Clock::time_point t0_;
};

double relative_deviation(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

DenseTensor core_from_unfolding(const Matrix& g2, const DenseTensor& like) {
    return fold(g2, 1, like.dims(), Unfolding::classical);
}

// Factors Q_j^T for every mode except n, ascending.
std::vector<ModeFactor> projection_factors(const std::vector<Mode2Qr>& qrs, std::size_t n) {
    std::vector<ModeFactor> f;
    f.reserve(qrs.size() - 1);
    for (std::size_t j = 0; j < qrs.size(); ++j)
        if (j != n) f.push_back({j, qrs[j].q.transpose()});
    return f;
}

std::vector<DenseTensor> r_tensors(const std::vector<Mode2Qr>& qrs) {
    std::vector<DenseTensor> r;
    r.reserve(qrs.size());
    for (const auto& q : qrs) r.push_back(q.r_tensor);
    return r;
}

struct UpdateContext {
    const DenseTensor& x;
    const AlsConfig& cfg;
    TimingBuckets& t;
    AlsReport& report;
    SweepCache* cache;  // filled on the last mode when non-null
};

class ModeSolver {
public:
    virtual ~ModeSolver() = default;
    virtual void prepare(const TrCores& cores) = 0;
    virtual void update(std::size_t n, TrCores& cores, UpdateContext& ctx) = 0;
};

// ---------------------------------------------------------------------------

class BaselineSolver final : public ModeSolver {
public:
    void prepare(const TrCores&) override {}

    void update(std::size_t n, TrCores& cores, UpdateContext& ctx) override {
        Matrix coeff;
        {
            Stopwatch sw(ctx.t.subchain);
            coeff = mode_n_unfold(subchain_tensor(cores, n), 1);
        }
        Stopwatch sw(ctx.t.solve);
        const Matrix xn = mode_n_unfold(ctx.x, n);
        cores.set_core(n, core_from_unfolding(lstsq_qr_right(coeff, xn), cores.core(n)));
    }
};

// ---------------------------------------------------------------------------

class NormalEquationSolver final : public ModeSolver {
public:
    void prepare(const TrCores& cores) override {
        grams_.clear();
        for (const auto& g : cores.cores()) grams_.push_back(core_self_gram(g));
    }

    void update(std::size_t n, TrCores& cores, UpdateContext& ctx) override {
        Matrix s;
        {
            Stopwatch sw(ctx.t.other);
            s = gram_chain_excluding(grams_, n);
        }
        Matrix coeff;
        {
            Stopwatch sw(ctx.t.subchain);
            coeff = mode_n_unfold(subchain_tensor(cores, n), 1);
        }
        Matrix m;
        {
            Stopwatch sw(ctx.t.mttsp);
            m.noalias() = mode_n_unfold(ctx.x, n) * coeff;
        }
        if (ctx.cfg.debug_checks) {
            const Matrix explicit_gram = coeff.transpose() * coeff;
            ctx.report.debug_max_deviation =
                std::max(ctx.report.debug_max_deviation, relative_deviation(s, explicit_gram));
        }
        SpdSolveResult solved;
        {
            Stopwatch sw(ctx.t.solve);
            solved = spd_solve(s, m);
            if (solved.fallback_used) ++ctx.report.fallback_count;
            cores.set_core(n, core_from_unfolding(solved.z, cores.core(n)));
        }
        {
            Stopwatch sw(ctx.t.gram_qr);
            grams_[n] = core_self_gram(cores.core(n));
        }
        if (ctx.cache) {
            ctx.cache->updated_mode = n;
            if (n + 1 == cores.order()) {
                ctx.cache->projected = std::move(m);
                ctx.cache->core_unfolding = std::move(solved.z);
                ctx.cache->chain_gram = std::move(s);
                ctx.cache->core_gram = gram_transpose_unfolding(grams_[n]);
            }
        }
    }

private:
    std::vector<GramTensor4> grams_;
};

// ---------------------------------------------------------------------------

class QrSolver final : public ModeSolver {
public:
    void prepare(const TrCores& cores) override {
        qrs_.clear();
        for (const auto& g : cores.cores()) qrs_.push_back(mode2_qr_core(g));
    }

    void update(std::size_t n, TrCores& cores, UpdateContext& ctx) override {
        Matrix v2;
        {
            Stopwatch sw(ctx.t.subchain);
            v2 = mode_n_unfold(subchain_excluding(r_tensors(qrs_), n), 1);
        }
        QrPair inner;
        {
            Stopwatch sw(ctx.t.other);
            inner = qr_economy(v2);
        }
        Matrix w;
        {
            Stopwatch sw(ctx.t.mttsp);
            const auto factors = projection_factors(qrs_, n);
            const DenseTensor y = multi_ttm(ctx.x, factors);
            w.noalias() = mode_n_unfold(y, n) * inner.q;
        }
        if (ctx.cfg.debug_checks) check_factorization(n, cores, inner, ctx.report);
        Matrix g2;
        {
            Stopwatch sw(ctx.t.solve);
            g2 = solve_triangular(inner.r, w, ctx);
            cores.set_core(n, core_from_unfolding(g2, cores.core(n)));
        }
        {
            Stopwatch sw(ctx.t.gram_qr);
            qrs_[n] = mode2_qr_core(cores.core(n));
        }
        if (ctx.cache) {
            ctx.cache->updated_mode = n;
            if (n + 1 == cores.order()) {
                const Matrix rn = classical_mode_n_unfold(qrs_[n].r_tensor, 1);
                ctx.cache->projected = std::move(w);
                ctx.cache->core_unfolding = std::move(g2);
                ctx.cache->chain_gram = inner.r.transpose() * inner.r;
                ctx.cache->core_gram = rn.transpose() * rn;
                ctx.cache->triangular = std::move(inner.r);
            }
        }
    }

private:
    static Matrix solve_triangular(const Matrix& r, const Matrix& w, UpdateContext& ctx) {
        if (r.rows() == r.cols()) {
            try {
                return tri_solve_right(r, w);
            } catch (const DegenerateTriangular&) {
                if (!ctx.cfg.rank_deficient_fallback) throw;
            }
        } else if (!ctx.cfg.rank_deficient_fallback) {
            // Fewer rows in V_n[2] than unknowns per row: R_[2] cannot be square.
            throw DegenerateTriangular(static_cast<std::size_t>(r.rows()), 0.0, 0.0);
        }
        ++ctx.report.fallback_count;
        return svd_solve_right(r, w, ctx.cfg.svd_rcond);
    }

    // G^{!=n}_[2] against (Q_{n-1} (x) ... (x) Q_{n+1}) Q_0 R_[2].
    void check_factorization(std::size_t n, const TrCores& cores, const QrPair& inner,
                             AlsReport& report) const {
        const std::size_t order = cores.order();
        Matrix big = qrs_[(n + order - 1) % order].q;
        for (std::size_t t = 2; t < order; ++t) big = kron(big, qrs_[(n + order - t) % order].q);
        const Matrix assembled = big * inner.q * inner.r;
        const Matrix direct = mode_n_unfold(subchain_tensor(cores, n), 1);
        const Matrix qtq = (big * inner.q).transpose() * (big * inner.q);
        const double orth = (qtq - Matrix::Identity(qtq.rows(), qtq.cols())).cwiseAbs().maxCoeff();
        report.debug_max_deviation =
            std::max({report.debug_max_deviation, relative_deviation(assembled, direct), orth});
    }

    std::vector<Mode2Qr> qrs_;
};

// ---------------------------------------------------------------------------

class QrNormalEquationSolver final : public ModeSolver {
public:
    void prepare(const TrCores& cores) override {
        qrs_.clear();
        grams_.clear();
        for (const auto& g : cores.cores()) {
            qrs_.push_back(mode2_qr_core(g));
            grams_.push_back(core_self_gram(qrs_.back().r_tensor));
        }
    }

    void update(std::size_t n, TrCores& cores, UpdateContext& ctx) override {
        Matrix s;
        {
            Stopwatch sw(ctx.t.other);
            s = gram_chain_excluding(grams_, n);
        }
        Matrix v2;
        {
            Stopwatch sw(ctx.t.subchain);
            v2 = mode_n_unfold(subchain_excluding(r_tensors(qrs_), n), 1);
        }
        Matrix m;
        {
            Stopwatch sw(ctx.t.mttsp);
            const auto factors = projection_factors(qrs_, n);
            const DenseTensor y = multi_ttm(ctx.x, factors);
            m.noalias() = mode_n_unfold(y, n) * v2;
        }
        if (ctx.cfg.debug_checks) {
            ctx.report.debug_max_deviation =
                std::max(ctx.report.debug_max_deviation, relative_deviation(s, v2.transpose() * v2));
        }
        SpdSolveResult solved;
        {
            Stopwatch sw(ctx.t.solve);
            solved = spd_solve(s, m);
            if (solved.fallback_used) ++ctx.report.fallback_count;
            cores.set_core(n, core_from_unfolding(solved.z, cores.core(n)));
        }
        {
            Stopwatch sw(ctx.t.gram_qr);
            qrs_[n] = mode2_qr_core(cores.core(n));
            grams_[n] = core_self_gram(qrs_[n].r_tensor);
        }
        if (ctx.cache) {
            ctx.cache->updated_mode = n;
            if (n + 1 == cores.order()) {
                const Matrix rn = classical_mode_n_unfold(qrs_[n].r_tensor, 1);
                ctx.cache->projected = std::move(m);
                ctx.cache->core_unfolding = std::move(solved.z);
                ctx.cache->chain_gram = std::move(s);
                ctx.cache->core_gram = rn.transpose() * rn;
            }
        }
    }

private:
    std::vector<Mode2Qr> qrs_;
    std::vector<GramTensor4> grams_;
};

std::unique_ptr<ModeSolver> make_solver(Variant v) {
    switch (v) {
        case Variant::als: return std::make_unique<BaselineSolver>();
        case Variant::ne: return std::make_unique<NormalEquationSolver>();
        case Variant::qr: return std::make_unique<QrSolver>();
        case Variant::qrne: return std::make_unique<QrNormalEquationSolver>();
    }
    throw std::invalid_argument("unknown variant");
}

void validate(const DenseTensor& x, const AlsConfig& cfg) {
    const std::size_t order = x.order();
    if (order < 2) throw DimensionError("ALS needs a tensor of order >= 2");
    if (cfg.target_ranks.size() != order) {
        throw DimensionError("ALS: " + std::to_string(cfg.target_ranks.size()) +
                             " ranks given for a tensor of order " + std::to_string(order));
    }
    for (auto r : cfg.target_ranks)
        if (r == 0) throw DimensionError("ALS: ranks must be positive");
    check_budget(x.size());
    if (cfg.initial_cores) {
        if (cfg.initial_cores->dims() != x.dims() || cfg.initial_cores->ranks() != cfg.target_ranks) {
            throw DimensionError("ALS: initial cores do not match the tensor extents and ranks");
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Variant v) noexcept {
    switch (v) {
        case Variant::als: return "als";
        case Variant::ne: return "ne";
        case Variant::qr: return "qr";
        case Variant::qrne: return "qrne";
    }
    return "?";
}

const char* to_string(ErrorMode m) noexcept {
    switch (m) {
        case ErrorMode::exact: return "exact";
        case ErrorMode::cheap: return "cheap";
        case ErrorMode::none: return "none";
    }
    return "?";
}

const char* to_string(Termination t) noexcept {
    switch (t) {
        case Termination::max_iters: return "max_iters";
        case Termination::tolerance: return "tolerance";
        case Termination::zero_input: return "zero_input";
        case Termination::degenerate_triangular: return "degenerate_triangular";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::als, Variant::ne, Variant::qr, Variant::qrne})
        if (name == to_string(v)) return v;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

ErrorMode parse_error_mode(const std::string& name) {
    for (ErrorMode m : {ErrorMode::exact, ErrorMode::cheap, ErrorMode::none})
        if (name == to_string(m)) return m;
    throw std::invalid_argument("unknown error mode '" + name + "'");
}

TimingBuckets& TimingBuckets::operator+=(const TimingBuckets& o) noexcept {
    subchain += o.subchain;
    mttsp += o.mttsp;
    solve += o.solve;
    gram_qr += o.gram_qr;
    other += o.other;
    return *this;
}

double AlsReport::final_error() const noexcept {
    return rel_errors.empty() ? std::numeric_limits<double>::quiet_NaN() : rel_errors.back();
}

double AlsReport::mean_iter_seconds() const noexcept {
    if (iter_seconds.empty()) return 0.0;
    double s = 0.0;
    for (double t : iter_seconds) s += t;
    return s / static_cast<double>(iter_seconds.size());
}

TrCores gaussian_init(const Dims& dims, const Dims& ranks, std::uint64_t seed) {
    TrCores cores = TrCores::zeros(dims, ranks);
    Philox4x32 rng(seed, streams::init);
    std::normal_distribution<double> normal;
    for (std::size_t n = 0; n < cores.order(); ++n)
        for (double& v : cores.core(n).data()) v = normal(rng);
    return cores;
}

double exact_relative_error(const DenseTensor& x, const TrCores& cores) {
    if (cores.dims() != x.dims()) throw DimensionError("exact_relative_error: extents differ");
    const double xnorm = frobenius_norm(x);
    if (xnorm == 0.0) return 0.0;
    DenseTensor diff = tr_reconstruct(cores);
    diff -= x;
    return frobenius_norm(diff) / xnorm;
}

double cheap_relative_error(Variant variant, const SweepCache& cache) {
    if (variant == Variant::als) throw std::invalid_argument("no cheap error estimate for baseline ALS");
    if (cache.variant != variant) throw StaleCache("cache was filled by a different variant");
    if (cache.order == 0 || cache.updated_mode + 1 != cache.order) {
        throw StaleCache("cheap error needs the cache of the last mode of a completed sweep");
    }
    if (cache.x_norm == 0.0) return 0.0;
    double inner = 0.0;
    if (variant == Variant::qr) {
        inner = (cache.projected.array() *
                 (cache.core_unfolding * cache.triangular.transpose()).array()).sum();
    } else {
        inner = (cache.projected.array() * cache.core_unfolding.array()).sum();
    }
    const double approx_sq = (cache.chain_gram.array() * cache.core_gram.array()).sum();
    const double resid_sq = cache.x_norm * cache.x_norm - 2.0 * inner + approx_sq;
    return std::sqrt(std::max(0.0, resid_sq)) / cache.x_norm;
}

AlsResult decompose(const DenseTensor& x, Variant variant, const AlsConfig& cfg) {
    validate(x, cfg);
    const auto run_start = Clock::now();
    AlsResult result;
    AlsReport& report = result.report;
    report.variant = variant;
    report.error_mode = cfg.error_mode;

    const double xnorm = frobenius_norm(x);
    if (xnorm == 0.0) {
        result.cores = TrCores::zeros(x.dims(), cfg.target_ranks);
        report.termination = Termination::zero_input;
        report.total_seconds = seconds_since(run_start);
        return result;
    }

    result.cores = cfg.initial_cores ? *cfg.initial_cores : gaussian_init(x.dims(), cfg.target_ranks, cfg.seed);
    TrCores& cores = result.cores;
    const std::size_t order = x.order();

    // Baseline ALS has no cheap identity; it reports exact errors instead.
    const bool cheap = cfg.error_mode == ErrorMode::cheap && variant != Variant::als;
    if (cheap) {
        result.cache.emplace();
        result.cache->variant = variant;
        result.cache->order = order;
        result.cache->x_norm = xnorm;
    }

    auto solver = make_solver(variant);
    {
        const auto t0 = Clock::now();
        solver->prepare(cores);
        report.upfront_seconds = seconds_since(t0);
    }

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        TimingBuckets buckets;
        const auto t0 = Clock::now();
        UpdateContext ctx{x, cfg, buckets, report, cheap ? &*result.cache : nullptr};
        try {
            for (std::size_t n = 0; n < order; ++n) solver->update(n, cores, ctx);
        } catch (const DegenerateTriangular& e) {
            report.termination = Termination::degenerate_triangular;
            report.termination_detail = e.what();
            break;
        }
        const double elapsed = seconds_since(t0);
        buckets.other += std::max(0.0, elapsed - buckets.total());
        report.iter_seconds.push_back(elapsed);
        report.buckets.push_back(buckets);
        report.iterations = it + 1;

        if (cfg.error_mode != ErrorMode::none) {
            const auto te = Clock::now();
            const double err = cheap ? cheap_relative_error(variant, *result.cache)
                                     : exact_relative_error(x, cores);
            report.error_seconds += seconds_since(te);
            report.rel_errors.push_back(err);
            const std::size_t k = report.rel_errors.size();
            if (cfg.tol > 0.0 && k >= 2 &&
                std::abs(report.rel_errors[k - 1] - report.rel_errors[k - 2]) < cfg.tol) {
                report.termination = Termination::tolerance;
                break;
            }
        }
    }
    report.total_seconds = seconds_since(run_start);
    return result;
}

AlsResult tr_als(const DenseTensor& x, const AlsConfig& cfg) { return decompose(x, Variant::als, cfg); }
AlsResult tr_als_ne(const DenseTensor& x, const AlsConfig& cfg) { return decompose(x, Variant::ne, cfg); }
AlsResult tr_als_qr(const DenseTensor& x, const AlsConfig& cfg) { return decompose(x, Variant::qr, cfg); }
AlsResult tr_als_qrne(const DenseTensor& x, const AlsConfig& cfg) {
    return decompose(x, Variant::qrne, cfg);
}

}  // namespace tenring
