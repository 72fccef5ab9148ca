// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "tenring/als.hpp"
#include "tenring/bench.hpp"
#include "tenring/datagen.hpp"
#include "tenring/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace tenring;
using tenring::testing::explicit_subchain_unfolding;
using tenring::testing::max_rel_dev;
using tenring::testing::random_cores;
using tenring::testing::random_matrix;
using tenring::testing::random_tensor;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DenseTensor gaussian_data(std::size_t order, std::size_t dim, std::size_t rank, std::uint64_t seed) {
    SynthSpec s;
    s.order = order;
    s.dim = dim;
    s.true_rank = rank;
    s.seed = seed;
    return synthesize(s).tensor;
}

// Random ring shape with N in {3, 4, 5}, I <= 4, R <= 3.
std::pair<Dims, Dims> small_shape(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> order(3, 5), dim(1, 4), rank(1, 3);
    const std::size_t n = order(rng);
    Dims d(n), r(n);
    for (std::size_t k = 0; k < n; ++k) {
        d[k] = dim(rng);
        r[k] = rank(rng);
    }
    return {d, r};
}

Verdict gram_chain_oracle() {
    std::mt19937_64 rng(101);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto [dims, ranks] = small_shape(rng);
        const TrCores c = random_cores(dims, ranks, rng);
        std::vector<GramTensor4> p;
        for (const auto& g : c.cores()) p.push_back(core_self_gram(g));
        for (std::size_t n = 0; n < c.order(); ++n) {
            const Matrix a = explicit_subchain_unfolding(c, n);
            worst = std::max(worst, max_rel_dev(gram_chain_excluding(p, n), a.transpose() * a));
        }
    }
    return {worst <= 1e-10, fmt("max rel deviation %.3g (<= 1e-10)", worst)};
}

Verdict exchange_law() {
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<std::size_t> e(1, 4);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t i1 = e(rng), j1 = e(rng), k = e(rng), j2 = e(rng), i2 = e(rng);
        const DenseTensor a = random_tensor({i1, j1, k}, rng), b = random_tensor({k, j2, i2}, rng);
        const Matrix ah = random_matrix(static_cast<Eigen::Index>(e(rng)), static_cast<Eigen::Index>(j1), rng);
        const Matrix bh = random_matrix(static_cast<Eigen::Index>(e(rng)), static_cast<Eigen::Index>(j2), rng);
        const DenseTensor lhs = subchain_product_mode2(ttm(a, ah, 1), ttm(b, bh, 1));
        const DenseTensor rhs = ttm(subchain_product_mode2(a, b), kron(bh, ah), 1);
        worst = std::max(worst, max_rel_dev(lhs, rhs));
    }
    return {worst <= 1e-10, fmt("max rel deviation %.3g (<= 1e-10)", worst)};
}

Verdict inner_product() {
    std::mt19937_64 rng(103);
    double worst_ip = 0, worst_norm = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto [dims, ranks] = small_shape(rng);
        const auto [unused, ranks_b] = small_shape(rng);
        Dims rb(dims.size());
        for (std::size_t k = 0; k < dims.size(); ++k) rb[k] = ranks_b[k % ranks_b.size()];
        const TrCores a = random_cores(dims, ranks, rng), b = random_cores(dims, rb, rng);
        const DenseTensor xa = tr_reconstruct(a), xb = tr_reconstruct(b);
        const double dense = frobenius_inner(xa, xb);
        const double scale = frobenius_norm(xa) * frobenius_norm(xb);
        worst_ip = std::max(worst_ip, std::abs(tr_inner_product(a, b) - dense) / scale);
        const double dn = frobenius_norm(xa);
        worst_norm = std::max(worst_norm, std::abs(tr_frobenius_norm(a) - dn) / dn);
    }
    const bool ok = worst_ip <= 1e-10 && worst_norm <= 1e-10;
    return {ok, fmt("inner %.3g, ", worst_ip) + fmt("norm %.3g (<= 1e-10)", worst_norm)};
}

Verdict mode2_qr_contract() {
    std::mt19937_64 rng(104);
    std::uniform_int_distribution<std::size_t> r(1, 4), i(1, 30);
    double worst_rec = 0, worst_orth = 0;
    int tall = 0, wide = 0;
    for (int rep = 0; rep < 50; ++rep) {
        // Alternate I_n >= R_n R_{n+1} and I_n < R_n R_{n+1}.
        const std::size_t r0 = r(rng), r1 = r(rng);
        const std::size_t in = rep % 2 ? std::max<std::size_t>(1, std::min(r0 * r1 - 1, i(rng)))
                                       : r0 * r1 + i(rng) % 10;
        (in >= r0 * r1 ? tall : wide)++;
        const DenseTensor g = random_tensor({r0, in, r1}, rng);
        const Mode2Qr qr = mode2_qr_core(g);
        worst_rec = std::max(worst_rec, max_rel_dev(ttm(qr.r_tensor, qr.q, 1), g));
        const Matrix qtq = qr.q.transpose() * qr.q;
        worst_orth = std::max(worst_orth, (qtq - Matrix::Identity(qtq.rows(), qtq.cols())).cwiseAbs().maxCoeff());
    }
    const bool ok = worst_rec <= 1e-10 && worst_orth <= 1e-12 && tall > 0 && wide > 0;
    return {ok, fmt("reconstruction %.3g, ", worst_rec) + fmt("orthonormality %.3g, ", worst_orth) +
                    std::to_string(tall) + " tall / " + std::to_string(wide) + " wide"};
}

Verdict solver_parity() {
    constexpr Variant all[] = {Variant::als, Variant::ne, Variant::qr, Variant::qrne};
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DenseTensor x = gaussian_data(3, 30, 3, 200 + seed);
        AlsConfig cfg;
        cfg.target_ranks = {3, 3, 3};
        cfg.max_iters = 10;
        cfg.initial_cores = gaussian_init(x.dims(), cfg.target_ranks, 300 + seed);
        std::vector<std::vector<double>> e;
        for (Variant v : all) e.push_back(decompose(x, v, cfg).report.rel_errors);
        for (std::size_t a = 0; a < e.size(); ++a)
            for (std::size_t b = a + 1; b < e.size(); ++b)
                for (std::size_t k = 0; k < e[a].size(); ++k) worst = std::max(worst, std::abs(e[a][k] - e[b][k]));
    }
    return {worst <= 1e-8, fmt("max pairwise per-sweep difference %.3g (<= 1e-8)", worst)};
}

Verdict convergence() {
    constexpr Variant all[] = {Variant::als, Variant::ne, Variant::qr, Variant::qrne};
    std::string detail;
    bool ok = true;
    for (Variant v : all) {
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const DenseTensor x = gaussian_data(3, 20, 3, 400 + seed);
            AlsConfig cfg;
            cfg.target_ranks = {3, 3, 3};
            cfg.max_iters = 20;
            cfg.seed = 500 + seed;
            const auto e = decompose(x, v, cfg).report.rel_errors;
            hits += *std::min_element(e.begin(), e.end()) <= 1e-8;
        }
        ok = ok && hits >= 9;
        detail += std::string(detail.empty() ? "" : ", ") + to_string(v) + " " + std::to_string(hits) + "/10";
    }
    return {ok, detail + " (>= 9/10 each)"};
}

double mean_iter_seconds(const DenseTensor& x, Variant v, const Dims& ranks) {
    AlsConfig cfg;
    cfg.target_ranks = ranks;
    cfg.max_iters = 20;
    cfg.error_mode = ErrorMode::none;
    cfg.seed = 7;
    return decompose(x, v, cfg).report.mean_iter_seconds();
}

Verdict speed() {
    const DenseTensor x = gaussian_data(3, 120, 10, 600);
    const double als = mean_iter_seconds(x, Variant::als, {10, 10, 10});
    const double ne = mean_iter_seconds(x, Variant::ne, {10, 10, 10});
    const double ratio = ne / als;
    return {ratio <= 0.77, fmt("ne/als per-iteration time %.3f (<= 0.77), ", ratio) + fmt("als %.4g s, ", als) +
                               fmt("ne %.4g s", ne)};
}

Verdict stability() {
    BenchCell cell;
    for (auto& c : bench_cells(Experiment::b2, Scale::desk))
        if (c.label == "b2:eta=1e-10:gamma=1-1e-10") cell = c;
    const std::size_t trials = 10;
    const auto out = run_cell(cell, trials, 0);
    std::vector<double> ne, qr, qrne;
    for (const auto& o : out) {
        const double e = o.error.empty() ? o.report.final_error() : std::numeric_limits<double>::infinity();
        (o.variant == Variant::ne ? ne : o.variant == Variant::qr ? qr : qrne).push_back(e);
    }
    int qr_wins = 0, qrne_wins = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        qr_wins += qr[t] < ne[t];
        qrne_wins += qrne[t] < ne[t];
    }
    const double mne = median(ne), mqr = median(qr), mqrne = median(qrne);
    const bool ok = qr_wins >= 8 && qrne_wins >= 8 && mqr <= 1e-7 && mqrne <= 1e-7 && mne > mqr && mne > mqrne;
    return {ok, "wins vs ne: qr " + std::to_string(qr_wins) + "/10, qrne " + std::to_string(qrne_wins) +
                    "/10; medians ne " + fmt("%.3g", mne) + ", qr " + fmt("%.3g", mqr) + ", qrne " +
                    fmt("%.3g", mqrne)};
}

Verdict cheap_errors() {
    double worst = 0, smallest = 1;
    for (Variant v : {Variant::ne, Variant::qr, Variant::qrne}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            SynthSpec s;
            s.order = 3;
            s.dim = 20;
            s.true_rank = 3;
            s.eta = 1e-2;
            s.seed = 700 + seed;
            const DenseTensor x = synthesize(s).tensor;
            AlsConfig cfg;
            cfg.target_ranks = {3, 3, 3};
            cfg.max_iters = 10;
            cfg.seed = 800 + seed;
            const auto exact = decompose(x, v, cfg).report.rel_errors;
            cfg.error_mode = ErrorMode::cheap;
            const auto cheap = decompose(x, v, cfg).report.rel_errors;
            for (std::size_t k = 0; k < exact.size(); ++k) {
                worst = std::max(worst, std::abs(cheap[k] - exact[k]));
                smallest = std::min(smallest, exact[k]);
            }
        }
    }
    return {worst <= 1e-6, fmt("max |cheap - exact| %.3g (<= 1e-6), ", worst) + fmt("smallest error %.3g", smallest)};
}

Verdict real_data_scope() {
    // Real-data tables are out of scope. Their qualitative claims are
    // checked here on synthetic data: equal errors (criterion 5) and QRNE
    // iterating faster than QR.
    const DenseTensor x = gaussian_data(3, 120, 10, 900);
    const double qr = mean_iter_seconds(x, Variant::qr, {10, 10, 10});
    const double qrne = mean_iter_seconds(x, Variant::qrne, {10, 10, 10});
    return {qrne <= qr, "real data not reproduced; synthetic proxy qrne/qr per-iteration time " +
                            fmt("%.3f (<= 1)", qrne / qr)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> run;
        double time_limit;  // seconds, 0 for none
    };
    const std::vector<Criterion> criteria{
        {"gram chain equals explicit subchain Gram", gram_chain_oracle, 10},
        {"subchain exchange law", exchange_law, 0},
        {"TR inner product and norm vs dense", inner_product, 0},
        {"mode-2 QR contract", mode2_qr_contract, 0},
        {"solver parity over 10 sweeps", solver_parity, 0},
        {"exact-rank recovery", convergence, 0},
        {"normal-equation speedup at 120^3, R=10", speed, 300},
        {"collinear stability, eta=1e-10, gamma=1-1e-10", stability, 1200},
        {"cheap error estimators", cheap_errors, 0},
        {"real-data tables (scope)", real_data_scope, 0},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = Clock::now();
        Verdict v = criteria[k].run();
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (criteria[k].time_limit > 0 && secs >= criteria[k].time_limit) {
            v.pass = false;
            v.detail += fmt("; over the %.0f s limit", criteria[k].time_limit);
        }
        failed += !v.pass;
        std::printf("criterion %zu: %s | %s | %s | %.1f s\n", k + 1, v.pass ? "PASS" : "FAIL", criteria[k].name,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
