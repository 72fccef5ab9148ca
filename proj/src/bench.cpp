#include "tenring/bench.hpp"

#include "tenring/io.hpp"

#include <atomic>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace tenring {

const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::a1: return "a1";
        case Experiment::a2: return "a2";
        case Experiment::b1: return "b1";
        case Experiment::b2: return "b2";
        case Experiment::b3: return "b3";
    }
    return "?";
}

const char* to_string(Scale s) noexcept { return s == Scale::desk ? "desk" : "paper"; }

Experiment parse_experiment(const std::string& name) {
    for (Experiment e : {Experiment::a1, Experiment::a2, Experiment::b1, Experiment::b2, Experiment::b3})
        if (name == to_string(e)) return e;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

Scale parse_scale(const std::string& name) {
    if (name == "desk") return Scale::desk;
    if (name == "paper") return Scale::paper;
    throw std::invalid_argument("unknown scale '" + name + "'");
}

namespace {

struct Shape {
    std::size_t order, dim, rank;
};

std::vector<Shape> gaussian_shapes(Experiment e, Scale s) {
    if (s == Scale::desk) return {{3, 60, 10}, {3, 120, 10}, {5, 20, 4}};
    if (e == Experiment::a1) {
        return {{3, 100, 10}, {3, 200, 10}, {3, 300, 10}, {3, 400, 10}, {3, 500, 10},
                {5, 20, 4},   {5, 30, 4},   {5, 40, 4},   {5, 50, 4},   {5, 60, 4}};
    }
    return {{3, 300, 10}, {3, 500, 10}, {5, 40, 5}, {5, 60, 5}};
}

struct Level {
    double value;
    const char* label;
};

constexpr Level kEta[] = {{1e-4, "1e-4"}, {1e-7, "1e-7"}, {1e-10, "1e-10"}};
constexpr Level kGamma[] = {{1 - 1e-4, "1-1e-4"}, {1 - 1e-7, "1-1e-7"}, {1 - 1e-10, "1-1e-10"}};
constexpr Level kTheta[] = {{1 - 1e-1, "1-1e-1"}, {1 - 1e-4, "1-1e-4"}, {1 - 1e-7, "1-1e-7"}};

const std::vector<Variant> kSpeedVariants{Variant::als, Variant::ne};
const std::vector<Variant> kStabilityVariants{Variant::ne, Variant::qr, Variant::qrne};

}  // namespace

std::vector<BenchCell> bench_cells(Experiment e, Scale s) {
    std::vector<BenchCell> cells;
    const std::string prefix = to_string(e);
    if (e == Experiment::a1 || e == Experiment::a2 || e == Experiment::b1) {
        for (const Shape& sh : gaussian_shapes(e, s)) {
            BenchCell c;
            c.label = prefix + ":N=" + std::to_string(sh.order) + ":I=" + std::to_string(sh.dim) +
                      ":R=" + std::to_string(sh.rank);
            c.spec.order = sh.order;
            c.spec.dim = sh.dim;
            c.spec.true_rank = sh.rank;
            c.spec.core_kind = CoreKind::gaussian;
            c.ranks = Dims(sh.order, sh.rank);
            c.error_mode = e == Experiment::a1 ? ErrorMode::none : ErrorMode::exact;
            c.variants = e == Experiment::b1 ? kStabilityVariants : kSpeedVariants;
            cells.push_back(std::move(c));
        }
        return cells;
    }
    // Both grids use 100^3 tensors from 100 x 25 generators at rank 5.
    const bool collinear = e == Experiment::b2;
    for (const Level& eta : kEta) {
        for (const Level& lvl : collinear ? kGamma : kTheta) {
            BenchCell c;
            c.label = prefix + ":eta=" + eta.label + (collinear ? ":gamma=" : ":theta=") + lvl.label;
            c.spec.order = 3;
            c.spec.dim = 100;
            c.spec.true_rank = 5;
            c.spec.eta = eta.value;
            if (collinear) {
                c.spec.core_kind = CoreKind::congruent;
                c.spec.gamma = lvl.value;
            } else {
                c.spec.core_kind = CoreKind::student_t;
                c.spec.theta = lvl.value;
                c.spec.dof = 1.0;
            }
            c.ranks = Dims(3, 5);
            c.variants = kStabilityVariants;
            cells.push_back(std::move(c));
        }
    }
    return cells;
}

std::size_t default_trials(Experiment e, Scale s) {
    if (e == Experiment::b2 || e == Experiment::b3) return s == Scale::desk ? 10 : 100;
    return 1;
}

namespace {

void run_trial(const BenchCell& cell, std::size_t trial, std::uint64_t base_seed, TrialOutcome* out) {
    const std::uint64_t seed = base_seed + trial;
    for (std::size_t v = 0; v < cell.variants.size(); ++v) {
        out[v].cell = cell.label;
        out[v].variant = cell.variants[v];
        out[v].trial = trial;
    }
    try {
        SynthSpec spec = cell.spec;
        spec.seed = seed;
        const DenseTensor x = synthesize(spec).tensor;
        AlsConfig cfg;
        cfg.target_ranks = cell.ranks;
        cfg.max_iters = cell.max_iters;
        cfg.error_mode = cell.error_mode;
        cfg.seed = seed;
        cfg.initial_cores = gaussian_init(x.dims(), cell.ranks, seed);
        for (std::size_t v = 0; v < cell.variants.size(); ++v) {
            try {
                out[v].report = decompose(x, cell.variants[v], cfg).report;
            } catch (const std::exception& e) {
                out[v].error = e.what();
            }
        }
    } catch (const std::exception& e) {
        for (std::size_t v = 0; v < cell.variants.size(); ++v) out[v].error = e.what();
    }
}

}  // namespace

std::vector<TrialOutcome> run_cell(const BenchCell& cell, std::size_t trials, std::uint64_t base_seed,
                                   std::size_t parallel_trials) {
    const std::size_t nv = cell.variants.size();
    std::vector<TrialOutcome> out(trials * nv);
    const std::size_t workers = std::max<std::size_t>(1, std::min(parallel_trials, trials));
    if (workers == 1) {
        for (std::size_t t = 0; t < trials; ++t) run_trial(cell, t, base_seed, out.data() + t * nv);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t; (t = next.fetch_add(1)) < trials;) run_trial(cell, t, base_seed, out.data() + t * nv);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

std::vector<TrialOutcome> run_bench(const BenchOptions& opts) {
    const std::size_t trials = opts.trials.value_or(default_trials(opts.experiment, opts.scale));
    std::vector<TrialOutcome> all;
    for (BenchCell& cell : bench_cells(opts.experiment, opts.scale)) {
        if (!opts.cell_filter.empty() && cell.label.find(opts.cell_filter) == std::string::npos) continue;
        if (opts.max_iters) cell.max_iters = *opts.max_iters;
        auto part = run_cell(cell, trials, opts.base_seed, opts.parallel_trials);
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return all;
}

void write_bench_csv(std::ostream& out, const std::vector<TrialOutcome>& outcomes) {
    out << kBenchCsvHeader << '\n';
    for (const auto& o : outcomes) {
        const std::string head = o.cell + ',' + to_string(o.variant) + ',' + std::to_string(o.trial) + ',';
        if (!o.error.empty()) {
            out << head << "0,error,,,,,,\n";
            continue;
        }
        const AlsReport& r = o.report;
        for (std::size_t k = 0; k < r.iterations; ++k) {
            const TimingBuckets& b = r.buckets[k];
            out << head << (k + 1) << ',' << (k < r.rel_errors.size() ? format_double(r.rel_errors[k]) : "")
                << ',' << format_double(r.iter_seconds[k]) << ',' << format_double(b.subchain) << ','
                << format_double(b.mttsp) << ',' << format_double(b.solve) << ',' << format_double(b.gram_qr)
                << ',' << format_double(b.other) << '\n';
        }
    }
}

}  // namespace tenring
