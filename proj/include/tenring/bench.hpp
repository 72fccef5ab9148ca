#pragma once

// Benchmark harness for the synthetic experiments.
//
//   a1  per-iteration time, als vs ne, Gaussian cores, no error tracking
//   a2  error per iteration, als vs ne, same data as a1
//   b1  error per iteration, ne / qr / qrne, same data as a1
//   b2  ne / qr / qrne on collinear cores, grid eta x gamma
//   b3  ne / qr / qrne on multivariate-t cores, grid eta x theta
//
// Every cell runs `trials` paired trials: trial t synthesizes its tensor from
// seed base_seed + t and every variant starts from the same initial cores.

#include "tenring/als.hpp"
#include "tenring/datagen.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tenring {

enum class Experiment { a1, a2, b1, b2, b3 };
enum class Scale { desk, paper };

const char* to_string(Experiment e) noexcept;
const char* to_string(Scale s) noexcept;
Experiment parse_experiment(const std::string& name);
Scale parse_scale(const std::string& name);

struct BenchCell {
    /// e.g. "a1:N=3:I=120:R=10" or "b2:eta=1e-10:gamma=1-1e-10".
    std::string label;
    SynthSpec spec;
    Dims ranks;
    std::size_t max_iters = 20;
    ErrorMode error_mode = ErrorMode::exact;
    std::vector<Variant> variants;
};

std::vector<BenchCell> bench_cells(Experiment e, Scale s);
/// 1 for the a/b1 experiments, 10 (desk) or 100 (paper) for b2 and b3.
std::size_t default_trials(Experiment e, Scale s);

struct BenchOptions {
    Experiment experiment = Experiment::a1;
    Scale scale = Scale::desk;
    std::optional<std::size_t> trials;
    /// Run only cells whose label contains this substring.
    std::string cell_filter;
    std::uint64_t base_seed = 0;
    std::optional<std::size_t> max_iters;
    /// Independent trials run on this many threads.
    std::size_t parallel_trials = 1;
};

struct TrialOutcome {
    std::string cell;
    Variant variant = Variant::ne;
    std::size_t trial = 0;
    AlsReport report;
    /// Non-empty when the run threw; the report is then empty.
    std::string error;
};

/// Outcomes ordered by cell, trial, variant regardless of parallelism.
std::vector<TrialOutcome> run_cell(const BenchCell& cell, std::size_t trials, std::uint64_t base_seed,
                                   std::size_t parallel_trials = 1);
std::vector<TrialOutcome> run_bench(const BenchOptions& opts);

inline constexpr const char* kBenchCsvHeader =
    "experiment,variant,trial,iteration,rel_error,iter_seconds,t_subchain,t_mttsp,t_solve,t_gramqr,t_other";

/// One row per (outcome, iteration); rel_error is empty when not tracked.
/// Failed trials produce a single row with iteration 0 and rel_error "error".
void write_bench_csv(std::ostream& out, const std::vector<TrialOutcome>& outcomes);

}  // namespace tenring
