#include "cli.hpp"

#include "tenring/bench.hpp"
#include "tenring/error.hpp"
#include "tenring/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <ostream>

namespace tenring::cli {

namespace {

struct DecomposeArgs {
    std::string input;
    std::string variant = "ne";
    std::vector<std::size_t> ranks;
    std::size_t max_iters = 20;
    double tol = 0.0;
    std::uint64_t seed = 0;
    std::string error = "exact";
    bool no_fallback = false;
    std::string out;
    std::string cores_out;
};

struct SynthArgs {
    SynthSpec spec;
    std::string kind = "gaussian";
    std::string out;
    std::string truth_cores;
};

struct BenchArgs {
    std::string experiment;
    std::string scale = "desk";
    std::size_t trials = 0;
    std::string cell;
    std::uint64_t seed = 0;
    std::size_t max_iters = 0;
    std::size_t parallel_trials = 1;
    std::string out = "-";
};

void write_text(const std::string& path, const std::string& text, std::ostream& stdout_stream) {
    if (path.empty() || path == "-") {
        stdout_stream << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw FormatError("cannot write " + path);
}

void decompose_cmd(const DecomposeArgs& a, std::ostream& out) {
    const DenseTensor x = load_tensor(a.input);
    AlsConfig cfg;
    cfg.target_ranks = a.ranks;
    cfg.max_iters = a.max_iters;
    cfg.tol = a.tol;
    cfg.seed = a.seed;
    cfg.error_mode = parse_error_mode(a.error);
    cfg.rank_deficient_fallback = !a.no_fallback;
    const Variant variant = parse_variant(a.variant);
    AlsResult res = decompose(x, variant, cfg);
    RunRecord rec{a.input, x.dims(), cfg, variant, res.report, std::nullopt};
    if (!a.cores_out.empty()) save_cores(a.cores_out, res.cores);
    write_text(a.out, to_json(rec), out);
}

void synth_cmd(SynthArgs a) {
    a.spec.core_kind = parse_core_kind(a.kind);
    const SynthResult r = synthesize(a.spec);
    save_tensor(a.out, r.tensor);
    if (!a.truth_cores.empty()) save_cores(a.truth_cores, r.truth);
}

void bench_cmd(const BenchArgs& a, std::ostream& out) {
    BenchOptions opts;
    opts.experiment = parse_experiment(a.experiment);
    opts.scale = parse_scale(a.scale);
    if (a.trials > 0) opts.trials = a.trials;
    opts.cell_filter = a.cell;
    opts.base_seed = a.seed;
    if (a.max_iters > 0) opts.max_iters = a.max_iters;
    opts.parallel_trials = a.parallel_trials;
    const auto outcomes = run_bench(opts);
    if (a.out == "-") {
        write_bench_csv(out, outcomes);
        return;
    }
    std::ofstream f(a.out);
    if (!f) throw FormatError("cannot write " + a.out);
    write_bench_csv(f, outcomes);
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    err << j.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tensor-ring decomposition by alternating least squares", "tenring"};
    app.require_subcommand(1);

    DecomposeArgs dec;
    auto* d = app.add_subcommand("decompose", "Decompose a tensor file and write a JSON run report");
    d->add_option("input", dec.input, "Tensor file (.dten)")->required();
    d->add_option("--variant", dec.variant, "Solver")->check(CLI::IsMember({"als", "ne", "qr", "qrne"}));
    d->add_option("--ranks", dec.ranks, "TR-ranks R_0,...,R_{N-1}")->required()->delimiter(',');
    d->add_option("--max-iters", dec.max_iters, "Sweeps");
    d->add_option("--tol", dec.tol, "Stop when the error changes by less than this (0: off)");
    d->add_option("--seed", dec.seed, "Initialisation seed");
    d->add_option("--error", dec.error, "Error tracking")->check(CLI::IsMember({"exact", "cheap", "none"}));
    d->add_flag("--no-fallback", dec.no_fallback, "Stop instead of using the SVD solve on a degenerate R");
    d->add_option("--out", dec.out, "Report path ('-' or omitted: stdout)");
    d->add_option("--cores-out", dec.cores_out, "Directory for core_<n>.dten");

    SynthArgs syn;
    auto* s = app.add_subcommand("synth", "Generate a synthetic tensor");
    s->add_option("--order", syn.spec.order, "N");
    s->add_option("--dim", syn.spec.dim, "I (all modes)");
    s->add_option("--rank", syn.spec.true_rank, "R_true");
    s->add_option("--kind", syn.kind, "Core generator")
        ->check(CLI::IsMember({"gaussian", "congruent", "student_t"}));
    s->add_option("--gamma", syn.spec.gamma, "Column congruence (congruent)");
    s->add_option("--theta", syn.spec.theta, "Correlation level (student_t)");
    s->add_option("--dof", syn.spec.dof, "Degrees of freedom (student_t)");
    s->add_option("--eta", syn.spec.eta, "Noise level");
    s->add_option("--seed", syn.spec.seed, "Seed");
    s->add_option("--out", syn.out, "Output tensor file")->required();
    s->add_option("--truth-cores", syn.truth_cores, "Directory for the generating cores");

    BenchArgs ben;
    auto* b = app.add_subcommand("bench", "Run a synthetic experiment and write long-format CSV");
    b->add_option("--experiment", ben.experiment, "Experiment")
        ->required()
        ->check(CLI::IsMember({"a1", "a2", "b1", "b2", "b3"}));
    b->add_option("--scale", ben.scale, "Problem sizes")->check(CLI::IsMember({"desk", "paper"}));
    b->add_option("--trials", ben.trials, "Trials per cell (default depends on experiment)");
    b->add_option("--cell", ben.cell, "Only cells whose label contains this text");
    b->add_option("--seed", ben.seed, "Base seed; trial t uses seed + t");
    b->add_option("--max-iters", ben.max_iters, "Sweeps per run (default 20)");
    b->add_option("--parallel-trials", ben.parallel_trials, "Concurrent trials")->check(CLI::PositiveNumber);
    b->add_option("--out", ben.out, "CSV path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*d) decompose_cmd(dec, out);
        if (*s) synth_cmd(syn);
        if (*b) bench_cmd(ben, out);
    } catch (const Error& e) {
        report_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        report_error(err, "invalid_argument", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error(err, "error", e.what());
        return 1;
    }
    return 0;
}

}  // namespace tenring::cli
