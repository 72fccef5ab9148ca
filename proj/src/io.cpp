#include "tenring/io.hpp"

#include "tenring/error.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

namespace tenring {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'D', 'T', 'E', 'N'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw FormatError(std::string("tensor file: truncated while reading ") + what);
    }
    return v;
}

}  // namespace

void write_tensor(std::ostream& out, const DenseTensor& x) {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kTensorFileVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(x.order()));
    for (auto d : x.dims()) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(x.raw()), static_cast<std::streamsize>(x.size() * sizeof(double)));
    if (!out) throw FormatError("tensor file: write failed");
}

DenseTensor read_tensor(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError("tensor file: bad magic");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kTensorFileVersion) {
        throw FormatError("tensor file: unsupported version " + std::to_string(version));
    }
    const auto order = get<std::uint32_t>(in, "order");
    if (order == 0) throw FormatError("tensor file: order 0");
    Dims dims(order);
    std::size_t count = 1;
    for (auto& d : dims) {
        d = static_cast<std::size_t>(get<std::uint64_t>(in, "dims"));
        if (d == 0) throw FormatError("tensor file: zero extent");
        if (count > element_budget() / d) throw BudgetExceeded(count * d, element_budget());
        count *= d;
    }
    check_budget(count);
    std::vector<double> data(count);
    const auto bytes = static_cast<std::streamsize>(count * sizeof(double));
    if (!in.read(reinterpret_cast<char*>(data.data()), bytes)) {
        throw FormatError("tensor file: payload shorter than " + std::to_string(bytes) + " bytes");
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("tensor file: trailing bytes");
    return DenseTensor(std::move(dims), std::move(data));
}

void save_tensor(const std::filesystem::path& path, const DenseTensor& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    write_tensor(out, x);
}

DenseTensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_tensor(in);
}

void save_cores(const std::filesystem::path& dir, const TrCores& cores) {
    std::filesystem::create_directories(dir);
    for (std::size_t n = 0; n < cores.order(); ++n)
        save_tensor(dir / ("core_" + std::to_string(n) + ".dten"), cores.core(n));
}

TrCores load_cores(const std::filesystem::path& dir) {
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0;; ++n) {
        const auto p = dir / ("core_" + std::to_string(n) + ".dten");
        if (!std::filesystem::exists(p)) break;
        cores.push_back(load_tensor(p));
    }
    if (cores.empty()) throw FormatError("no core_0.dten in " + dir.string());
    try {
        return TrCores(std::move(cores));
    } catch (const DimensionError& e) {
        throw FormatError(std::string("cores in ") + dir.string() + ": " + e.what());
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string environment_stamp() {
    std::string s;
#if defined(__clang__)
    s += "clang " __clang_version__;
#elif defined(__GNUC__)
    s += "gcc " __VERSION__;
#else
    s += "unknown compiler";
#endif
#ifdef NDEBUG
    s += "; release";
#else
    s += "; debug";
#endif
    s += "; threads=" + std::to_string(std::thread::hardware_concurrency());
    return s;
}

namespace {

using Json = nlohmann::ordered_json;

// Non-finite values become strings; JSON has no literal for them.
Json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

}  // namespace

std::string to_json(const RunRecord& r) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input"] = r.input;
    j["dims"] = r.dims;

    Json cfg;
    cfg["variant"] = to_string(r.variant);
    cfg["ranks"] = r.config.target_ranks;
    cfg["max_iters"] = r.config.max_iters;
    cfg["tol"] = r.config.tol;
    cfg["seed"] = r.config.seed;
    cfg["error"] = to_string(r.config.error_mode);
    cfg["rank_deficient_fallback"] = r.config.rank_deficient_fallback;
    cfg["svd_rcond"] = r.config.svd_rcond;
    j["config"] = cfg;

    if (r.synth) {
        Json s;
        s["order"] = r.synth->order;
        s["dim"] = r.synth->dim;
        s["true_rank"] = r.synth->true_rank;
        s["core_kind"] = to_string(r.synth->core_kind);
        s["gamma"] = r.synth->gamma;
        s["theta"] = r.synth->theta;
        s["dof"] = r.synth->dof;
        s["eta"] = r.synth->eta;
        s["seed"] = r.synth->seed;
        j["synth"] = s;
    }

    const AlsReport& rep = r.report;
    j["iterations"] = rep.iterations;
    j["rel_errors"] = numbers(rep.rel_errors);
    j["final_error"] = rep.rel_errors.empty() ? Json(nullptr) : number(rep.final_error());
    j["iter_seconds"] = numbers(rep.iter_seconds);
    Json buckets = Json::array();
    for (const auto& b : rep.buckets) {
        buckets.push_back(Json{{"subchain", b.subchain},
                               {"mttsp", b.mttsp},
                               {"solve", b.solve},
                               {"gram_qr", b.gram_qr},
                               {"other", b.other}});
    }
    j["buckets"] = buckets;
    j["upfront_seconds"] = rep.upfront_seconds;
    j["error_seconds"] = rep.error_seconds;
    j["total_seconds"] = rep.total_seconds;
    j["termination"] = to_string(rep.termination);
    if (!rep.termination_detail.empty()) j["termination_detail"] = rep.termination_detail;
    j["fallback_count"] = rep.fallback_count;
    j["environment"] = environment_stamp();
    return j.dump(2) + "\n";
}

}  // namespace tenring
