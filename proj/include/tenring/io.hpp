#pragma once

// Tensor files and run reports.
//
// Tensor file layout (all little-endian):
//     "DTEN"            4 bytes
//     version           u32, currently 1
//     order N           u32
//     dims              N x u64
//     payload           prod(dims) x binary64, first index fastest
//
// Doubles are copied bitwise, so NaN payloads survive a round trip.

#include "tenring/als.hpp"
#include "tenring/datagen.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tenring {

inline constexpr std::uint32_t kTensorFileVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

void write_tensor(std::ostream& out, const DenseTensor& x);
/// Throws FormatError on a bad magic, version, truncated payload or trailing
/// bytes, and BudgetExceeded before allocating an oversized tensor.
DenseTensor read_tensor(std::istream& in);

void save_tensor(const std::filesystem::path& path, const DenseTensor& x);
DenseTensor load_tensor(const std::filesystem::path& path);

/// core_<n>.dten for every core, creating the directory if needed.
void save_cores(const std::filesystem::path& dir, const TrCores& cores);
/// Reads core_0.dten, core_1.dten, ... until the first missing index.
TrCores load_cores(const std::filesystem::path& dir);

/// Shortest decimal that parses back to the same double ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double v);

struct RunRecord {
    std::string input;
    Dims dims;
    AlsConfig config;
    Variant variant = Variant::als;
    AlsReport report;
    /// Present when the tensor came from the generator rather than a file.
    std::optional<SynthSpec> synth;
};

/// Compiler, build type and host concurrency.
std::string environment_stamp();

/// Pretty-printed JSON, keys in a fixed order.
std::string to_json(const RunRecord& record);

}  // namespace tenring
