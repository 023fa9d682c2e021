#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsocp::cli {

/// One (problem, configuration) benchmark run. Failed runs keep their
/// measured time in the CSV but count as +inf in profiles.
struct BenchRecord {
    std::string problem;
    std::string config;
    double time_s = 0.0;
    std::string status;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool failed = false;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr std::string_view kBenchCsvHeader =
    "problem,config,time_s,status,objective,iterations,failed";

/// Header line, then one line per record. Doubles are written with 17
/// significant digits so that reading them back is exact. Throws
/// std::invalid_argument when an id contains a comma or newline.
void write_records_csv(std::ostream& out, std::span<const BenchRecord> records);

/// Throws std::runtime_error on a wrong header or a malformed line.
std::vector<BenchRecord> read_records_csv(std::istream& in);

/// Step-function profile for each configuration. `metric[s][p]` is the
/// ratio (relative profile) or time (absolute profile) of configuration s on
/// problem p, +inf for failures; `rho[s][k]` is the profile value at the
/// breakpoint `tau[k]`.
struct ProfileCurves {
    std::vector<std::string> configs;
    std::vector<std::string> problems;
    std::vector<std::vector<double>> metric;
    std::vector<double> tau;
    std::vector<std::vector<double>> rho;

    /// Fraction of problems with metric[s][p] <= tau.
    double value(std::size_t s, double tau) const;
};

struct PerfProfiles {
    ProfileCurves relative;  // r_ps = t_ps / min_s t_ps
    ProfileCurves absolute;  // t_ps
};

/// Builds both profiles. Repeated runs of one (problem, config) pair keep the
/// fastest successful time. Throws std::invalid_argument for an empty record
/// set or when some (problem, config) pair has no record.
PerfProfiles perf_profiles(std::span<const BenchRecord> records);

/// Breakpoint table: kind,config,tau,rho with kind "relative" or "absolute".
void write_profiles_csv(std::ostream& out, const PerfProfiles& profiles);

}  // namespace qsocp::cli
