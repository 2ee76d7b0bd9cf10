#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emfa/core/net.hpp"
#include "emfa/core/series.hpp"

namespace emfa::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitTransport = 3,
    kExitEngine = 4,
    kExitAnalysis = 5,
};

/// Environment variable holding the default instrument address.
inline constexpr const char* kInstrumentEnv = "EMFA_INSTRUMENT";

struct SimulateOptions {
    std::filesystem::path scene;
    net::Endpoint listen{"127.0.0.1", 5025};
    std::optional<net::Endpoint> control;
    std::optional<std::filesystem::path> transcript;
    std::optional<std::uint64_t> seed;
};

/// Serves the scene until `stop` becomes true.
int cmd_simulate(const SimulateOptions& options, const std::atomic<bool>& stop, std::ostream& out,
                 std::ostream& err);

struct MeasureOptions {
    std::optional<net::Endpoint> instrument;
    std::optional<std::filesystem::path> scene;
    std::optional<std::filesystem::path> plan;
    std::optional<std::filesystem::path> params;
    std::optional<std::filesystem::path> script;
    std::filesystem::path out = "session.json";
    std::optional<std::uint64_t> seed;
    std::optional<TrafficDirection> direction;
    std::optional<std::string> rate;  // "max" or Mbps
    std::optional<net::Endpoint> control;
    std::optional<net::Endpoint> iperf;
    std::optional<std::string> location;
    std::optional<bool> los;
    std::optional<double> distance_m;
};

/// Path of the SCPI transcript written next to a session file.
std::filesystem::path transcript_path_for(const std::filesystem::path& session_path);

/// Runs one session. With a scene (flag or script) the analyzer is simulated
/// in-process on a virtual clock; otherwise it is reached over TCP in real
/// time. Without a script, prompts are answered on `in`.
int cmd_measure(const MeasureOptions& options, std::istream& in, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
    std::vector<std::filesystem::path> sessions;
    std::optional<std::filesystem::path> plan;
    std::filesystem::path out = "report.json";
    std::optional<std::filesystem::path> csv;
};

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct ExportOptions {
    std::filesystem::path session;
    std::filesystem::path out;
};

/// Writes every exposure series of a session as CSV.
int cmd_export(const ExportOptions& options, std::ostream& out, std::ostream& err);

}  // namespace emfa::cli
