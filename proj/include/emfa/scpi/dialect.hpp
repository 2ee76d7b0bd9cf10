#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emfa/core/units.hpp"
#include "emfa/scpi/settings.hpp"

// Wire grammar shared by the client and the simulator. Every line is ASCII,
// newline terminated. Sets are "HEADER value"; queries end in '?'. Every
// command gets exactly one response line: "OK" for accepted sets, bare
// numbers (comma separated for lists) for queries, "ERR <code>" on failure.
// A backend for a real instrument only has to remap this table.
namespace emfa::scpi {

enum class Command {
    Identify,
    SetUnit,
    SetFreqStart,
    SetFreqStop,
    SetAttenuation,
    SetResolutionBw,
    SetVideoBw,
    SetSweepPoints,
    SetTraceDetector,
    SetTypeDetector,
    SetAverageCount,
    SetPreamp,
    SetRefLevel,
    SetScaleDiv,
    QueryMaxLevel,
    QueryChannelPower,
    QueryTrace,
    ResetTrace,
};

struct CommandSpec {
    Command command;
    std::string_view header;
    std::string_view field;  // InstrumentSettings field for sets, empty otherwise
};

// Set commands appear in the order apply_settings emits them.
inline constexpr std::array kCommandTable{
    CommandSpec{Command::Identify, "*IDN?", ""},
    CommandSpec{Command::SetUnit, "UNIT:POW", "unit"},
    CommandSpec{Command::SetFreqStart, "FREQ:STAR", "f_start"},
    CommandSpec{Command::SetFreqStop, "FREQ:STOP", "f_stop"},
    CommandSpec{Command::SetAttenuation, "INP:ATT", "attenuation"},
    CommandSpec{Command::SetResolutionBw, "BAND:RES", "resolution_bw"},
    CommandSpec{Command::SetVideoBw, "BAND:VID", "video_bw"},
    CommandSpec{Command::SetSweepPoints, "SWE:POIN", "sweep_points"},
    CommandSpec{Command::SetTraceDetector, "DET:TRAC", "trace_detector"},
    CommandSpec{Command::SetTypeDetector, "DET:TYPE", "type_detector"},
    CommandSpec{Command::SetAverageCount, "AVER:COUN", "avg_samples"},
    CommandSpec{Command::SetPreamp, "INP:GAIN:STAT", "preamp"},
    CommandSpec{Command::SetRefLevel, "DISP:Y:RLEV", "ref_level"},
    CommandSpec{Command::SetScaleDiv, "DISP:Y:PDIV", "scale_div"},
    CommandSpec{Command::QueryMaxLevel, "CALC:MAX?", ""},
    CommandSpec{Command::QueryChannelPower, "CALC:CHP?", ""},
    CommandSpec{Command::QueryTrace, "TRAC:DATA?", ""},
    CommandSpec{Command::ResetTrace, "TRAC:RES", ""},
};

const CommandSpec& spec_of(Command c);
std::optional<Command> command_for_header(std::string_view header);

namespace err {
inline constexpr int kMalformed = 100;
inline constexpr int kBadArgument = 101;
inline constexpr int kOutOfRange = 102;
inline constexpr int kInvalidSpan = 103;
inline constexpr int kDetectorMismatch = 104;
inline constexpr int kAdcOverRange = 220;
}  // namespace err

inline constexpr std::string_view kAck = "OK";

std::string_view to_token(MeasureUnit u);
std::string_view to_token(TypeDetector d);
std::string_view to_token(TraceDetector d);
std::optional<TypeDetector> parse_type_detector(std::string_view s);
std::optional<TraceDetector> parse_trace_detector(std::string_view s);

struct EncodedSet {
    Command command;
    std::string line;
};

/// One line per non-AUTO field, in table order. Total for valid settings.
std::vector<EncodedSet> encode_settings(const InstrumentSettings& s);

std::string encode_span_query(Command q, Frequency f_min, Frequency f_max);
std::string encode_error(int code);

/// Decimal with optional exponent, nothing else.
std::optional<double> parse_number(std::string_view text);
std::optional<std::vector<double>> parse_number_list(std::string_view text);
/// Returns the code if the line is an "ERR <code>" frame.
std::optional<int> parse_error_frame(std::string_view line);

/// Linear sweep grid used by both ends for TRAC:DATA? responses.
std::vector<Frequency> trace_grid(Frequency f_start, Frequency f_stop, int points);

/// Splits "HEADER args" into the header and the trimmed argument text.
std::pair<std::string_view, std::string_view> split_command(std::string_view line);

}  // namespace emfa::scpi
