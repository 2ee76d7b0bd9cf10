#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emfa::scpi {

enum class Direction { Sent, Received };

struct TranscriptEntry {
    Direction direction;
    std::string line;
    double timestamp_s;

    bool operator==(const TranscriptEntry&) const = default;
};

/// Wire-ordered log of every line exchanged on one handle.
class CommandTranscript {
public:
    void record(Direction d, std::string_view line, double timestamp_s);

    [[nodiscard]] const std::vector<TranscriptEntry>& entries() const { return entries_; }
    [[nodiscard]] std::vector<std::string> lines(Direction d) const;
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    /// One entry per line: "<timestamp> > <sent>" or "<timestamp> < <received>".
    [[nodiscard]] std::string to_text() const;

private:
    std::vector<TranscriptEntry> entries_;
};

}  // namespace emfa::scpi
