#include "emfa/scpi/transcript.hpp"

#include <algorithm>

#include "emfa/core/io.hpp"

namespace emfa::scpi {

void CommandTranscript::record(Direction d, std::string_view line, double timestamp_s) {
    std::string clean(line);
    std::erase(clean, '\n');
    entries_.push_back({d, std::move(clean), timestamp_s});
}

std::vector<std::string> CommandTranscript::lines(Direction d) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.direction == d) out.push_back(e.line);
    return out;
}

std::string CommandTranscript::to_text() const {
    std::string out;
    for (const auto& e : entries_) {
        out += format_number(e.timestamp_s);
        out += e.direction == Direction::Sent ? " > " : " < ";
        out += e.line;
        out += '\n';
    }
    return out;
}

}  // namespace emfa::scpi
