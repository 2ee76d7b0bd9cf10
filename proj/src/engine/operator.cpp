#include "emfa/engine/operator.hpp"

#include <istream>
#include <ostream>

namespace emfa::engine {

std::string_view to_string(Step s) {
    switch (s) {
        case Step::M1: return "M1";
        case Step::M2: return "M2";
        case Step::M3: return "M3";
    }
    return "?";
}

std::string_view prompt_text(Step s) {
    switch (s) {
        case Step::M1: return kPromptM1;
        case Step::M2: return kPromptM2;
        case Step::M3: return kPromptM3;
    }
    return {};
}

bool StreamOperator::confirm(Step, std::string_view prompt) {
    *out_ << prompt << std::endl;
    std::string line;
    if (!std::getline(*in_, line)) return false;
    const auto first = line.find_first_not_of(" \t\r");
    const auto last = line.find_last_not_of(" \t\r");
    return first != std::string::npos && line.substr(first, last - first + 1) == "ok";
}

void StreamOperator::report(std::string_view line) { *out_ << line << std::endl; }

bool ScriptedOperator::confirm(Step step, std::string_view prompt) {
    prompts_.emplace_back(prompt);
    return responder_(step);
}

}  // namespace emfa::engine
