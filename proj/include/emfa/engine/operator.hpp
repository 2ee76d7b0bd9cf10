#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace emfa::engine {

enum class Step { M1, M2, M3 };

std::string_view to_string(Step s);

/// Fixed prompt lines. Scripted operators match on these.
inline constexpr std::string_view kPromptM1 = "M1: point the antenna towards the RBS, then type ok";
inline constexpr std::string_view kPromptM2 =
    "M2: point the antenna towards the smartphone at 0.25 m or more, then type ok";
inline constexpr std::string_view kPromptM3 = "M3: point the antenna back towards the RBS, then type ok";

std::string_view prompt_text(Step s);

/// Where the engine asks for operator confirmations.
class OperatorPort {
public:
    virtual ~OperatorPort() = default;
    /// True when the operator confirmed.
    virtual bool confirm(Step step, std::string_view prompt) = 0;
    virtual void report(std::string_view line) = 0;
};

/// Prints each prompt on `out` and reads one line from `in`; only a literal
/// "ok" (surrounding blanks ignored) confirms.
class StreamOperator final : public OperatorPort {
public:
    StreamOperator(std::istream& in, std::ostream& out) : in_(&in), out_(&out) {}
    bool confirm(Step step, std::string_view prompt) override;
    void report(std::string_view line) override;

private:
    std::istream* in_;
    std::ostream* out_;
};

/// Answers prompts from a callback and keeps a log of everything it saw.
class ScriptedOperator final : public OperatorPort {
public:
    using Responder = std::function<bool(Step)>;

    explicit ScriptedOperator(Responder responder = [](Step) { return true; })
        : responder_(std::move(responder)) {}
    bool confirm(Step step, std::string_view prompt) override;
    void report(std::string_view line) override { reports_.emplace_back(line); }

    [[nodiscard]] const std::vector<std::string>& prompts() const { return prompts_; }
    [[nodiscard]] const std::vector<std::string>& reports() const { return reports_; }

private:
    Responder responder_;
    std::vector<std::string> prompts_;
    std::vector<std::string> reports_;
};

}  // namespace emfa::engine
