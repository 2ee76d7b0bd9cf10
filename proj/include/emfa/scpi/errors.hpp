#pragma once

#include <stdexcept>
#include <string>

namespace emfa::scpi {

/// Connection refused, reset or timed out. Callers may retry.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The instrument answered with an error frame.
class InstrumentError : public std::runtime_error {
public:
    InstrumentError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] int code() const { return code_; }

private:
    int code_;
};

class SettingsRejected : public InstrumentError {
public:
    SettingsRejected(std::string field, int code)
        : InstrumentError(code, "instrument rejected setting '" + field + "' (ERR " + std::to_string(code) + ")"),
          field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// A query returned an error frame or an unparsable response (code -1).
class QueryFailed : public InstrumentError {
public:
    using InstrumentError::InstrumentError;
};

class PreampRejected : public InstrumentError {
public:
    explicit PreampRejected(int code)
        : InstrumentError(code, "pre-amplifier rejected: ADC over-range (ERR " + std::to_string(code) + ")") {}
};

}  // namespace emfa::scpi
