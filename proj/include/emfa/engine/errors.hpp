#pragma once

#include <stdexcept>
#include <string>

#include "emfa/core/series.hpp"

namespace emfa::engine {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The running maximum never rose above the initial sentinel: the
/// instrument returned nothing usable.
class DegenerateSignal : public EngineError {
public:
    explicit DegenerateSignal(const std::string& band_id)
        : EngineError("no level above the search sentinel in band " + band_id), band_id_(band_id) {}
    [[nodiscard]] const std::string& band_id() const { return band_id_; }

private:
    std::string band_id_;
};

/// A query failed mid-series; carries what was collected before it.
class PartialSeries : public EngineError {
public:
    PartialSeries(ExposureSeries partial, const std::string& cause)
        : EngineError("series for " + partial.band_id + " interrupted after " +
                      std::to_string(partial.samples.size()) + " samples: " + cause),
          partial_(std::move(partial)) {}
    [[nodiscard]] const ExposureSeries& partial() const { return partial_; }

private:
    ExposureSeries partial_;
};

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptySelection : public EngineError {
public:
    EmptySelection() : EngineError("no band showed a traffic-driven increase") {}
};

class StaleTraffic : public EngineError {
public:
    using EngineError::EngineError;
};

}  // namespace emfa::engine
