#pragma once

#include <deque>
#include <memory>

#include "emfa/scpi/client.hpp"
#include "emfa/sim/instrument_model.hpp"

namespace emfa::sim {

/// In-process channel straight into an InstrumentModel, no sockets.
class LoopbackChannel final : public scpi::LineChannel {
public:
    explicit LoopbackChannel(std::shared_ptr<const SceneState> scene) : model_(std::move(scene)) {}

    void send_line(std::string_view line) override { pending_.push_back(model_.handle(line)); }
    std::string receive_line(std::chrono::milliseconds) override {
        if (pending_.empty()) throw scpi::TransportError("no response pending");
        std::string r = std::move(pending_.front());
        pending_.pop_front();
        return r;
    }

    [[nodiscard]] const InstrumentModel& model() const { return model_; }

private:
    InstrumentModel model_;
    std::deque<std::string> pending_;
};

}  // namespace emfa::sim
