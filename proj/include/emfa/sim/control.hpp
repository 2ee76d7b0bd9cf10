#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "emfa/core/net.hpp"
#include "emfa/sim/scene.hpp"

namespace emfa::sim {

/// Scene mutations available to operators and the traffic controller.
class SceneControl {
public:
    virtual ~SceneControl() = default;
    virtual void set_antenna(EmitterRole target) = 0;
    virtual void set_traffic(bool active, TrafficDirection direction, double rate_mbps) = 0;
    virtual LinkCapacity link_capacity() = 0;
};

/// Direct access to an in-process scene.
class LocalSceneControl final : public SceneControl {
public:
    explicit LocalSceneControl(std::shared_ptr<SceneState> scene) : scene_(std::move(scene)) {}

    void set_antenna(EmitterRole target) override { scene_->set_antenna(target); }
    void set_traffic(bool active, TrafficDirection direction, double rate_mbps) override {
        scene_->set_traffic(active, direction, rate_mbps);
    }
    LinkCapacity link_capacity() override { return scene_->snapshot().link; }

private:
    std::shared_ptr<SceneState> scene_;
};

/// Line protocol on the simulator's control port:
///   ANT RBS|UE                 -> OK
///   TRAF ON UL|DL <rate_mbps>  -> OK
///   TRAF OFF                   -> OK
///   LINK?                      -> <ul_mbps>,<dl_mbps>
///   STATE?                     -> <antenna>,<0|1>,<UL|DL>,<rate_mbps>
/// Anything else answers ERR 100.
std::string handle_control_line(SceneState& scene, std::string_view line);

/// Client for a simulator control port. Thread-safe.
class RemoteSceneControl final : public SceneControl {
public:
    explicit RemoteSceneControl(net::Endpoint endpoint);

    void set_antenna(EmitterRole target) override;
    void set_traffic(bool active, TrafficDirection direction, double rate_mbps) override;
    LinkCapacity link_capacity() override;

private:
    std::string exchange(const std::string& line);

    std::mutex mu_;
    net::TcpStream stream_;
};

}  // namespace emfa::sim
