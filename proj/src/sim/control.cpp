#include "emfa/sim/control.hpp"

#include <stdexcept>

#include "emfa/core/io.hpp"
#include "emfa/scpi/dialect.hpp"
#include "emfa/scpi/errors.hpp"

namespace emfa::sim {

std::string handle_control_line(SceneState& scene, std::string_view line) {
    auto [head, args] = scpi::split_command(line);
    if (head == "ANT") {
        auto role = parse_role(args);
        if (!role) return scpi::encode_error(scpi::err::kBadArgument);
        scene.set_antenna(*role);
        return "OK";
    }
    if (head == "TRAF") {
        if (args == "OFF") {
            scene.set_traffic(false, TrafficDirection::Uplink, 0.0);
            return "OK";
        }
        auto [on, rest] = scpi::split_command(args);
        auto [dir_text, rate_text] = scpi::split_command(rest);
        auto dir = parse_direction(dir_text);
        auto rate = scpi::parse_number(rate_text);
        if (on != "ON" || !dir || !rate || *rate < 0.0) return scpi::encode_error(scpi::err::kBadArgument);
        scene.set_traffic(true, *dir, *rate);
        return "OK";
    }
    if (head == "LINK?" && args.empty()) {
        const auto link = scene.snapshot().link;
        return format_number(link.ul_mbps) + "," + format_number(link.dl_mbps);
    }
    if (head == "STATE?" && args.empty()) {
        const Scene s = scene.snapshot();
        return std::string(to_string(s.antenna_target)) + "," + (s.traffic_active ? "1" : "0") + "," +
               std::string(to_string(s.traffic_direction)) + "," + format_number(s.traffic_rate_mbps);
    }
    return scpi::encode_error(scpi::err::kMalformed);
}

RemoteSceneControl::RemoteSceneControl(net::Endpoint endpoint) {
    try {
        stream_ = net::TcpStream::connect(endpoint, std::chrono::milliseconds{5000});
    } catch (const net::NetError& e) {
        throw scpi::TransportError(std::string("control port: ") + e.what());
    }
}

std::string RemoteSceneControl::exchange(const std::string& line) {
    std::lock_guard lock(mu_);
    try {
        stream_.write_line(line);
        auto reply = stream_.read_line(std::chrono::milliseconds{5000});
        if (!reply) throw scpi::TransportError("control port closed");
        if (reply->starts_with("ERR")) throw std::runtime_error("control command '" + line + "' failed: " + *reply);
        return *reply;
    } catch (const net::NetError& e) {
        throw scpi::TransportError(std::string("control port: ") + e.what());
    }
}

void RemoteSceneControl::set_antenna(EmitterRole target) {
    exchange("ANT " + std::string(to_string(target)));
}

void RemoteSceneControl::set_traffic(bool active, TrafficDirection direction, double rate_mbps) {
    if (!active) {
        exchange("TRAF OFF");
        return;
    }
    exchange("TRAF ON " + std::string(to_string(direction)) + " " + format_number(rate_mbps));
}

LinkCapacity RemoteSceneControl::link_capacity() {
    auto values = scpi::parse_number_list(exchange("LINK?"));
    if (!values || values->size() != 2) throw std::runtime_error("bad LINK? response");
    return {(*values)[0], (*values)[1]};
}

}  // namespace emfa::sim
