#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "emfa/core/clock.hpp"
#include "emfa/core/net.hpp"
#include "emfa/sim/scene.hpp"

namespace emfa::sim {

class StartupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ServerOptions {
    net::Endpoint instrument{"127.0.0.1", 0};
    std::optional<net::Endpoint> control;
    std::optional<std::filesystem::path> transcript_log;
};

/// Protocol-compatible analyzer on TCP. Serves one instrument client at a
/// time: while a client is connected the listening socket is closed, so a
/// second connection attempt is refused. Each client gets a fresh instrument
/// state seeded from the scene. The optional control port accepts scene
/// mutations (see handle_control_line) from any number of sequential clients.
class SanServer {
public:
    SanServer(std::shared_ptr<SceneState> scene, const Clock& clock, ServerOptions options);
    ~SanServer();

    SanServer(const SanServer&) = delete;
    SanServer& operator=(const SanServer&) = delete;

    /// Binds the ports and starts serving. Throws StartupError.
    void start();
    void stop();

    [[nodiscard]] std::uint16_t port() const { return port_; }
    [[nodiscard]] std::uint16_t control_port() const { return control_port_; }
    [[nodiscard]] net::Endpoint endpoint() const;
    [[nodiscard]] std::size_t clients_served() const { return clients_served_.load(); }

private:
    void serve_instrument(std::stop_token stop, net::TcpListener listener);
    void serve_control(std::stop_token stop, net::TcpListener listener);
    void log(char direction, std::string_view line);

    std::shared_ptr<SceneState> scene_;
    const Clock* clock_;
    ServerOptions options_;
    std::uint16_t port_ = 0;
    std::uint16_t control_port_ = 0;
    std::atomic<std::size_t> clients_served_{0};
    std::mutex log_mu_;
    std::ofstream log_;
    std::jthread instrument_thread_;
    std::jthread control_thread_;
};

}  // namespace emfa::sim
