#include "emfa/sim/server.hpp"

#include "emfa/core/io.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/sim/instrument_model.hpp"

namespace emfa::sim {

namespace {
constexpr std::chrono::milliseconds kPollInterval{50};
}

SanServer::SanServer(std::shared_ptr<SceneState> scene, const Clock& clock, ServerOptions options)
    : scene_(std::move(scene)), clock_(&clock), options_(std::move(options)) {}

SanServer::~SanServer() { stop(); }

net::Endpoint SanServer::endpoint() const { return {options_.instrument.host, port_}; }

void SanServer::start() {
    net::TcpListener instrument;
    std::optional<net::TcpListener> control;
    try {
        instrument = net::TcpListener::bind(options_.instrument);
        if (options_.control) control = net::TcpListener::bind(*options_.control, 4);
    } catch (const net::NetError& e) {
        throw StartupError(e.what());
    }
    if (options_.transcript_log) {
        log_.open(*options_.transcript_log, std::ios::trunc);
        if (!log_) throw StartupError("cannot open transcript log " + options_.transcript_log->string());
    }
    port_ = instrument.port();
    instrument_thread_ = std::jthread(
        [this, l = std::move(instrument)](std::stop_token st) mutable { serve_instrument(st, std::move(l)); });
    if (control) {
        control_port_ = control->port();
        control_thread_ = std::jthread(
            [this, l = std::move(*control)](std::stop_token st) mutable { serve_control(st, std::move(l)); });
    }
}

void SanServer::stop() {
    if (instrument_thread_.joinable()) {
        instrument_thread_.request_stop();
        instrument_thread_.join();
    }
    if (control_thread_.joinable()) {
        control_thread_.request_stop();
        control_thread_.join();
    }
}

void SanServer::log(char direction, std::string_view line) {
    if (!log_.is_open()) return;
    std::lock_guard lock(log_mu_);
    log_ << format_number(clock_->now_seconds()) << ' ' << direction << ' ' << line << '\n';
    log_.flush();
}

void SanServer::serve_instrument(std::stop_token stop, net::TcpListener listener) {
    const net::Endpoint rebind{options_.instrument.host, port_};
    while (!stop.stop_requested()) {
        if (!listener.is_open()) {
            try {
                listener = net::TcpListener::bind(rebind);
            } catch (const net::NetError&) {
                std::this_thread::sleep_for(kPollInterval);
                continue;
            }
        }
        auto client = listener.accept(kPollInterval);
        if (!client) continue;
        listener.close();  // single-client policy
        ++clients_served_;

        InstrumentModel model(scene_);
        while (!stop.stop_requested()) {
            std::optional<std::string> line;
            try {
                line = client->read_line(kPollInterval);
            } catch (const net::TimeoutError&) {
                continue;  // check for stop
            } catch (const net::NetError&) {
                break;
            }
            if (!line) break;
            log('<', *line);
            const std::string reply = model.handle(*line);
            log('>', reply);
            try {
                client->write_line(reply);
            } catch (const net::NetError&) {
                break;
            }
        }
        client->shutdown();
    }
}

void SanServer::serve_control(std::stop_token stop, net::TcpListener listener) {
    // Control clients are few and short-lived: serve them one after another,
    // but never let one block the accept loop for long.
    std::vector<net::TcpStream> clients;
    while (!stop.stop_requested()) {
        if (auto c = listener.accept(std::chrono::milliseconds{10})) clients.push_back(std::move(*c));
        for (auto it = clients.begin(); it != clients.end();) {
            std::optional<std::string> line;
            bool closed = false;
            try {
                line = it->read_line(std::chrono::milliseconds{5});
                closed = !line;
            } catch (const net::TimeoutError&) {
            } catch (const net::NetError&) {
                closed = true;
            }
            if (closed) {
                it = clients.erase(it);
                continue;
            }
            if (line) {
                try {
                    it->write_line(handle_control_line(*scene_, *line));
                } catch (const net::NetError&) {
                    it = clients.erase(it);
                    continue;
                }
            }
            ++it;
        }
    }
}

}  // namespace emfa::sim
