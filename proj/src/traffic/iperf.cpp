#include "emfa/traffic/iperf.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <regex>
#include <thread>

#include "emfa/core/io.hpp"

extern char** environ;

namespace emfa::traffic {

std::optional<IntervalReport> parse_interval_line(std::string_view line) {
    static const std::regex re(
        R"(^\[\s*(\d+|SUM)\]\s+([0-9.]+)-\s*([0-9.]+)\s+sec\s+[0-9.]+\s+[KMGT]?Bytes\s+([0-9.]+)\s+([KMGT]?)bits/sec(.*)$)");
    std::cmatch m;
    if (!std::regex_match(line.data(), line.data() + line.size(), m, re)) return std::nullopt;
    const std::string tail = m[6].str();
    if (tail.find("sender") != std::string::npos || tail.find("receiver") != std::string::npos) return std::nullopt;

    IntervalReport r;
    if (m[1].str() != "SUM") r.stream = std::stoi(m[1].str());
    r.start_s = std::stod(m[2].str());
    r.end_s = std::stod(m[3].str());
    double scale = 1e-6;
    switch (m[5].str().empty() ? ' ' : m[5].str()[0]) {
        case 'K': scale = 1e-3; break;
        case 'M': scale = 1.0; break;
        case 'G': scale = 1e3; break;
        case 'T': scale = 1e6; break;
        default: break;
    }
    r.mbps = std::stod(m[4].str()) * scale;
    return r;
}

std::vector<std::string> iperf_arguments(const IperfOptions& options, const TrafficSpec& spec) {
    std::vector<std::string> args{options.binary,
                                  "-c",
                                  options.server.host,
                                  "-p",
                                  std::to_string(options.server.port),
                                  "-t",
                                  format_number(spec.duration_s),
                                  "-i",
                                  format_number(spec.report_interval_s),
                                  "-P",
                                  std::to_string(spec.parallel_streams),
                                  "-f",
                                  "m",
                                  "--forceflush"};
    if (spec.direction == TrafficDirection::Downlink) args.emplace_back("-R");
    if (spec.target_rate_mbps) {
        args.emplace_back("-b");
        args.push_back(format_number(*spec.target_rate_mbps) + "M");
    }
    return args;
}

namespace {

class IperfSession final : public TrafficSession {
public:
    IperfSession(const TrafficSpec& spec, const Clock& clock) : TrafficSession(spec), clock_(&clock) {}

    ~IperfSession() override {
        terminate();
        if (reader_.joinable()) reader_.join();
    }

    void begin(const std::vector<std::string>& args) {
        int fds[2];
        if (::pipe(fds) != 0) {
            finish(SessionState::Failed, std::string("pipe: ") + std::strerror(errno));
            return;
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
        posix_spawn_file_actions_addclose(&actions, fds[0]);
        posix_spawn_file_actions_addclose(&actions, fds[1]);

        std::vector<char*> argv;
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        pid_t pid = 0;
        const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            finish(SessionState::Failed, "cannot start " + args.front() + ": " + std::strerror(rc));
            return;
        }
        {
            std::lock_guard lock(pid_mu_);
            pid_ = pid;
        }
        start_s_ = clock_->now_seconds();
        reader_ = std::thread([this, fd = fds[0]] { read_output(fd); });
    }

private:
    void read_output(int fd) {
        FILE* in = ::fdopen(fd, "r");
        std::string last_line;
        char buf[512];
        const bool sum_only = spec().parallel_streams > 1;
        while (in && std::fgets(buf, sizeof buf, in)) {
            std::string line(buf);
            while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
            if (!line.empty()) last_line = line;
            const auto r = parse_interval_line(line);
            if (!r || (sum_only && r->stream)) continue;
            add_sample({start_s_ + r->end_s, r->mbps});
        }
        if (in) std::fclose(in);

        int status = 0;
        pid_t pid;
        {
            std::lock_guard lock(pid_mu_);
            pid = pid_;
        }
        ::waitpid(pid, &status, 0);
        {
            std::lock_guard lock(pid_mu_);
            pid_ = 0;
        }
        if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
            finish(SessionState::Expired);
        } else {
            finish(SessionState::Failed, last_line.empty() ? "bulk-transfer tool exited abnormally" : last_line);
        }
    }

    void terminate() {
        std::lock_guard lock(pid_mu_);
        if (pid_ > 0) ::kill(pid_, SIGTERM);
    }

    void on_stop() override { terminate(); }

    const Clock* clock_;
    double start_s_ = 0.0;
    std::mutex pid_mu_;
    pid_t pid_ = 0;
    std::thread reader_;
};

}  // namespace

std::shared_ptr<TrafficSession> IperfBackend::start(const TrafficSpec& spec) {
    if (auto bad = spec.invalid_field()) throw std::invalid_argument("invalid traffic spec field: " + *bad);
    auto session = std::make_shared<IperfSession>(spec, *clock_);
    session->begin(iperf_arguments(options_, spec));
    return session;
}

}  // namespace emfa::traffic
