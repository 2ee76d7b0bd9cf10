#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

// Minimal blocking TCP helpers over POSIX sockets, line oriented.
namespace emfa::net {

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public NetError {
public:
    using NetError::NetError;
};

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// "HOST:PORT"; throws std::invalid_argument.
    static Endpoint parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
};

class FileDescriptor {
public:
    FileDescriptor() = default;
    explicit FileDescriptor(int fd) : fd_(fd) {}
    ~FileDescriptor() { reset(); }
    FileDescriptor(FileDescriptor&& o) noexcept : fd_(o.release()) {}
    FileDescriptor& operator=(FileDescriptor&& o) noexcept {
        if (this != &o) reset(o.release());
        return *this;
    }
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;

    [[nodiscard]] int get() const { return fd_; }
    [[nodiscard]] bool valid() const { return fd_ >= 0; }
    int release() {
        int fd = fd_;
        fd_ = -1;
        return fd;
    }
    void reset(int fd = -1);

private:
    int fd_ = -1;
};

class TcpStream {
public:
    TcpStream() = default;
    explicit TcpStream(FileDescriptor fd) : fd_(std::move(fd)) {}

    static TcpStream connect(const Endpoint& ep, std::chrono::milliseconds timeout);

    void write_line(std::string_view line);
    /// Next '\n'-terminated line without the terminator (a trailing '\r' is
    /// dropped). Returns nullopt on orderly EOF; throws TimeoutError on timeout
    /// and NetError on socket failure.
    std::optional<std::string> read_line(std::optional<std::chrono::milliseconds> timeout);

    void shutdown();
    [[nodiscard]] bool is_open() const { return fd_.valid(); }

private:
    FileDescriptor fd_;
    std::string buffer_;
};

class TcpListener {
public:
    /// Binds and listens. Port 0 picks an ephemeral port.
    static TcpListener bind(const Endpoint& ep, int backlog = 1);

    /// Waits up to `timeout` for a client; nullopt when none arrived.
    std::optional<TcpStream> accept(std::chrono::milliseconds timeout);

    [[nodiscard]] std::uint16_t port() const { return port_; }
    [[nodiscard]] bool is_open() const { return fd_.valid(); }
    void close() { fd_.reset(); }

private:
    FileDescriptor fd_;
    std::uint16_t port_ = 0;
};

}  // namespace emfa::net
