#include "emfa/core/net.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace emfa::net {

namespace {

std::string errno_text(std::string_view what) {
    return std::string(what) + ": " + std::strerror(errno);
}

sockaddr_in resolve(const Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string host = ep.host.empty() ? "127.0.0.1" : ep.host;
    if (int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || !res)
        throw NetError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    ::freeaddrinfo(res);
    addr.sin_port = htons(ep.port);
    return addr;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon + 1 == text.size())
        throw std::invalid_argument("expected HOST:PORT, got '" + std::string(text) + "'");
    unsigned port = 0;
    auto digits = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535)
        throw std::invalid_argument("bad port in '" + std::string(text) + "'");
    Endpoint ep;
    ep.host = std::string(text.substr(0, colon));
    if (ep.host.empty()) ep.host = "127.0.0.1";
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

void FileDescriptor::reset(int fd) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
}

TcpStream TcpStream::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
    const sockaddr_in addr = resolve(ep);
    FileDescriptor fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd.valid()) throw NetError(errno_text("socket"));

    const int flags = ::fcntl(fd.get(), F_GETFL, 0);
    ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
    if (rc != 0 && errno != EINPROGRESS) throw NetError(errno_text("connect " + ep.to_string()));
    if (rc != 0) {
        pollfd p{fd.get(), POLLOUT, 0};
        rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc == 0) throw TimeoutError("connect " + ep.to_string() + ": timed out");
        int so_error = 0;
        socklen_t len = sizeof so_error;
        ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &so_error, &len);
        if (so_error != 0) {
            errno = so_error;
            throw NetError(errno_text("connect " + ep.to_string()));
        }
    }
    ::fcntl(fd.get(), F_SETFL, flags);
    int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return TcpStream(std::move(fd));
}

void TcpStream::write_line(std::string_view line) {
    if (!fd_.valid()) throw NetError("write on closed stream");
    std::string data(line);
    data += '\n';
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd_.get(), data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetError(errno_text("send"));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> TcpStream::read_line(std::optional<std::chrono::milliseconds> timeout) {
    while (true) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (!fd_.valid()) return std::nullopt;
        if (timeout) {
            pollfd p{fd_.get(), POLLIN, 0};
            const int rc = ::poll(&p, 1, static_cast<int>(timeout->count()));
            if (rc == 0) throw TimeoutError("read timed out");
            if (rc < 0 && errno != EINTR) throw NetError(errno_text("poll"));
            if (rc < 0) continue;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_.get(), chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetError(errno_text("recv"));
        }
        if (n == 0) return std::nullopt;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void TcpStream::shutdown() {
    if (fd_.valid()) ::shutdown(fd_.get(), SHUT_RDWR);
    fd_.reset();
}

TcpListener TcpListener::bind(const Endpoint& ep, int backlog) {
    const sockaddr_in addr = resolve(ep);
    FileDescriptor fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd.valid()) throw NetError(errno_text("socket"));
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
        throw NetError(errno_text("bind " + ep.to_string()));
    if (::listen(fd.get(), backlog) != 0) throw NetError(errno_text("listen " + ep.to_string()));
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &len);
    TcpListener l;
    l.fd_ = std::move(fd);
    l.port_ = ntohs(bound.sin_port);
    return l;
}

std::optional<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) {
    if (!fd_.valid()) return std::nullopt;
    pollfd p{fd_.get(), POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) return std::nullopt;
    FileDescriptor client(::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC));
    if (!client.valid()) return std::nullopt;
    int one = 1;
    ::setsockopt(client.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return TcpStream(std::move(client));
}

}  // namespace emfa::net
