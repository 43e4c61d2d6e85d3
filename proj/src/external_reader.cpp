#include "kx/external_reader.h"

#include "kx/error.h"
#include "kx/protocol.h"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <chrono>
#include <fcntl.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <unordered_map>

extern char** environ;

namespace kx::reader {

struct ExternalReader::Impl {
    int to_peer = -1;
    int from_peer = -1;
    pid_t pid = -1;
    std::string buffer;
    std::uint64_t next_id = 1;
    bool broken = false;

    ~Impl() {
        close_fd(to_peer);
        close_fd(from_peer);
        if (pid > 0) {
            int status = 0;
            // Give the peer a moment to exit on EOF, then insist.
            for (int i = 0; i < 50; ++i) {
                if (::waitpid(pid, &status, WNOHANG) != 0) {
                    return;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(10));
            }
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
        }
    }

    static void close_fd(int& fd) {
        if (fd >= 0) {
            ::close(fd);
            fd = -1;
        }
    }

    void kill_peer() {
        broken = true;
        if (pid > 0) {
            ::kill(pid, SIGKILL);
        } else if (from_peer >= 0) {
            ::shutdown(from_peer, SHUT_RDWR);
        }
    }

    // false on EOF or error.
    bool read_line(std::string& line) {
        while (true) {
            const auto nl = buffer.find('\n');
            if (nl != std::string::npos) {
                line.assign(buffer, 0, nl);
                buffer.erase(0, nl + 1);
                return true;
            }
            char chunk[65536];
            const ssize_t n = ::read(from_peer, chunk, sizeof chunk);
            if (n > 0) {
                buffer.append(chunk, static_cast<std::size_t>(n));
            } else if (n < 0 && errno == EINTR) {
                continue;
            } else {
                return false;
            }
        }
    }

    bool write_all(std::string_view data) {
        while (!data.empty()) {
            const ssize_t n = ::write(to_peer, data.data(), data.size());
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                return false;
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }
};

namespace {

void ignore_sigpipe() {
    static const bool once = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

}  // namespace

ExternalReader::ExternalReader(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ExternalReader::~ExternalReader() = default;

std::unique_ptr<ExternalReader> ExternalReader::spawn(const std::string& command) {
    ignore_sigpipe();
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw ReaderUnavailable(std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw ReaderUnavailable(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw ReaderUnavailable("cannot spawn reader '" + command + "': " + std::strerror(rc));
    }
    auto impl = std::make_unique<Impl>();
    impl->to_peer = in_pipe[1];
    impl->from_peer = out_pipe[0];
    impl->pid = pid;
    return std::unique_ptr<ExternalReader>(new ExternalReader(std::move(impl)));
}

std::unique_ptr<ExternalReader> ExternalReader::connect_unix(const std::string& socket_path) {
    ignore_sigpipe();
    const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) {
        throw ReaderUnavailable(std::string("socket: ") + std::strerror(errno));
    }
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (socket_path.size() >= sizeof addr.sun_path) {
        ::close(fd);
        throw ReaderUnavailable("socket path too long: " + socket_path);
    }
    std::memcpy(addr.sun_path, socket_path.c_str(), socket_path.size() + 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string reason = std::strerror(errno);
        ::close(fd);
        throw ReaderUnavailable("cannot connect to " + socket_path + ": " + reason);
    }
    auto impl = std::make_unique<Impl>();
    impl->from_peer = fd;
    impl->to_peer = ::dup(fd);
    return std::unique_ptr<ExternalReader>(new ExternalReader(std::move(impl)));
}

SpanPrediction ExternalReader::read_span(std::string_view question, std::string_view context) {
    const Query q{std::string(question), std::string(context)};
    return read_batch(std::span<const Query>(&q, 1)).front();
}

std::vector<SpanPrediction> ExternalReader::read_batch(std::span<const Query> queries) {
    auto& io = *impl_;
    if (io.broken) {
        throw ReaderUnavailable("reader connection is no longer usable");
    }
    for (const auto& q : queries) {
        check_query(q.question, q.context);
    }

    std::unordered_map<std::string, std::size_t> pending;
    std::string payload;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto id = std::to_string(io.next_id++);
        payload += protocol::encode_request({id, queries[i].question, queries[i].context});
        payload += '\n';
        pending.emplace(std::move(id), i);
    }

    // Write on a separate thread so a peer that answers while we are still
    // sending cannot deadlock on full pipes.
    bool write_ok = true;
    std::thread writer([&] { write_ok = io.write_all(payload); });

    std::vector<std::optional<SpanPrediction>> results(queries.size());
    std::size_t received = 0;
    std::string line;
    try {
        while (received < queries.size()) {
            if (!io.read_line(line)) {
                throw ReaderUnavailable("reader closed the connection with " +
                                        std::to_string(queries.size() - received) + " responses outstanding");
            }
            if (line.empty()) {
                continue;
            }
            auto response = protocol::decode_response(line);
            const auto it = pending.find(response.id);
            if (it == pending.end()) {
                throw MalformedResponse("response for unknown or already answered id '" + response.id + "'");
            }
            validate_prediction(response.prediction, queries[it->second].context);
            results[it->second] = std::move(response.prediction);
            pending.erase(it);
            ++received;
        }
    } catch (...) {
        io.kill_peer();
        writer.join();
        throw;
    }
    writer.join();
    if (!write_ok) {
        io.broken = true;
        throw ReaderUnavailable("failed writing requests to reader");
    }

    std::vector<SpanPrediction> out;
    out.reserve(results.size());
    for (auto& r : results) {
        out.push_back(std::move(*r));
    }
    return out;
}

}  // namespace kx::reader
