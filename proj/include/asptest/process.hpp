#pragma once
// Child process with piped stdin/stdout/stderr and a wall-clock limit (POSIX).

#include "error.hpp"

#include <algorithm>
#include <chrono>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace asptest {

struct ProcessOutcome {
    std::string out;
    std::string err;
    int         exit_status = -1; ///< exit code, or 128+signal
    bool        timed_out   = false;
    long long   wall_ms     = 0;
};

namespace detail {

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&)            = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& o) noexcept : fd(std::exchange(o.fd, -1)) {}
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
};

inline void make_pipe(Fd& r, Fd& w) {
    int p[2];
    if (::pipe2(p, O_CLOEXEC) != 0) throw SpawnFailure(std::string("pipe: ") + std::strerror(errno));
    r.fd = p[0];
    w.fd = p[1];
}

} // namespace detail

/// Runs argv[0] (PATH lookup) with `input` on stdin. After `timeout` the whole process group is killed
/// and the output read so far is returned with timed_out set. Throws SpawnFailure when exec fails.
inline ProcessOutcome run_process(const std::vector<std::string>& argv, const std::string& input,
                                  std::chrono::milliseconds timeout) {
    using clock = std::chrono::steady_clock;
    if (argv.empty()) throw SpawnFailure("empty command line");

    detail::Fd in_r, in_w, out_r, out_w, err_r, err_w, exec_r, exec_w;
    detail::make_pipe(in_r, in_w);
    detail::make_pipe(out_r, out_w);
    detail::make_pipe(err_r, err_w);
    detail::make_pipe(exec_r, exec_w); // reports exec errno; closed by a successful exec

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    auto  start = clock::now();
    pid_t pid   = ::fork();
    if (pid < 0) throw SpawnFailure(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in_r.fd, 0);
        ::dup2(out_w.fd, 1);
        ::dup2(err_w.fd, 2);
        ::execvp(cargv[0], cargv.data());
        int e = errno;
        (void)!::write(exec_w.fd, &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    in_r.reset();
    out_w.reset();
    err_w.reset();
    exec_w.reset();

    int  exec_errno = 0;
    auto n          = ::read(exec_r.fd, &exec_errno, sizeof exec_errno);
    if (n == static_cast<ssize_t>(sizeof exec_errno)) {
        ::waitpid(pid, nullptr, 0);
        throw SpawnFailure("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
    }

    ::signal(SIGPIPE, SIG_IGN);
    ::fcntl(in_w.fd, F_SETFL, O_NONBLOCK);
    std::size_t    written = 0;
    ProcessOutcome res;
    if (input.empty()) in_w.reset();

    auto deadline = start + timeout;
    char buf[65536];
    while (out_r.fd >= 0 || err_r.fd >= 0) {
        std::vector<pollfd> fds;
        if (in_w.fd >= 0) fds.push_back({in_w.fd, POLLOUT, 0});
        if (out_r.fd >= 0) fds.push_back({out_r.fd, POLLIN, 0});
        if (err_r.fd >= 0) fds.push_back({err_r.fd, POLLIN, 0});
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
        if (left <= 0) {
            res.timed_out = true;
            break;
        }
        int rc = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(left, 1000)));
        if (rc < 0 && errno != EINTR) break;
        for (const auto& p : fds) {
            if (!p.revents) continue;
            if (p.fd == in_w.fd) {
                auto w = ::write(in_w.fd, input.data() + written, input.size() - written);
                if (w > 0) written += static_cast<std::size_t>(w);
                if (w < 0 && errno != EAGAIN) in_w.reset();
                if (written == input.size()) in_w.reset();
                continue;
            }
            auto r = ::read(p.fd, buf, sizeof buf);
            if (r > 0) (p.fd == out_r.fd ? res.out : res.err).append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || errno != EAGAIN) (p.fd == out_r.fd ? out_r : err_r).reset();
        }
    }
    in_w.reset();
    int status = 0;
    // pipes closed does not mean exited
    while (!res.timed_out && ::waitpid(pid, &status, WNOHANG) == 0) {
        if (clock::now() >= deadline) res.timed_out = true;
        else ::usleep(2000);
    }
    if (res.timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
    }
    if (WIFEXITED(status)) res.exit_status = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) res.exit_status = 128 + WTERMSIG(status);
    res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
    return res;
}

} // namespace asptest
