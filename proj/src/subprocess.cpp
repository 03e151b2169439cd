#include <aspui/subprocess.hpp>

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <system_error>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace aspui {

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd const &) = delete;
    Fd &operator=(Fd const &) = delete;
    Fd(Fd &&other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd &operator=(Fd &&other) noexcept {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_ = -1;
};

struct Pipe {
    Fd read;
    Fd write;
};

Pipe make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
        throw std::system_error(errno, std::generic_category(), "pipe");
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

bool is_executable_file(std::string const &path) {
    struct stat st {};
    return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(path.c_str(), X_OK) == 0;
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

} // namespace

std::optional<std::string> find_executable(std::string const &program) {
    if (program.empty()) {
        return std::nullopt;
    }
    if (program.find('/') != std::string::npos) {
        return is_executable_file(program) ? std::optional<std::string>(program) : std::nullopt;
    }
    char const *path = std::getenv("PATH");
    std::string dirs = path != nullptr ? path : "/usr/local/bin:/usr/bin:/bin";
    std::size_t start = 0;
    while (start <= dirs.size()) {
        std::size_t end = dirs.find(':', start);
        if (end == std::string::npos) {
            end = dirs.size();
        }
        std::string dir = dirs.substr(start, end - start);
        std::string candidate = (dir.empty() ? std::string(".") : dir) + "/" + program;
        if (is_executable_file(candidate)) {
            return candidate;
        }
        start = end + 1;
    }
    return std::nullopt;
}

ProcessResult run_process(std::vector<std::string> const &argv, std::string const &input,
                          std::chrono::milliseconds timeout) {
    if (argv.empty()) {
        throw std::invalid_argument("run_process: empty argv");
    }
    Pipe in = make_pipe();
    Pipe out = make_pipe();
    Pipe err = make_pipe();
    // reports exec failures from the child; closed on successful exec
    Pipe status = make_pipe();

    std::vector<char *> args;
    args.reserve(argv.size() + 1);
    for (auto const &a : argv) {
        args.push_back(const_cast<char *>(a.c_str()));
    }
    args.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) {
        throw std::system_error(errno, std::generic_category(), "fork");
    }
    if (pid == 0) {
        ::dup2(in.read.get(), STDIN_FILENO);
        ::dup2(out.write.get(), STDOUT_FILENO);
        ::dup2(err.write.get(), STDERR_FILENO);
        ::execvp(args[0], args.data());
        int e = errno;
        [[maybe_unused]] auto n = ::write(status.write.get(), &e, sizeof e);
        ::_exit(127);
    }
    in.read.reset();
    out.write.reset();
    err.write.reset();
    status.write.reset();

    int exec_errno = 0;
    if (::read(status.read.get(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        ::waitpid(pid, nullptr, 0);
        throw std::system_error(exec_errno, std::generic_category(), "exec " + argv[0]);
    }

    ::signal(SIGPIPE, SIG_IGN);
    set_nonblocking(in.write.get());
    ProcessResult result;
    std::size_t written = 0;
    if (input.empty()) {
        in.write.reset();
    }
    auto deadline = std::chrono::steady_clock::now() + timeout;
    char buffer[65536];

    while (out.read || err.read) {
        std::vector<pollfd> fds;
        if (in.write) {
            fds.push_back({in.write.get(), POLLOUT, 0});
        }
        if (out.read) {
            fds.push_back({out.read.get(), POLLIN, 0});
        }
        if (err.read) {
            fds.push_back({err.read.get(), POLLIN, 0});
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            result.timed_out = true;
            break;
        }
        int rc = ::poll(fds.data(), fds.size(), static_cast<int>(remaining.count()));
        if (rc < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw std::system_error(errno, std::generic_category(), "poll");
        }
        for (auto const &p : fds) {
            if (p.revents == 0) {
                continue;
            }
            if (in.write && p.fd == in.write.get()) {
                ssize_t n = ::write(p.fd, input.data() + written, input.size() - written);
                if (n > 0) {
                    written += static_cast<std::size_t>(n);
                }
                if ((n < 0 && errno != EAGAIN) || written == input.size()) {
                    in.write.reset();
                }
                continue;
            }
            Fd &source = (out.read && p.fd == out.read.get()) ? out.read : err.read;
            std::string &sink = (&source == &out.read) ? result.out : result.err;
            ssize_t n = ::read(p.fd, buffer, sizeof buffer);
            if (n > 0) {
                sink.append(buffer, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EAGAIN) {
                source.reset();
            }
        }
    }

    if (result.timed_out) {
        ::kill(pid, SIGKILL);
    }
    int wstatus = 0;
    while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(wstatus)) {
        result.exit_code = WEXITSTATUS(wstatus);
    } else if (WIFSIGNALED(wstatus)) {
        result.exit_code = 128 + WTERMSIG(wstatus);
    }
    return result;
}

} // namespace aspui
