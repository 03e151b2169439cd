#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace aspui {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    bool timed_out = false;
};

/// Resolve `program` against PATH (or check it directly when it contains a
/// slash). Returns nullopt when no executable file is found.
std::optional<std::string> find_executable(std::string const &program);

/// Run `argv` with `input` on standard input, capturing both output streams.
/// The child is killed when `timeout` expires. Throws std::system_error when
/// the process cannot be started.
ProcessResult run_process(std::vector<std::string> const &argv, std::string const &input,
                          std::chrono::milliseconds timeout);

} // namespace aspui
