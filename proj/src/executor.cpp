#include "ecoforge/executor.hpp"

#include <array>
#include <cstdio>

#include <sys/wait.h>

#include "ecoforge/errors.hpp"

namespace ecoforge {

namespace {

std::string shell_quote(const std::string& text) {
    std::string quoted = "'";
    for (char c : text) {
        if (c == '\'')
            quoted += "'\\''";
        else
            quoted += c;
    }
    quoted += "'";
    return quoted;
}

} // namespace

CommandResult SystemExecutor::run(const std::string& package, const std::string& command,
                                  const std::filesystem::path& workdir) {
    const std::string full =
        "cd " + shell_quote(workdir.string()) + " && { " + command + " ; } 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe)
        throw Error(ErrorKind::execution_error,
                    "could not launch command for " + package + ": " + command);

    CommandResult result;
    std::array<char, 4096> buffer;
    size_t n;
    while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
        result.output.append(buffer.data(), n);

    const int status = ::pclose(pipe);
    if (status == -1)
        throw Error(ErrorKind::execution_error,
                    "could not reap command for " + package + ": " + command);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    return result;
}

CommandResult RecordingExecutor::run(const std::string& package, const std::string& command,
                                     const std::filesystem::path& workdir) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_.push_back({package, command, workdir.string(), next_sequence_++});
    CommandResult result;
    result.exit_code = exit_code_for_ ? exit_code_for_(package) : 0;
    return result;
}

std::vector<RecordingExecutor::Record> RecordingExecutor::records() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
}

} // namespace ecoforge
