#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace ecoforge {

struct CommandResult {
    int exit_code = 0;
    std::string output;
};

/// Pluggable command runner. Implementations must be safe to invoke from
/// concurrent workers. Failure to launch is an Error{execution_error};
/// a command that runs and exits nonzero is a result, not an error.
class CommandExecutor {
public:
    virtual ~CommandExecutor() = default;
    virtual CommandResult run(const std::string& package, const std::string& command,
                              const std::filesystem::path& workdir) = 0;
};

/// Runs commands through the system shell, capturing combined output.
class SystemExecutor final : public CommandExecutor {
public:
    CommandResult run(const std::string& package, const std::string& command,
                      const std::filesystem::path& workdir) override;
};

/// Records commands without side effects. Exit codes come from an injectable
/// hook, so tests can fail selected packages.
class RecordingExecutor final : public CommandExecutor {
public:
    struct Record {
        std::string package;
        std::string command;
        std::string workdir;
        unsigned long sequence = 0; // global invocation order
    };

    RecordingExecutor() = default;
    explicit RecordingExecutor(std::function<int(const std::string& package)> exit_code_for)
        : exit_code_for_(std::move(exit_code_for)) {}

    CommandResult run(const std::string& package, const std::string& command,
                      const std::filesystem::path& workdir) override;

    std::vector<Record> records() const;

private:
    mutable std::mutex mutex_;
    std::vector<Record> records_;
    unsigned long next_sequence_ = 0;
    std::function<int(const std::string&)> exit_code_for_;
};

} // namespace ecoforge
