#include "ecoforge/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace ecoforge {

const char* step_status_name(StepStatus s) {
    switch (s) {
    case StepStatus::succeeded: return "succeeded";
    case StepStatus::failed: return "failed";
    case StepStatus::skipped: return "skipped";
    }
    return "?";
}

bool BuildOutcome::all_succeeded() const {
    for (const auto& [name, outcome] : steps) {
        if (outcome.status != StepStatus::succeeded)
            return false;
    }
    return true;
}

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string on_off(bool b) { return b ? "ON" : "OFF"; }

std::string upper_ident(const std::string& name) {
    std::string out;
    for (char c : name)
        out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct ExpandContext {
    const PackageManifest* manifest = nullptr;
    const BuildConfig* cfg = nullptr;
    std::string prefix;
    const std::map<std::string, std::string>* dep_dirs = nullptr;
};

// Expands template placeholders and remembers which ones appeared, so the
// canonical flag appender can avoid restating the same datum.
std::string expand_template(const std::string& tmpl, const ExpandContext& ctx,
                            std::vector<std::string>* seen = nullptr) {
    std::string out;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        const size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out += tmpl.substr(pos);
            break;
        }
        out += tmpl.substr(pos, open - pos);
        const size_t close = tmpl.find('}', open);
        if (close == std::string::npos)
            throw Error(ErrorKind::template_error,
                        "unterminated placeholder in template for " + ctx.manifest->name);
        const std::string token = tmpl.substr(open + 1, close - open - 1);

        if (token == "prefix") {
            out += ctx.prefix;
        } else if (token == "debug") {
            out += yes_no(ctx.cfg->debug);
        } else if (token == "64bit") {
            out += yes_no(ctx.cfg->use_64bit);
        } else if (token.rfind("dep_dir:", 0) == 0) {
            const std::string dep = token.substr(8);
            auto it = ctx.dep_dirs->find(dep);
            if (it == ctx.dep_dirs->end())
                throw Error(ErrorKind::template_error,
                            "template for " + ctx.manifest->name + " references {dep_dir:" + dep +
                                "} but " + dep + " is not a required dependency");
            out += it->second;
        } else {
            throw Error(ErrorKind::template_error, "unknown placeholder {" + token +
                                                       "} in template for " + ctx.manifest->name);
        }
        if (seen)
            seen->push_back(token);
        pos = close + 1;
    }
    return out;
}

std::string canonical_configure(const PackageManifest& m, const ExpandContext& ctx) {
    std::vector<std::string> seen;
    std::string cmd = expand_template(m.build.configure_command, ctx, &seen);
    if (m.build.system == "script")
        return cmd; // script builds carry their own option handling

    auto placeholder_used = [&](const std::string& token) {
        return std::find(seen.begin(), seen.end(), token) != seen.end();
    };
    auto append = [&](const std::string& flag) {
        if (!cmd.empty())
            cmd += " ";
        cmd += flag;
    };

    const bool cmake = m.build.system == "cmake";
    if (!placeholder_used("prefix"))
        append(cmake ? "-DCMAKE_INSTALL_PREFIX=" + ctx.prefix : "--prefix=" + ctx.prefix);
    if (!placeholder_used("debug"))
        append(cmake ? std::string("-DCMAKE_BUILD_TYPE=") + (ctx.cfg->debug ? "Debug" : "Release")
                     : "--enable-debug=" + yes_no(ctx.cfg->debug));
    append(cmake ? "-DBUILD_SHARED_LIBS=" + on_off(ctx.cfg->shared_libs)
                 : "--enable-shared=" + yes_no(ctx.cfg->shared_libs));
    if (!placeholder_used("64bit"))
        append(cmake ? "-DXSDK_ENABLE_64BIT_INDICES=" + on_off(ctx.cfg->use_64bit)
                     : "--enable-64bit-indices=" + yes_no(ctx.cfg->use_64bit));

    for (const auto& dep : m.dependencies) {
        if (dep.kind != DependencyKind::required)
            continue;
        if (placeholder_used("dep_dir:" + dep.name))
            continue;
        const std::string dir = ctx.dep_dirs->at(dep.name);
        append(cmake ? "-DTPL_" + upper_ident(dep.name) + "_DIR=" + dir
                     : "--with-" + dep.name + "-dir=" + dir);
    }
    return cmd;
}

} // namespace

BuildPlan generate_build_plan(const ResolutionResult& res, const Registry& registry,
                              const BuildConfig& cfg) {
    if (!res.solved())
        throw Error(ErrorKind::invalid_input, "build plans require a solved resolution");
    if (!cfg.prefix.is_absolute())
        throw Error(ErrorKind::invalid_input, "build prefix must be an absolute path");
    if (cfg.parallelism < 1)
        throw Error(ErrorKind::invalid_input, "parallelism must be at least 1");

    auto step_prefix = [&](const std::string& name, const Version& v) {
        return (cfg.prefix / (name + "-" + v.str())).string();
    };

    BuildPlan plan;
    plan.parallelism = cfg.parallelism;
    for (const auto& [name, version] : build_order(res)) {
        const PackageManifest& m = registry.find(name, version);

        BuildStep step;
        step.package = name;
        step.version = version;
        step.prefix = step_prefix(name, version);
        for (const auto& dep : m.dependencies) {
            if (dep.kind != DependencyKind::required)
                continue;
            step.dep_dirs[dep.name] = step_prefix(dep.name, res.assignment.at(dep.name));
            if (std::find(step.depends_on.begin(), step.depends_on.end(), dep.name) ==
                step.depends_on.end())
                step.depends_on.push_back(dep.name);
        }

        ExpandContext ctx{&m, &cfg, step.prefix, &step.dep_dirs};
        step.configure_command = canonical_configure(m, ctx);
        step.build_command = expand_template(m.build.build_command, ctx);
        step.install_command = expand_template(m.build.install_command, ctx);
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

json build_plan_to_json(const BuildPlan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) {
        steps.push_back({{"package", s.package},
                         {"version", s.version.str()},
                         {"prefix", s.prefix},
                         {"configure", s.configure_command},
                         {"build", s.build_command},
                         {"install", s.install_command},
                         {"dep_dirs", s.dep_dirs},
                         {"depends_on", s.depends_on}});
    }
    return json{{"parallelism", plan.parallelism}, {"steps", steps}};
}

namespace {

// Shared scheduling state for the worker pool.
struct Scheduler {
    const BuildPlan& plan;
    CommandExecutor& executor;
    std::optional<fs::path> workdir;

    std::mutex mutex;
    std::condition_variable cv;
    std::map<std::string, StepStatus> done; // only decided steps
    std::vector<bool> claimed;
    size_t remaining;
    size_t running = 0;

    explicit Scheduler(const BuildPlan& p, CommandExecutor& e, std::optional<fs::path> wd)
        : plan(p), executor(e), workdir(std::move(wd)), claimed(p.steps.size(), false),
          remaining(p.steps.size()) {}

    // Under lock: -1 when nothing is actionable yet.
    int next_actionable(bool& skip) const {
        for (size_t i = 0; i < plan.steps.size(); ++i) {
            if (claimed[i])
                continue;
            bool deps_ok = true;
            bool deps_blocked = false;
            for (const auto& dep : plan.steps[i].depends_on) {
                auto it = done.find(dep);
                if (it == done.end()) {
                    deps_ok = false;
                } else if (it->second != StepStatus::succeeded) {
                    deps_blocked = true;
                }
            }
            if (deps_blocked) {
                skip = true;
                return static_cast<int>(i);
            }
            if (deps_ok) {
                skip = false;
                return static_cast<int>(i);
            }
        }
        return -1;
    }
};

StepOutcome run_step(const BuildStep& step, CommandExecutor& executor,
                     const std::optional<fs::path>& workdir) {
    const fs::path cwd = workdir.value_or(fs::current_path());
    StepOutcome outcome;
    outcome.status = StepStatus::succeeded;
    for (const std::string* cmd :
         {&step.configure_command, &step.build_command, &step.install_command}) {
        if (cmd->empty())
            continue;
        CommandResult r = executor.run(step.package, *cmd, cwd);
        outcome.output += "$ " + *cmd + "\n" + r.output;
        if (!r.output.empty() && r.output.back() != '\n')
            outcome.output += "\n";
        if (r.exit_code != 0) {
            outcome.status = StepStatus::failed;
            outcome.output += "command exited with code " + std::to_string(r.exit_code) + "\n";
            break;
        }
    }
    if (workdir) {
        const fs::path log_dir = *workdir / "logs";
        fs::create_directories(log_dir);
        const fs::path log_file = log_dir / (step.package + ".log");
        std::ofstream out(log_file, std::ios::trunc);
        out << outcome.output;
        outcome.log_path = log_file.string();
    }
    return outcome;
}

} // namespace

BuildOutcome execute_plan(const BuildPlan& plan, CommandExecutor& executor,
                          const std::optional<fs::path>& workdir) {
    BuildOutcome outcome;
    if (plan.steps.empty())
        return outcome;
    if (workdir) {
        std::error_code ec;
        fs::create_directories(*workdir, ec);
        if (ec)
            throw Error(ErrorKind::io_error, "cannot create workdir " + workdir->string());
    }

    Scheduler sched(plan, executor, workdir);
    std::mutex outcome_mutex;

    auto worker = [&]() {
        std::unique_lock<std::mutex> lock(sched.mutex);
        while (sched.remaining > 0) {
            bool skip = false;
            const int idx = sched.next_actionable(skip);
            if (idx < 0) {
                if (sched.running == 0) {
                    // Unsatisfiable step dependencies (hand-built cyclic
                    // plan): nothing can ever become ready, so park the rest
                    // as skipped instead of spinning.
                    for (size_t i = 0; i < sched.claimed.size(); ++i) {
                        if (!sched.claimed[i]) {
                            sched.claimed[i] = true;
                            sched.done[plan.steps[i].package] = StepStatus::skipped;
                            --sched.remaining;
                            std::lock_guard<std::mutex> og(outcome_mutex);
                            outcome.steps[plan.steps[i].package] =
                                StepOutcome{StepStatus::skipped, "", ""};
                        }
                    }
                    sched.cv.notify_all();
                    continue;
                }
                sched.cv.wait(lock);
                continue;
            }
            sched.claimed[idx] = true;
            const BuildStep& step = plan.steps[idx];
            if (skip) {
                sched.done[step.package] = StepStatus::skipped;
                --sched.remaining;
                {
                    std::lock_guard<std::mutex> og(outcome_mutex);
                    outcome.steps[step.package] = StepOutcome{StepStatus::skipped, "", ""};
                }
                sched.cv.notify_all();
                continue;
            }

            ++sched.running;
            lock.unlock();
            StepOutcome result = run_step(step, executor, workdir);
            lock.lock();
            --sched.running;
            sched.done[step.package] = result.status;
            --sched.remaining;
            {
                std::lock_guard<std::mutex> og(outcome_mutex);
                outcome.steps[step.package] = std::move(result);
            }
            sched.cv.notify_all();
        }
        sched.cv.notify_all();
    };

    const int workers =
        std::max(1, std::min<int>(plan.parallelism, static_cast<int>(plan.steps.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int i = 0; i < workers; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return outcome;
}

std::vector<std::string> check_install_layout(const fs::path& prefix) {
    std::error_code ec;
    if (!fs::exists(prefix, ec) || !fs::is_directory(prefix, ec))
        throw Error(ErrorKind::io_error, "install prefix does not exist: " + prefix.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(prefix)) {
        if (entry.is_regular_file())
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<std::string> violations;
    for (const auto& file : files) {
        const fs::path rel = fs::relative(file, prefix);
        const std::string top = rel.begin()->string();
        const std::string ext = file.extension().string();
        const std::string name = file.filename().string();

        const bool is_header = ext == ".h" || ext == ".hpp" || ext == ".mod";
        const bool is_library =
            name.rfind("lib", 0) == 0 && (ext == ".a" || ext == ".so" || ext == ".dylib");

        if (is_header && top != "include")
            violations.push_back("header outside include/: " + rel.generic_string());
        else if (is_library && top != "lib")
            violations.push_back("library outside lib/: " + rel.generic_string());
    }
    return violations;
}

std::vector<std::string> verify_install(const fs::path& prefix, const PackageManifest&) {
    return check_install_layout(prefix);
}

} // namespace ecoforge
