// sweepsim: simulate sweeping processes, reflected SDEs, and disk crowds
// from JSON scenario files, with deterministic seeded outputs.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sweeping/acceptance.hpp"
#include "sweeping/runner.hpp"
#include "sweeping/version.hpp"

namespace {

struct CommonFlags {
    std::string scenario;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t paths = 0;
    bool paths_set = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("scenario", flags.scenario, "scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", flags.out_dir, "output directory");
    cmd->add_option("--override", flags.overrides, "key=value config override (repeatable)");
    cmd->add_option("--seed", flags.seed, "override the scenario seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--paths", flags.paths, "override the Monte Carlo path count")
        ->each([&flags](const std::string&) { flags.paths_set = true; });
    cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

sweeping::RunOptions to_options(const CommonFlags& flags) {
    sweeping::RunOptions opts;
    if (!flags.out_dir.empty()) {
        opts.out_dir = flags.out_dir;
    } else if (const char* env = std::getenv("SWEEPSIM_OUT_DIR")) {
        opts.out_dir = env;
    }
    if (flags.seed_set) opts.seed = flags.seed;
    if (flags.paths_set) opts.paths = flags.paths;
    opts.quiet = flags.quiet;
    for (const auto& ov : flags.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--override", "expected key=value, got \"" + ov + "\"");
        }
        opts.overrides.emplace_back(ov.substr(0, eq), ov.substr(eq + 1));
    }
    return opts;
}

int execute(const std::string& command, const CommonFlags& flags) {
    const auto result = sweeping::run_scenario_file(command, flags.scenario, to_options(flags));
    if (!flags.quiet) {
        for (const auto& name : result.outputs) std::printf("wrote %s\n", name.c_str());
        if (!result.error.empty()) std::fprintf(stderr, "error: %s\n", result.error.c_str());
    }
    return static_cast<int>(result.code);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(sweeping::kToolName) + " " + sweeping::kToolVersion +
                 " — sweeping process and reflected SDE simulator"};
    app.set_version_flag("--version",
                         std::string(sweeping::kToolName) + " " + sweeping::kToolVersion);
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags, geo_flags;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its outputs");
    add_common(run_cmd, run_flags);
    auto* sweep_cmd =
        app.add_subcommand("sweep", "produce a stability or convergence table");
    add_common(sweep_cmd, sweep_flags);
    auto* geo_cmd = app.add_subcommand("geometry-check", "probe set certificates");
    add_common(geo_cmd, geo_flags);

    auto* selftest_cmd = app.add_subcommand("self-test", "run the acceptance suite");
    int criterion = -1;
    bool selftest_quiet = false;
    selftest_cmd->add_option("--criterion", criterion, "run a single criterion (1..12)");
    selftest_cmd->add_flag("--quiet", selftest_quiet, "only print the summary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return execute("run", run_flags);
        if (sweep_cmd->parsed()) return execute("sweep", sweep_flags);
        if (geo_cmd->parsed()) return execute("geometry-check", geo_flags);

        int failures = 0;
        auto report = [&](const sweeping::acceptance::CriterionResult& r) {
            if (!selftest_quiet || !r.passed)
                std::printf("%s  criterion %2d: %s — %s (%.2fs)\n", r.passed ? "PASS" : "FAIL",
                            r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
            std::fflush(stdout);
            if (!r.passed) ++failures;
        };
        if (criterion > 0) {
            report(sweeping::acceptance::run_criterion(criterion));
        } else {
            for (int id = 1; id <= 12; ++id) report(sweeping::acceptance::run_criterion(id));
        }
        std::printf("%d/%d criteria passed\n", (criterion > 0 ? 1 : 12) - failures,
                    criterion > 0 ? 1 : 12);
        return failures == 0 ? 0 : 1;
    } catch (const sweeping::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
