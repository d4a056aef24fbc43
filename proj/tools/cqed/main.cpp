#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "config.hpp"
#include "cqed/errors.hpp"
#include "cqed/io.hpp"
#include "cqed/parallel.hpp"
#include "experiments.hpp"

namespace {

// 0 ok, 1 unexpected, 2 bad input, 3 numerical failure, 4 table check mismatch.
enum Exit { kOk = 0, kInternal = 1, kInput = 2, kNumeric = 3, kCheckFailed = 4 };

std::string compiler_version()
{
#if defined(__clang__)
    return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    return "gcc " + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
           std::to_string(__GNUC_PATCHLEVEL__);
#else
    return "unknown";
#endif
}

int run(const std::string& path, int workers, const std::string& out_override)
{
    namespace fs = std::filesystem;
    auto c = cqed::cli::load_config(path);
    if (workers > 0) c.workers = workers;
    if (c.workers <= 0) c.workers = cqed::default_workers();
    const std::string out = out_override.empty() ? c.output_dir : out_override;
    fs::create_directories(out);

    const auto t0 = std::chrono::steady_clock::now();
    const auto result = cqed::cli::run_experiment(c, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json manifest = {
        {"tool", "cqed"},
        {"version", CQED_VERSION},
        {"kind", cqed::cli::kind_name(c.kind)},
        {"name", c.name},
        {"config", fs::absolute(path).lexically_normal().string()},
        {"config_hash", cqed::cli::config_hash(path)},
        {"seed", c.seed},
        {"workers", c.workers},
        {"wall_time_s", wall},
        {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
        {"boost_version", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                              "." + std::to_string(BOOST_VERSION % 100)},
        {"compiler", compiler_version()},
        {"outputs", result.outputs},
        {"summary", result.summary},
    };
    cqed::io::write_file(out + "/manifest.json", manifest.dump(2) + "\n");
    std::cout << cqed::cli::kind_name(c.kind) << " '" << c.name << "': " << result.outputs.size() + 1
              << " files in " << out << " (" << cqed::io::format_double(wall) << " s)\n";
    if (!result.checks_passed) {
        std::cerr << "error: table check mismatch, see " << out << "/table_check.json\n";
        return kCheckFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cqed: driven transmon, Floquet scar maps and dispersive readout"};
    app.require_subcommand(1);

    std::string config;
    int workers = 0;
    std::string out;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a TOML config");
    run_cmd->add_option("config", config, "experiment config")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--workers", workers, "worker threads (default: config value or hardware)")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", out, "output directory (default: config output_dir)");

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config without running it");
    validate_cmd->add_option("config", config, "experiment config")->required()->check(CLI::ExistingFile);

    auto* version_cmd = app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*version_cmd) {
            std::cout << "cqed " << CQED_VERSION << "\n";
            return kOk;
        }
        if (*validate_cmd) {
            cqed::cli::load_config(config);
            std::cout << "ok\n";
            return kOk;
        }
        return run(config, workers, out);
    } catch (const cqed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kInput;
    } catch (const cqed::RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return kInput;
    } catch (const cqed::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "filesystem error: " << e.what() << "\n";
        return kInput;
    } catch (const cqed::FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kNumeric;
    } catch (const cqed::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
