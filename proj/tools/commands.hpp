#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairrank::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kRuntimeError = 2,
};

struct CalibrateArgs {
    double p_stronger = 0.75;
    double p_discr = 0.75;
    std::size_t pairs = 1'000'000; // Monte-Carlo round-trip sample
    std::uint64_t seed = 0;
};

struct SimulateArgs {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
};

struct RecoverArgs {
    std::filesystem::path nodes;
    std::filesystem::path edges;
    std::string method;
    std::string postprocess = "none"; // none, fair or epira
    double p = 0.6;
    double alpha = 0.1;
    std::string on_exhausted = "fail";
    double bnd = 0.9;
    std::uint64_t seed = 0;
    std::filesystem::path out;
};

struct PlotArgs {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out;
};

// Each command reports to `out` and throws fairrank errors on failure.
void cmd_calibrate(const CalibrateArgs& args, std::ostream& out);
void cmd_simulate(const SimulateArgs& args, std::ostream& out);
void cmd_recover(const RecoverArgs& args, std::ostream& out);
void cmd_plot(const PlotArgs& args, std::ostream& out);

/// Parses argv, runs the command and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fairrank::cli
