#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace droso::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct RunConfig {
    std::string command;
    std::string ref_dir;
    std::string query_dir;
    std::string model_path;
    std::size_t n_models = 64;
    std::size_t activations = 192;
    double radius_frac = 0.5;
    std::size_t tolerance = 1;
    std::size_t epochs = 100;
    double lr = 0.01;
    std::uint64_t master_seed = 1;
    std::string gt_path;
    std::string pr_out = "pr.csv";
    std::string log_out = "matches.csv";

    // synth
    std::size_t places = 50;
    double noise_sigma = 0.0;
    double brightness = 0.0;
    int shift_px = 0;

    // benchmark
    std::size_t iterations = 100;

    // sweep
    std::vector<std::size_t> grid_models{1, 8, 64};
    std::vector<std::size_t> grid_activations{64, 192};
    std::string sweep_out = "sweep.csv";
};

/// Single line that reproduces the run, e.g. "droso train --ref-dir a ...".
std::string describe(const RunConfig& cfg);

/// Parses argv and runs the selected command. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out);
int cmd_benchmark(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);

}  // namespace droso::cli
