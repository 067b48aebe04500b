#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nss/experiments.hpp"
#include "nss/schemes.hpp"

// Configuration parsing, checkpoint/trace persistence and CSV emission.
// Config files are line-oriented `key = value` text with [section] headers;
// checkpoints are little-endian binary with a trailing FNV-1a checksum.
// All writes go through a temp-then-rename path.

namespace nss {

enum class ExperimentKind { Coarsening, Convergence };

struct RunConfig {
    ExperimentKind kind = ExperimentKind::Coarsening;
    ModelParams model;
    int N = 128;
    double L = 1.0;
    std::vector<ScheduleSegment> schedule;
    // initial data
    std::string init_kind = "random";  // random | zero
    std::uint64_t seed = 1;
    double amplitude = 0.05;
    bool smooth_init = false;
    StartupPolicy startup = StartupPolicy::CopyInitial;
    // sampling / output
    double sample_interval = 1.0;
    double checkpoint_interval = 0.0;  // 0 disables periodic checkpoints
    std::string output_dir = ".";
    // convergence study settings
    std::vector<int> conv_Ns;
    double conv_cfl = 0.5;
    double conv_T = 1.0;
};

// Throws std::runtime_error with file/line context on parse errors, unknown
// keys, or invariant violations (e.g. non-increasing schedule t_end).
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& cfg, const std::filesystem::path& path);

CoarseningConfig coarsening_config(const RunConfig& cfg);
ConvergenceConfig convergence_config(const RunConfig& cfg);

void write_checkpoint(const SchemeState& state, const RunConfig& cfg,
                      const std::filesystem::path& path);

// Validates magic, version and checksum, then checks grid and model
// parameters against cfg before restoring. Throws on any mismatch.
SchemeState read_checkpoint(const std::filesystem::path& path,
                            const RunConfig& cfg, const SpectralGrid& grid);

void write_trace_csv(const CoarseningTrace& trace,
                     const std::filesystem::path& path);
CoarseningTrace read_trace_csv(const std::filesystem::path& path);

void write_convergence_csv(const ConvergenceResult& result,
                           const std::filesystem::path& path);

int cli(int argc, char** argv);

}  // namespace nss
