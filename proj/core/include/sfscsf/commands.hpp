#pragma once

// Library-side implementation of the CLI subcommands. Each command loads a
// manifest, drives the codec/flow/simulator modules, and produces both a
// structured JSON report and an aligned plain-text rendering. All numbers in
// a report are recomputed from module outputs; floats are fixed to 7
// significant digits so identical inputs give byte-identical reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfscsf/dense_conv.hpp"

namespace sfs {

struct CommandOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;                 // encode/decode artifacts
    std::optional<int> bit;                        // fixed index width; empty = auto
    std::optional<std::filesystem::path> input;    // input tensor (verify/simulate)
    ArithMode mode = ArithMode::Integer;
    std::uint64_t seed = 0;                        // synthetic input generation
    std::vector<int> batch_sizes;                  // sweep candidates
};

struct CommandOutput {
    std::string json; // pretty-printed, stable key order
    std::string text; // aligned table rendering
    bool ok = true;   // false = verification mismatch (CLI exit 1)
};

CommandOutput cmd_encode(const CommandOptions& options);
CommandOutput cmd_decode(const CommandOptions& options);
CommandOutput cmd_verify(const CommandOptions& options);
CommandOutput cmd_stats(const CommandOptions& options);
CommandOutput cmd_simulate(const CommandOptions& options);
CommandOutput cmd_sweep(const CommandOptions& options);

// Synthetic fixture generator: writes a manifest plus SFST/SFCB files for a
// small random network into out_dir.
struct GenOptions {
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    int wbit = 4;
    double sparsity = 0.75; // fraction of zero weights
    int layers = 2;
};

CommandOutput cmd_gen(const GenOptions& options);

// Deterministic per-layer synthetic input used by verify/simulate when no
// input tensor is supplied. Integer mode draws small integer activations.
FeatureMap synth_input(const LayerSpec& spec, std::uint64_t seed, ArithMode mode);

// CSF group file naming used by encode/decode/verify/simulate.
std::filesystem::path csf_group_path(const std::filesystem::path& dir, const std::string& layer,
                                     int group);

} // namespace sfs
