#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfscsf/layer_spec.hpp"

namespace sfs {

struct LayerRecord {
    std::string name;
    LayerSpec spec;
    std::filesystem::path weights;                  // SFST code tensor
    std::optional<std::filesystem::path> codebook;  // SFCB file
    std::optional<int> bit;                         // fixed index width override
};

// Declarative layer list. JSON schema:
//   { "layers": [ { "name": "conv1", "M":96, "C":3, "K":11, "S":4,
//                   "W":227, "H":227, "m":96,
//                   "weights": "conv1.sfst",
//                   "codebook": "conv1.sfcb",   // optional
//                   "bit": 4 } ] }              // optional
// Relative paths resolve against the manifest's directory.
struct NetworkManifest {
    std::vector<LayerRecord> layers;

    static NetworkManifest load(const std::filesystem::path& path);
    static NetworkManifest parse(const std::string& text, const std::filesystem::path& base_dir);
};

} // namespace sfs
