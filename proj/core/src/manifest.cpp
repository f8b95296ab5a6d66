#include "sfscsf/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfscsf/errors.hpp"

namespace sfs {

namespace {

int require_int(const nlohmann::json& layer, const char* key, const std::string& name) {
    if (!layer.contains(key) || !layer[key].is_number_integer()) {
        throw FormatError("layer '" + name + "': missing integer field '" + key + "'");
    }
    return layer[key].get<int>();
}

} // namespace

NetworkManifest NetworkManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open manifest " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.parent_path());
}

NetworkManifest NetworkManifest::parse(const std::string& text,
                                       const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
        throw FormatError("manifest needs a non-empty 'layers' array");
    }

    NetworkManifest manifest;
    std::set<std::string> seen;
    for (const auto& layer : doc["layers"]) {
        LayerRecord rec;
        if (!layer.contains("name") || !layer["name"].is_string()) {
            throw FormatError("every layer needs a string 'name'");
        }
        rec.name = layer["name"].get<std::string>();
        if (!seen.insert(rec.name).second) {
            throw FormatError("duplicate layer name '" + rec.name + "'");
        }
        rec.spec.M = require_int(layer, "M", rec.name);
        rec.spec.C = require_int(layer, "C", rec.name);
        rec.spec.K = require_int(layer, "K", rec.name);
        rec.spec.S = require_int(layer, "S", rec.name);
        rec.spec.W = require_int(layer, "W", rec.name);
        rec.spec.H = require_int(layer, "H", rec.name);
        rec.spec.m = require_int(layer, "m", rec.name);
        try {
            rec.spec.validate();
        } catch (const ShapeError& e) {
            throw ShapeError("layer '" + rec.name + "': " + e.what());
        }
        if (!layer.contains("weights") || !layer["weights"].is_string()) {
            throw FormatError("layer '" + rec.name + "': missing 'weights' path");
        }
        rec.weights = base_dir / layer["weights"].get<std::string>();
        if (layer.contains("codebook")) {
            rec.codebook = base_dir / layer["codebook"].get<std::string>();
        }
        if (layer.contains("bit")) {
            rec.bit = layer["bit"].get<int>();
        }
        manifest.layers.push_back(std::move(rec));
    }
    return manifest;
}

} // namespace sfs
