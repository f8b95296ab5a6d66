#include "sfscsf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sfscsf/arch_sim.hpp"
#include "sfscsf/csf.hpp"
#include "sfscsf/manifest.hpp"
#include "sfscsf/sfs_flow.hpp"
#include "sfscsf/stats.hpp"
#include "sfscsf/tensor_io.hpp"

namespace sfs {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kBaselineBit = 4; // fixed-width reference for "improvement"

// Pin floats to 7 significant digits so reports are byte-stable.
double round7(double v) {
    if (!std::isfinite(v)) {
        return v;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return std::strtod(buf, nullptr);
}

std::string fmt7(double v) {
    if (!std::isfinite(v)) {
        return "n/a";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return buf;
}

ordered_json json_ratio(double v) {
    // nlohmann renders non-finite values as null, which is what we want.
    return round7(v);
}

std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i) {
        widths[i] = headers[i].size();
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out << "  ";
            }
            // first column left-aligned, the rest right-aligned
            if (i == 0) {
                out << row[i] << std::string(widths[i] - row[i].size(), ' ');
            } else {
                out << std::string(widths[i] - row[i].size(), ' ') << row[i];
            }
        }
        out << '\n';
    };
    emit(headers);
    std::size_t total = 0;
    for (auto w : widths) {
        total += w;
    }
    out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
    for (const auto& row : rows) {
        emit(row);
    }
    return out.str();
}

struct LoadedLayer {
    LayerRecord rec;
    FilterBank bank; // quantization codes
    int wbit = 0;
    std::optional<QuantCodebook> codebook;
};

LoadedLayer load_layer(const LayerRecord& rec) {
    try {
        LoadedLayer layer;
        layer.rec = rec;
        const Tensor t = load_tensor_file(rec.weights);
        if (t.dtype() != DType::Code) {
            throw FormatError("weights must be a code tensor (SFST dtype 1)");
        }
        layer.wbit = t.wbit();
        layer.bank = filter_bank_from_tensor(t, rec.spec);
        if (rec.codebook) {
            layer.codebook = load_codebook_file(*rec.codebook);
            if (layer.codebook->wbit != layer.wbit) {
                throw FormatError("codebook wbit " + std::to_string(layer.codebook->wbit) +
                                  " does not match weights wbit " + std::to_string(layer.wbit));
            }
        }
        return layer;
    } catch (const Error& e) {
        throw FormatError("layer '" + rec.name + "': " + e.what());
    }
}

struct LayerStats {
    ZeroRunHistogram zero_runs;
    ZeroRunHistogram nonzero_runs;
    std::uint64_t nonzeros = 0;
    std::uint64_t zeros = 0;
    std::vector<ColumnSequence> sequences; // one per group
};

LayerStats gather_stats(const LoadedLayer& layer) {
    LayerStats s;
    for (const auto& group : group_filters(layer.bank, layer.rec.spec.m)) {
        auto seq = flatten_columns(reshape_group(group));
        s.zero_runs.merge(zero_run_hist(seq));
        s.nonzero_runs.merge(nonzero_run_hist(seq));
        for (auto code : seq.codes) {
            code == 0 ? ++s.zeros : ++s.nonzeros;
        }
        s.sequences.push_back(std::move(seq));
    }
    return s;
}

struct BitChoice {
    int bit = kBaselineBit;
    const char* source = "auto";
};

BitChoice choose_bit(const LoadedLayer& layer, const std::optional<int>& flag_bit,
                     const LayerStats& stats) {
    if (layer.rec.bit) {
        return {*layer.rec.bit, "manifest"};
    }
    if (flag_bit) {
        return {*flag_bit, "flag"};
    }
    return {optimize_bits(stats.zero_runs, stats.nonzeros, layer.wbit).bit, "auto"};
}

std::vector<CsfBlock> encode_layer(const LoadedLayer& layer, const LayerStats& stats, int bit) {
    std::vector<CsfBlock> blocks;
    blocks.reserve(stats.sequences.size());
    const QuantCodebook* cb = layer.codebook ? &*layer.codebook : nullptr;
    for (const auto& seq : stats.sequences) {
        blocks.push_back(encode(seq, bit, layer.wbit, cb));
    }
    return blocks;
}

// Reads previously written group files when all of them exist.
std::optional<std::vector<CsfBlock>> blocks_from_dir(const std::filesystem::path& dir,
                                                     const std::string& name, int groups) {
    if (dir.empty()) {
        return std::nullopt;
    }
    std::vector<CsfBlock> blocks;
    blocks.reserve(groups);
    for (int n = 0; n < groups; ++n) {
        const auto path = csf_group_path(dir, name, n);
        if (!std::filesystem::exists(path)) {
            return std::nullopt;
        }
        blocks.push_back(deserialize(read_binary_file(path)));
    }
    return blocks;
}

FilterBank bank_from_blocks(const LayerSpec& spec, const std::vector<CsfBlock>& blocks) {
    FilterBank bank;
    bank.spec = spec;
    bank.values.reserve(static_cast<std::size_t>(spec.M) * spec.C * spec.K * spec.K);
    for (std::size_t n = 0; n < blocks.size(); ++n) {
        const auto seq = decode(blocks[n], blocks[n].total_len());
        const auto group =
            unreshape_group(unflatten_columns(seq, spec.C, spec.K, static_cast<int>(n)));
        bank.values.insert(bank.values.end(), group.values.begin(), group.values.end());
    }
    bank.validate();
    return bank;
}

FeatureMap layer_input(const LoadedLayer& layer, const CommandOptions& options,
                       std::size_t layer_index) {
    if (options.input) {
        const FeatureMap input = feature_map_from_tensor(load_tensor_file(*options.input));
        if (input.channels != layer.rec.spec.C || input.height != layer.rec.spec.H ||
            input.width != layer.rec.spec.W) {
            throw ShapeError("layer '" + layer.rec.name + "': input tensor is " +
                             std::to_string(input.channels) + "x" + std::to_string(input.height) +
                             "x" + std::to_string(input.width) + ", layer expects " +
                             std::to_string(layer.rec.spec.C) + "x" +
                             std::to_string(layer.rec.spec.H) + "x" +
                             std::to_string(layer.rec.spec.W));
        }
        return input;
    }
    return synth_input(layer.rec.spec, options.seed + layer_index, options.mode);
}

FilterBank conv_weights(const LoadedLayer& layer, const FilterBank& codes, ArithMode mode) {
    if (mode == ArithMode::Real) {
        if (!layer.codebook) {
            throw FormatError("layer '" + layer.rec.name +
                              "': real mode needs a codebook to dequantize weights");
        }
        return dequantize_bank(codes, *layer.codebook);
    }
    return codes; // integer mode treats the codes themselves as weights
}

struct Mismatch {
    int channel = 0, y = 0, x = 0;
    double want = 0.0, got = 0.0;
};

std::optional<Mismatch> compare_maps(const FeatureMap& want, const FeatureMap& got,
                                     ArithMode mode, double rel_tol = 1e-5) {
    if (want.channels != got.channels || want.height != got.height || want.width != got.width) {
        throw ShapeError("compared feature maps disagree on shape");
    }
    for (int ch = 0; ch < want.channels; ++ch) {
        for (int y = 0; y < want.height; ++y) {
            for (int x = 0; x < want.width; ++x) {
                const double a = want.at(ch, y, x);
                const double b = got.at(ch, y, x);
                const bool ok = mode == ArithMode::Integer
                                    ? a == b
                                    : std::abs(a - b) <=
                                          rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
                if (!ok) {
                    return Mismatch{ch, y, x, a, b};
                }
            }
        }
    }
    return std::nullopt;
}

ordered_json counters_json(const SimCounters& c) {
    ordered_json j;
    j["total_macs"] = c.total_macs;
    j["nz_macs"] = c.nz_macs;
    j["csf_macs"] = c.csf_macs;
    j["csf_lookups"] = c.csf_lookups;
    j["baseline_lookups"] = c.baseline_lookups;
    j["feature_loads"] = c.feature_loads;
    j["filter_loads"] = c.filter_loads;
    return j;
}

ordered_json layer_report_json(const LayerReport& r) {
    ordered_json j;
    j["counters"] = counters_json(r.counters);
    j["util_dense"] = json_ratio(r.util_dense);
    j["util_csf"] = json_ratio(r.util_csf);
    j["speedup"] = json_ratio(r.speedup);
    j["lookup_ratio"] = json_ratio(r.lookup_ratio);
    return j;
}

ordered_json hist_json(const ZeroRunHistogram& h) {
    ordered_json j = ordered_json::object();
    for (const auto& [len, count] : h.counts) {
        j[std::to_string(len)] = count;
    }
    return j;
}

std::string hist_text(const ZeroRunHistogram& h, const std::string& title) {
    std::ostringstream out;
    out << title << (h.counts.empty() ? " (empty)" : "") << '\n';
    std::uint64_t peak = 0;
    for (const auto& [len, count] : h.counts) {
        peak = std::max(peak, count);
    }
    for (const auto& [len, count] : h.counts) {
        const int bar = peak == 0 ? 0 : static_cast<int>((count * 40 + peak - 1) / peak);
        out << "  " << std::setw(6) << len << " | " << std::setw(10) << count << " "
            << std::string(bar, '#') << '\n';
    }
    return out.str();
}

CommandOutput finish(ordered_json doc, std::string text, bool ok = true) {
    CommandOutput out;
    out.json = doc.dump(2) + "\n";
    out.text = std::move(text);
    out.ok = ok;
    return out;
}

} // namespace

std::filesystem::path csf_group_path(const std::filesystem::path& dir, const std::string& layer,
                                     int group) {
    return dir / (layer + "_g" + std::to_string(group) + ".csf");
}

FeatureMap synth_input(const LayerSpec& spec, std::uint64_t seed, ArithMode mode) {
    std::mt19937_64 rng(seed);
    FeatureMap f = FeatureMap::zeros(spec.C, spec.H, spec.W);
    if (mode == ArithMode::Integer) {
        std::uniform_int_distribution<int> dist(0, 9);
        for (auto& v : f.values) {
            v = static_cast<double>(dist(rng));
        }
    } else {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& v : f.values) {
            v = dist(rng);
        }
    }
    return f;
}

CommandOutput cmd_encode(const CommandOptions& options) {
    const auto manifest = NetworkManifest::load(options.manifest);
    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
    }

    ordered_json doc;
    doc["command"] = "encode";
    doc["layers"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;

    std::uint64_t net_nonzeros = 0;
    std::uint64_t net_extra = 0;
    std::uint64_t net_baseline_extra = 0;

    for (const auto& rec : manifest.layers) {
        const LoadedLayer layer = load_layer(rec);
        const LayerStats stats = gather_stats(layer);
        const BitChoice choice = choose_bit(layer, options.bit, stats);
        const auto blocks = encode_layer(layer, stats, choice.bit);

        std::uint64_t padding = 0;
        std::uint64_t entries = 0;
        ordered_json files = ordered_json::array();
        for (std::size_t n = 0; n < blocks.size(); ++n) {
            padding += blocks[n].padding_count();
            entries += blocks[n].entries.size();
            if (!options.out_dir.empty()) {
                const auto path = csf_group_path(options.out_dir, rec.name, static_cast<int>(n));
                const QuantCodebook* cb = layer.codebook ? &*layer.codebook : nullptr;
                write_binary_file(path, serialize(blocks[n], cb));
                files.push_back(path.filename().string());
            }
        }

        const std::uint64_t extra = extra_space(stats.nonzeros, choice.bit, padding, layer.wbit);
        const std::uint64_t baseline_padding = predicted_padding(stats.zero_runs, kBaselineBit);
        const std::uint64_t baseline_extra =
            extra_space(stats.nonzeros, kBaselineBit, baseline_padding, layer.wbit);
        const double improvement =
            extra == 0 ? 1.0 : static_cast<double>(baseline_extra) / static_cast<double>(extra);

        net_nonzeros += stats.nonzeros;
        net_extra += extra;
        net_baseline_extra += baseline_extra;

        ordered_json lj;
        lj["name"] = rec.name;
        lj["wbit"] = layer.wbit;
        lj["nonzeros"] = stats.nonzeros;
        lj["bit"] = choice.bit;
        lj["bit_source"] = choice.source;
        lj["padding"] = padding;
        lj["entries"] = entries;
        lj["extra_space_bits"] = extra;
        lj["baseline_bit"] = kBaselineBit;
        lj["baseline_extra_space_bits"] = baseline_extra;
        lj["improvement"] = json_ratio(improvement);
        lj["payload_bits"] = entries * static_cast<std::uint64_t>(choice.bit + layer.wbit);
        lj["groups"] = blocks.size();
        if (!files.empty()) {
            lj["files"] = files;
        }
        doc["layers"].push_back(lj);

        rows.push_back({rec.name, std::to_string(stats.nonzeros), std::to_string(choice.bit),
                        std::to_string(padding), std::to_string(extra),
                        std::to_string(baseline_extra), fmt7(improvement)});
    }

    const double net_improvement = net_extra == 0 ? 1.0
                                                  : static_cast<double>(net_baseline_extra) /
                                                        static_cast<double>(net_extra);
    ordered_json net;
    net["nonzeros"] = net_nonzeros;
    net["extra_space_bits"] = net_extra;
    net["baseline_extra_space_bits"] = net_baseline_extra;
    net["improvement"] = json_ratio(net_improvement);
    doc["network"] = net;

    rows.push_back({"total", std::to_string(net_nonzeros), "", "", std::to_string(net_extra),
                    std::to_string(net_baseline_extra), fmt7(net_improvement)});
    const std::string text =
        render_table({"layer", "nonzeros", "bit", "padding", "extra(bits)",
                      "extra@4bit(bits)", "improvement"},
                     rows);
    return finish(std::move(doc), text);
}

CommandOutput cmd_decode(const CommandOptions& options) {
    const auto manifest = NetworkManifest::load(options.manifest);
    ordered_json doc;
    doc["command"] = "decode";
    doc["layers"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;

    for (const auto& rec : manifest.layers) {
        const OutputDims dims = derive_dims(rec.spec);
        auto blocks = blocks_from_dir(options.out_dir, rec.name, dims.groups);
        if (!blocks) {
            throw FormatError("layer '" + rec.name + "': missing CSF group files under " +
                              options.out_dir.string());
        }
        const FilterBank bank = bank_from_blocks(rec.spec, *blocks);
        const int wbit = blocks->front().wbit;
        const auto out_path = options.out_dir / (rec.name + ".decoded.sfst");
        save_tensor_file(tensor_from_filter_bank(bank, DType::Code, wbit), out_path);

        std::uint64_t entries = 0;
        for (const auto& b : *blocks) {
            entries += b.entries.size();
        }
        ordered_json lj;
        lj["name"] = rec.name;
        lj["groups"] = blocks->size();
        lj["entries"] = entries;
        lj["output"] = out_path.filename().string();
        doc["layers"].push_back(lj);
        rows.push_back({rec.name, std::to_string(blocks->size()), std::to_string(entries),
                        out_path.filename().string()});
    }
    return finish(std::move(doc), render_table({"layer", "groups", "entries", "output"}, rows));
}

CommandOutput cmd_verify(const CommandOptions& options) {
    const auto manifest = NetworkManifest::load(options.manifest);
    ordered_json doc;
    doc["command"] = "verify";
    doc["mode"] = options.mode == ArithMode::Integer ? "int" : "real";
    doc["layers"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    bool all_ok = true;

    for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
        const LoadedLayer layer = load_layer(manifest.layers[i]);
        const LayerSpec& spec = layer.rec.spec;
        const OutputDims dims = derive_dims(spec);
        const FeatureMap input = layer_input(layer, options, i);
        const FilterBank weights = conv_weights(layer, layer.bank, options.mode);

        const FeatureMap want = dense_conv(weights, input, spec, options.mode);
        const FeatureMap flow = sfs_conv(weights, input, spec, options.mode);

        auto blocks = blocks_from_dir(options.out_dir, layer.rec.name, dims.groups);
        if (!blocks) {
            const LayerStats stats = gather_stats(layer);
            blocks = encode_layer(layer, stats, choose_bit(layer, options.bit, stats).bit);
        }
        const FilterBank csf_codes = bank_from_blocks(spec, *blocks);
        const FilterBank csf_weights = conv_weights(layer, csf_codes, options.mode);
        const FeatureMap via_csf = sfs_conv(csf_weights, input, spec, options.mode);

        auto mismatch = compare_maps(want, flow, options.mode);
        const char* failed_path = mismatch ? "sfs" : nullptr;
        if (!mismatch) {
            mismatch = compare_maps(want, via_csf, options.mode);
            if (mismatch) {
                failed_path = "csf";
            }
        }

        ordered_json lj;
        lj["name"] = layer.rec.name;
        lj["match"] = !mismatch.has_value();
        if (mismatch) {
            all_ok = false;
            ordered_json mj;
            mj["path"] = failed_path;
            mj["channel"] = mismatch->channel;
            mj["y"] = mismatch->y;
            mj["x"] = mismatch->x;
            mj["expected"] = mismatch->want;
            mj["actual"] = mismatch->got;
            lj["first_mismatch"] = mj;
        }
        doc["layers"].push_back(lj);
        rows.push_back({layer.rec.name, mismatch ? "FAIL" : "ok",
                        mismatch ? std::string(failed_path) : std::string("-")});
    }
    doc["ok"] = all_ok;
    return finish(std::move(doc), render_table({"layer", "status", "failed_path"}, rows), all_ok);
}

CommandOutput cmd_stats(const CommandOptions& options) {
    const auto manifest = NetworkManifest::load(options.manifest);
    ordered_json doc;
    doc["command"] = "stats";
    doc["layers"] = ordered_json::array();
    std::ostringstream text;

    for (const auto& rec : manifest.layers) {
        const LoadedLayer layer = load_layer(rec);
        const LayerStats stats = gather_stats(layer);
        const BitOptResult opt = optimize_bits(stats.zero_runs, stats.nonzeros, layer.wbit);

        ordered_json lj;
        lj["name"] = rec.name;
        lj["wbit"] = layer.wbit;
        lj["nonzeros"] = stats.nonzeros;
        lj["zeros"] = stats.zeros;
        lj["max_zero_run"] = stats.zero_runs.max;
        lj["zero_runs"] = hist_json(stats.zero_runs);
        lj["nonzero_runs"] = hist_json(stats.nonzero_runs);
        ordered_json table = ordered_json::array();
        for (std::size_t b = 0; b < opt.table.size(); ++b) {
            ordered_json entry;
            entry["bit"] = b + 1;
            entry["total_bits"] = opt.table[b];
            table.push_back(entry);
        }
        lj["bit_table"] = table;
        lj["best_bit"] = opt.bit;
        doc["layers"].push_back(lj);

        text << "== " << rec.name << " (nonzeros " << stats.nonzeros << ", zeros " << stats.zeros
             << ", best bit " << opt.bit << ")\n";
        text << hist_text(stats.zero_runs, "zero runs");
        text << hist_text(stats.nonzero_runs, "nonzero runs");
    }
    return finish(std::move(doc), text.str());
}

CommandOutput cmd_simulate(const CommandOptions& options) {
    const auto manifest = NetworkManifest::load(options.manifest);
    ordered_json doc;
    doc["command"] = "simulate";
    doc["mode"] = options.mode == ArithMode::Integer ? "int" : "real";
    doc["layers"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    std::vector<LayerReport> reports;

    for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
        const LoadedLayer layer = load_layer(manifest.layers[i]);
        const LayerSpec& spec = layer.rec.spec;
        const OutputDims dims = derive_dims(spec);
        const FeatureMap input = layer_input(layer, options, i);

        auto blocks = blocks_from_dir(options.out_dir, layer.rec.name, dims.groups);
        if (!blocks) {
            const LayerStats stats = gather_stats(layer);
            blocks = encode_layer(layer, stats, choose_bit(layer, options.bit, stats).bit);
        }

        ArchConfig config;
        config.m = spec.m;
        const QuantCodebook* cb = layer.codebook ? &*layer.codebook : nullptr;
        const SimResult sim = simulate_layer(spec, *blocks, input, config, options.mode, cb);
        const LayerReport lr = report(sim.counters);
        reports.push_back(lr);

        ordered_json lj;
        lj["name"] = layer.rec.name;
        lj.update(layer_report_json(lr));
        doc["layers"].push_back(lj);
        rows.push_back({layer.rec.name, std::to_string(lr.counters.total_macs),
                        std::to_string(lr.counters.nz_macs), std::to_string(lr.counters.csf_macs),
                        fmt7(lr.util_dense), fmt7(lr.util_csf), fmt7(lr.speedup),
                        fmt7(lr.lookup_ratio)});
    }

    const LayerReport net = aggregate(reports);
    doc["network"] = layer_report_json(net);
    rows.push_back({"network", std::to_string(net.counters.total_macs),
                    std::to_string(net.counters.nz_macs), std::to_string(net.counters.csf_macs),
                    fmt7(net.util_dense), fmt7(net.util_csf), fmt7(net.speedup),
                    fmt7(net.lookup_ratio)});
    const std::string text = render_table({"layer", "total_macs", "nz_macs", "csf_macs",
                                           "util_dense", "util_csf", "speedup", "lookup_ratio"},
                                          rows);
    return finish(std::move(doc), text);
}

CommandOutput cmd_sweep(const CommandOptions& options) {
    if (options.batch_sizes.empty()) {
        throw RangeError("sweep needs at least one batch size (--batch-sizes)");
    }
    const auto manifest = NetworkManifest::load(options.manifest);
    ordered_json doc;
    doc["command"] = "sweep";
    doc["layers"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;

    for (const auto& rec : manifest.layers) {
        const LoadedLayer layer = load_layer(rec);
        std::vector<SweepRow> sweep;
        try {
            sweep = batch_size_sweep(layer.bank, layer.wbit, options.batch_sizes);
        } catch (const ShapeError& e) {
            throw ShapeError("layer '" + rec.name + "': " + e.what());
        }
        const auto best = std::min_element(sweep.begin(), sweep.end(),
                                           [](const SweepRow& a, const SweepRow& b) {
                                               return a.total_bits < b.total_bits;
                                           });

        ordered_json lj;
        lj["name"] = rec.name;
        lj["rows"] = ordered_json::array();
        for (const auto& row : sweep) {
            ordered_json rj;
            rj["m"] = row.m;
            rj["best_bit"] = row.best_bit;
            rj["total_bits"] = row.total_bits;
            rj["nonzeros"] = row.nonzeros;
            rj["padding"] = row.padding;
            lj["rows"].push_back(rj);
            rows.push_back({rec.name, std::to_string(row.m), std::to_string(row.best_bit),
                            std::to_string(row.total_bits), std::to_string(row.padding),
                            row.m == best->m ? "*" : ""});
        }
        lj["best_m"] = best->m;
        doc["layers"].push_back(lj);
    }
    return finish(std::move(doc),
                  render_table({"layer", "m", "bit", "total(bits)", "padding", "best"}, rows));
}

CommandOutput cmd_gen(const GenOptions& options) {
    if (options.wbit < 1 || options.wbit > 16) {
        throw RangeError("gen wbit must be in [1,16], got " + std::to_string(options.wbit));
    }
    if (options.sparsity < 0.0 || options.sparsity >= 1.0) {
        throw RangeError("gen sparsity must be in [0,1)");
    }
    if (options.layers < 1) {
        throw RangeError("gen needs at least one layer");
    }
    std::filesystem::create_directories(options.out_dir);
    std::mt19937_64 rng(options.seed);

    QuantCodebook cb;
    cb.wbit = options.wbit;
    cb.table.resize(std::size_t{1} << options.wbit, 0.0);
    for (std::size_t c = 1; c < cb.table.size(); ++c) {
        const double sign = c % 2 == 0 ? 1.0 : -1.0;
        cb.table[c] = sign * (0.125 + 0.0625 * static_cast<double>(c));
    }
    save_codebook_file(cb, options.out_dir / "codebook.sfcb");

    ordered_json doc;
    doc["command"] = "gen";
    doc["layers"] = ordered_json::array();
    ordered_json manifest_doc;
    manifest_doc["layers"] = ordered_json::array();

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> code_dist(
        1, (std::uint32_t{1} << options.wbit) - 1);

    for (int i = 0; i < options.layers; ++i) {
        LayerSpec spec;
        if (i % 2 == 0) {
            spec = {.M = 8, .C = 3, .K = 3, .S = 1, .W = 11, .H = 11, .m = 4};
        } else {
            // FC layer expressed as a 1x1 convolution
            spec = {.M = 16, .C = 24, .K = 1, .S = 1, .W = 1, .H = 1, .m = 8};
        }
        FilterBank bank;
        bank.spec = spec;
        bank.values.resize(static_cast<std::size_t>(spec.M) * spec.C * spec.K * spec.K);
        for (auto& v : bank.values) {
            v = coin(rng) < options.sparsity ? 0.0 : static_cast<double>(code_dist(rng));
        }
        const std::string name = "layer" + std::to_string(i);
        save_tensor_file(tensor_from_filter_bank(bank, DType::Code, options.wbit),
                         options.out_dir / (name + ".sfst"));

        ordered_json lj;
        lj["name"] = name;
        lj["M"] = spec.M;
        lj["C"] = spec.C;
        lj["K"] = spec.K;
        lj["S"] = spec.S;
        lj["W"] = spec.W;
        lj["H"] = spec.H;
        lj["m"] = spec.m;
        lj["weights"] = name + ".sfst";
        lj["codebook"] = "codebook.sfcb";
        manifest_doc["layers"].push_back(lj);
        doc["layers"].push_back(lj);
    }

    const auto manifest_path = options.out_dir / "manifest.json";
    {
        std::ofstream out(manifest_path);
        out << manifest_doc.dump(2) << '\n';
    }
    doc["manifest"] = manifest_path.string();
    std::ostringstream text;
    text << "wrote " << options.layers << " layer(s) + codebook + manifest to "
         << options.out_dir.string() << '\n';
    return finish(std::move(doc), text.str());
}

} // namespace sfs
