#include "sfscsf/arch_sim.hpp"

#include <limits>
#include <string>
#include <utility>

#include "sfscsf/sfs_flow.hpp"

namespace sfs {

SimCounters& SimCounters::operator+=(const SimCounters& o) {
    total_macs += o.total_macs;
    nz_macs += o.nz_macs;
    csf_macs += o.csf_macs;
    csf_lookups += o.csf_lookups;
    baseline_lookups += o.baseline_lookups;
    feature_loads += o.feature_loads;
    filter_loads += o.filter_loads;
    return *this;
}

namespace {

struct ColumnEntry {
    int j;
    std::uint32_t code;
};

} // namespace

SimResult simulate_layer(const LayerSpec& spec, const std::vector<CsfBlock>& blocks,
                         const FeatureMap& input, const ArchConfig& config, ArithMode mode,
                         const QuantCodebook* codebook) {
    spec.validate();
    input.validate();
    const OutputDims dims = derive_dims(spec);
    if (config.m != spec.m) {
        throw ShapeError("config PE width m=" + std::to_string(config.m) +
                         " does not match layer batch size m=" + std::to_string(spec.m));
    }
    const int lb_rows = config.line_buffer_rows == 0 ? spec.K : config.line_buffer_rows;
    if (lb_rows < spec.K) {
        throw ShapeError("line buffer holds " + std::to_string(lb_rows) +
                         " rows, needs at least K=" + std::to_string(spec.K));
    }
    if (blocks.size() != static_cast<std::size_t>(dims.groups)) {
        throw ShapeError("expected " + std::to_string(dims.groups) + " blocks, got " +
                         std::to_string(blocks.size()));
    }
    if (input.channels != spec.C || input.height != spec.H || input.width != spec.W) {
        throw ShapeError("input feature map dims do not match layer spec");
    }
    if (mode == ArithMode::Real && codebook == nullptr) {
        throw EncodingError("real mode needs a codebook to dequantize weight codes");
    }
    const int num_columns = spec.C * spec.K * spec.K;

    SimCounters counters;
    counters.total_macs = static_cast<std::uint64_t>(spec.M) * spec.C * spec.K * spec.K *
                          dims.out_w * dims.out_h;

    std::vector<FeatureMap> parts;
    parts.reserve(blocks.size());

    std::vector<std::vector<ColumnEntry>> columns(num_columns);
    for (const auto& block : blocks) {
        if (static_cast<int>(block.m) != spec.m ||
            static_cast<int>(block.num_columns) != num_columns) {
            throw ShapeError("block geometry does not match layer spec");
        }
        for (auto& col : columns) {
            col.clear();
        }
        const auto positions = entry_positions(block.entries, block.total_len());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const std::size_t pos = positions[i];
            columns[pos / block.m].push_back(
                {static_cast<int>(pos % block.m), block.entries[i].code});
        }

        // Stationary filters: each entry enters the local buffer once per
        // group; the feature map re-streams once per group.
        counters.filter_loads += block.entries.size();
        counters.feature_loads +=
            static_cast<std::uint64_t>(spec.C) * spec.H * spec.W;

        FeatureMap part = FeatureMap::zeros(spec.m, dims.out_h, dims.out_w);
        std::vector<std::int64_t> acc;
        if (mode == ArithMode::Integer) {
            acc.assign(part.values.size(), 0);
        }

        for (int chi = 0; chi < spec.C; ++chi) {
            for (int r = 0; r < spec.K; ++r) {
                for (int c = 0; c < spec.K; ++c) {
                    const auto& col = columns[(chi * spec.K + r) * spec.K + c];
                    std::uint64_t nz_in_col = 0;
                    for (const auto& e : col) {
                        if (e.code != 0) {
                            ++nz_in_col;
                        }
                    }
                    for (int y = 0; y < dims.out_h; ++y) {
                        for (int x = 0; x < dims.out_w; ++x) {
                            // One locate yields the whole column of m weights.
                            counters.csf_lookups += 1;
                            counters.baseline_lookups +=
                                config.count_lookups == BaselineLookupModel::PerNonzero
                                    ? nz_in_col
                                    : 1;
                            counters.csf_macs += col.size();
                            counters.nz_macs += nz_in_col;
                            if (col.empty()) {
                                continue;
                            }
                            const double v = input.at(chi, spec.S * y + r, spec.S * x + c);
                            if (mode == ArithMode::Integer) {
                                const auto vi = static_cast<std::int64_t>(v);
                                for (const auto& e : col) {
                                    // Padding entries issue a zero-weight MAC.
                                    acc[(static_cast<std::size_t>(e.j) * dims.out_h + y) *
                                            dims.out_w +
                                        x] += static_cast<std::int64_t>(e.code) * vi;
                                }
                            } else {
                                for (const auto& e : col) {
                                    part.at(e.j, y, x) += dequantize(e.code, *codebook) * v;
                                }
                            }
                        }
                    }
                }
            }
        }
        if (mode == ArithMode::Integer) {
            for (std::size_t i = 0; i < acc.size(); ++i) {
                part.values[i] = static_cast<double>(acc[i]);
            }
        }
        parts.push_back(std::move(part));
    }

    return {concat_outputs(parts), counters};
}

MacCounts mac_counts(const LayerSpec& spec, std::uint64_t nz_entries,
                     std::uint64_t padding_entries) {
    const OutputDims dims = derive_dims(spec);
    const auto positions = static_cast<std::uint64_t>(dims.out_w) * dims.out_h;
    MacCounts out;
    out.total = static_cast<std::uint64_t>(spec.M) * spec.C * spec.K * spec.K * positions;
    out.nz = nz_entries * positions;
    out.csf = (nz_entries + padding_entries) * positions;
    return out;
}

LayerReport report(const SimCounters& counters) {
    if (counters.total_macs == 0) {
        throw DivisionError("total_macs is zero");
    }
    LayerReport r;
    r.counters = counters;
    r.util_dense = static_cast<double>(counters.nz_macs) / static_cast<double>(counters.total_macs);
    if (counters.csf_macs == 0) {
        // Degenerate all-zero layer: no MAC issued, none wasted.
        r.util_csf = 1.0;
        r.speedup = std::numeric_limits<double>::infinity();
    } else {
        r.util_csf =
            static_cast<double>(counters.nz_macs) / static_cast<double>(counters.csf_macs);
        r.speedup =
            static_cast<double>(counters.total_macs) / static_cast<double>(counters.csf_macs);
    }
    if (counters.baseline_lookups == 0) {
        r.lookup_ratio =
            counters.csf_lookups == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        r.lookup_ratio = static_cast<double>(counters.csf_lookups) /
                         static_cast<double>(counters.baseline_lookups);
    }
    return r;
}

LayerReport aggregate(const std::vector<LayerReport>& reports) {
    if (reports.empty()) {
        throw ShapeError("aggregate needs at least one layer report");
    }
    SimCounters sum;
    for (const auto& r : reports) {
        sum += r.counters;
    }
    return report(sum);
}

} // namespace sfs
