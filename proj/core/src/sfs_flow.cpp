#include "sfscsf/sfs_flow.hpp"

#include <string>

namespace sfs {

std::vector<FilterGroup> group_filters(const FilterBank& filters, int m) {
    filters.validate();
    if (m < 1 || filters.spec.M % m != 0) {
        throw ShapeError("batch size m=" + std::to_string(m) + " does not divide M=" +
                         std::to_string(filters.spec.M));
    }
    const int groups = filters.spec.M / m;
    const std::size_t filter_len =
        static_cast<std::size_t>(filters.spec.C) * filters.spec.K * filters.spec.K;

    std::vector<FilterGroup> out;
    out.reserve(groups);
    for (int n = 0; n < groups; ++n) {
        FilterGroup g;
        g.index = n;
        g.m = m;
        g.C = filters.spec.C;
        g.K = filters.spec.K;
        const auto begin = filters.values.begin() +
                           static_cast<std::ptrdiff_t>(n) * m * static_cast<std::ptrdiff_t>(filter_len);
        g.values.assign(begin, begin + static_cast<std::ptrdiff_t>(m * filter_len));
        out.push_back(std::move(g));
    }
    return out;
}

ReshapedGroup reshape_group(const FilterGroup& group) {
    ReshapedGroup out;
    out.index = group.index;
    out.m = group.m;
    out.C = group.C;
    out.K = group.K;
    out.values.resize(group.values.size());
    for (int chi = 0; chi < group.C; ++chi) {
        for (int r = 0; r < group.K; ++r) {
            for (int c = 0; c < group.K; ++c) {
                for (int j = 0; j < group.m; ++j) {
                    out.at(chi, r, c, j) = group.at(j, chi, r, c);
                }
            }
        }
    }
    return out;
}

FilterGroup unreshape_group(const ReshapedGroup& group) {
    FilterGroup out;
    out.index = group.index;
    out.m = group.m;
    out.C = group.C;
    out.K = group.K;
    out.values.resize(group.values.size());
    for (int chi = 0; chi < group.C; ++chi) {
        for (int r = 0; r < group.K; ++r) {
            for (int c = 0; c < group.K; ++c) {
                for (int j = 0; j < group.m; ++j) {
                    out.at(j, chi, r, c) = group.at(chi, r, c, j);
                }
            }
        }
    }
    return out;
}

FeatureMap sfs_conv_group(const ReshapedGroup& group, const FeatureMap& input,
                          const LayerSpec& spec, ArithMode mode) {
    input.validate();
    if (group.C != spec.C || group.K != spec.K || group.m != spec.m) {
        throw ShapeError("reshaped group dims do not match layer spec");
    }
    if (input.channels != spec.C || input.height != spec.H || input.width != spec.W) {
        throw ShapeError("input feature map dims do not match layer spec");
    }
    const OutputDims dims = derive_dims(spec);
    FeatureMap out = FeatureMap::zeros(group.m, dims.out_h, dims.out_w);

    // Accumulators start at zero; one streamed feature element updates all m
    // output channels per kernel position.
    if (mode == ArithMode::Integer) {
        std::vector<std::int64_t> acc(out.values.size(), 0);
        for (int chi = 0; chi < spec.C; ++chi) {
            for (int r = 0; r < spec.K; ++r) {
                for (int c = 0; c < spec.K; ++c) {
                    for (int y = 0; y < dims.out_h; ++y) {
                        for (int x = 0; x < dims.out_w; ++x) {
                            const auto v = static_cast<std::int64_t>(
                                input.at(chi, spec.S * y + r, spec.S * x + c));
                            for (int j = 0; j < group.m; ++j) {
                                acc[(static_cast<std::size_t>(j) * dims.out_h + y) * dims.out_w +
                                    x] += static_cast<std::int64_t>(group.at(chi, r, c, j)) * v;
                            }
                        }
                    }
                }
            }
        }
        for (std::size_t i = 0; i < acc.size(); ++i) {
            out.values[i] = static_cast<double>(acc[i]);
        }
    } else {
        for (int chi = 0; chi < spec.C; ++chi) {
            for (int r = 0; r < spec.K; ++r) {
                for (int c = 0; c < spec.K; ++c) {
                    for (int y = 0; y < dims.out_h; ++y) {
                        for (int x = 0; x < dims.out_w; ++x) {
                            const double v = input.at(chi, spec.S * y + r, spec.S * x + c);
                            for (int j = 0; j < group.m; ++j) {
                                out.at(j, y, x) += group.at(chi, r, c, j) * v;
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

FeatureMap concat_outputs(const std::vector<FeatureMap>& parts) {
    if (parts.empty()) {
        throw ShapeError("concat_outputs needs at least one part");
    }
    const int h = parts.front().height;
    const int w = parts.front().width;
    int channels = 0;
    for (const auto& p : parts) {
        p.validate();
        if (p.height != h || p.width != w) {
            throw ShapeError("concat_outputs parts disagree on spatial dims");
        }
        channels += p.channels;
    }
    FeatureMap out = FeatureMap::zeros(channels, h, w);
    auto dst = out.values.begin();
    for (const auto& p : parts) {
        dst = std::copy(p.values.begin(), p.values.end(), dst);
    }
    return out;
}

FeatureMap sfs_conv(const FilterBank& filters, const FeatureMap& input, const LayerSpec& spec,
                    ArithMode mode) {
    spec.validate();
    auto groups = group_filters(filters, spec.m);
    std::vector<FeatureMap> parts;
    parts.reserve(groups.size());
    for (const auto& g : groups) {
        parts.push_back(sfs_conv_group(reshape_group(g), input, spec, mode));
    }
    return concat_outputs(parts);
}

} // namespace sfs
