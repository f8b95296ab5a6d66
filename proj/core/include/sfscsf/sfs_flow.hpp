#pragma once

// Stacked-filters computation flow: filters are grouped into batches of m,
// each batch is reshaped so the filter index becomes the innermost axis, one
// streamed input channel then convolves with the m stacked filters at once,
// and the per-batch outputs are concatenated back. Equivalent to dense_conv
// by construction.

#include <vector>

#include "sfscsf/dense_conv.hpp"
#include "sfscsf/tensor.hpp"

namespace sfs {

// m consecutive filters of one batch, layout [j][chi][r][c].
struct FilterGroup {
    int index = 0; // batch number n
    int m = 0;
    int C = 0;
    int K = 0;
    std::vector<double> values;

    double at(int j, int chi, int r, int c) const {
        return values[((static_cast<std::size_t>(j) * C + chi) * K + r) * K + c];
    }
    double& at(int j, int chi, int r, int c) {
        return values[((static_cast<std::size_t>(j) * C + chi) * K + r) * K + c];
    }

    bool operator==(const FilterGroup&) const = default;
};

// The same batch with the filter index innermost, layout [chi][r][c][j].
// Flattened in this order, each run of m consecutive values is one "column":
// the m weights multiplying a single feature element.
struct ReshapedGroup {
    int index = 0;
    int m = 0;
    int C = 0;
    int K = 0;
    std::vector<double> values;

    int num_columns() const { return C * K * K; }

    double at(int chi, int r, int c, int j) const {
        return values[((static_cast<std::size_t>(chi) * K + r) * K + c) * m + j];
    }
    double& at(int chi, int r, int c, int j) {
        return values[((static_cast<std::size_t>(chi) * K + r) * K + c) * m + j];
    }

    bool operator==(const ReshapedGroup&) const = default;
};

// Splits the bank into M/m groups of m consecutive filters.
std::vector<FilterGroup> group_filters(const FilterBank& filters, int m);

// Axis permutation [j][chi][r][c] -> [chi][r][c][j]; lossless.
ReshapedGroup reshape_group(const FilterGroup& group);

// Inverse permutation; unreshape_group(reshape_group(g)) == g.
FilterGroup unreshape_group(const ReshapedGroup& group);

// Convolves one reshaped batch with the input, producing m output channels.
FeatureMap sfs_conv_group(const ReshapedGroup& group, const FeatureMap& input,
                          const LayerSpec& spec, ArithMode mode = ArithMode::Integer);

// Concatenates per-batch outputs along the channel axis.
FeatureMap concat_outputs(const std::vector<FeatureMap>& parts);

// Full flow: group -> reshape -> per-batch conv -> concat.
FeatureMap sfs_conv(const FilterBank& filters, const FeatureMap& input, const LayerSpec& spec,
                    ArithMode mode = ArithMode::Integer);

} // namespace sfs
