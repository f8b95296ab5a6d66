#pragma once

#include "sfscsf/tensor.hpp"

namespace sfs {

// Arithmetic mode for all convolution paths. Integer mode rounds operands to
// 64-bit integers and accumulates exactly; Real mode uses double arithmetic.
// The mode is always an explicit parameter, never inferred from the data.
enum class ArithMode {
    Integer,
    Real,
};

// Reference dense convolution: valid padding, no biases, output M x H' x W'.
// The correctness oracle for every other compute path in this library.
FeatureMap dense_conv(const FilterBank& filters, const FeatureMap& input, const LayerSpec& spec,
                      ArithMode mode = ArithMode::Integer);

} // namespace sfs
