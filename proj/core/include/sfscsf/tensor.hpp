#pragma once

#include <cstdint>
#include <vector>

#include "sfscsf/errors.hpp"
#include "sfscsf/layer_spec.hpp"

namespace sfs {

// Payload kind of a stored tensor. Real tensors hold 64-bit values; code
// tensors hold unsigned quantization codes kept as exact integral doubles,
// with wbit recording the code width.
enum class DType : std::uint16_t {
    Real = 0,
    Code = 1,
};

// Dense n-dimensional array, row-major over dims. This is the unit of file
// I/O; FilterBank and FeatureMap are shaped views over the same storage.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::uint32_t> dims, DType dtype = DType::Real, int wbit = 0);

    const std::vector<std::uint32_t>& dims() const { return dims_; }
    DType dtype() const { return dtype_; }
    int wbit() const { return wbit_; }

    std::size_t size() const { return values_.size(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const Tensor&) const = default;

private:
    std::vector<std::uint32_t> dims_;
    DType dtype_ = DType::Real;
    int wbit_ = 0;
    std::vector<double> values_;
};

// 4-D weight bank, layout [cho][chi][r][c] (filter, channel, row, col).
struct FilterBank {
    LayerSpec spec;
    std::vector<double> values; // M*C*K*K

    double at(int cho, int chi, int r, int c) const {
        return values[((static_cast<std::size_t>(cho) * spec.C + chi) * spec.K + r) * spec.K + c];
    }
    double& at(int cho, int chi, int r, int c) {
        return values[((static_cast<std::size_t>(cho) * spec.C + chi) * spec.K + r) * spec.K + c];
    }

    void validate() const;
};

// 3-D activation array, layout [channel][row][col].
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    static FeatureMap zeros(int channels, int height, int width);

    double at(int ch, int y, int x) const {
        return values[(static_cast<std::size_t>(ch) * height + y) * width + x];
    }
    double& at(int ch, int y, int x) {
        return values[(static_cast<std::size_t>(ch) * height + y) * width + x];
    }

    void validate() const;

    bool operator==(const FeatureMap&) const = default;
};

// Code -> weight value table. Code 0 always maps to 0.0 so that sparsity is
// decided on codes alone.
struct QuantCodebook {
    int wbit = 0;
    std::vector<double> table; // 2^wbit entries

    void validate() const;
};

double dequantize(std::uint32_t code, const QuantCodebook& codebook);

// Maps a bank of quantization codes to real weights via the codebook.
FilterBank dequantize_bank(const FilterBank& codes, const QuantCodebook& codebook);

// Shape-checked conversions between the generic Tensor and the domain views.
FilterBank filter_bank_from_tensor(const Tensor& t, const LayerSpec& spec);
FeatureMap feature_map_from_tensor(const Tensor& t);
Tensor tensor_from_filter_bank(const FilterBank& bank, DType dtype, int wbit = 0);
Tensor tensor_from_feature_map(const FeatureMap& map, DType dtype = DType::Real, int wbit = 0);

} // namespace sfs
