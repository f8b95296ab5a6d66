#include "sfscsf/tensor.hpp"

#include <string>

namespace sfs {

namespace {

std::size_t element_count(const std::vector<std::uint32_t>& dims) {
    std::size_t n = 1;
    for (auto d : dims) {
        n *= d;
    }
    return dims.empty() ? 0 : n;
}

} // namespace

Tensor::Tensor(std::vector<std::uint32_t> dims, DType dtype, int wbit)
    : dims_(std::move(dims)), dtype_(dtype), wbit_(wbit) {
    if (dtype_ == DType::Code && (wbit_ < 1 || wbit_ > 32)) {
        throw RangeError("wbit must be in [1,32] for code tensors, got " + std::to_string(wbit_));
    }
    values_.assign(element_count(dims_), 0.0);
}

void FilterBank::validate() const {
    spec.validate();
    const std::size_t expected = static_cast<std::size_t>(spec.M) * spec.C * spec.K * spec.K;
    if (values.size() != expected) {
        throw ShapeError("filter bank holds " + std::to_string(values.size()) +
                         " values, expected M*C*K*K = " + std::to_string(expected));
    }
}

FeatureMap FeatureMap::zeros(int channels, int height, int width) {
    FeatureMap f;
    f.channels = channels;
    f.height = height;
    f.width = width;
    f.values.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
    return f;
}

void FeatureMap::validate() const {
    if (channels < 1 || height < 1 || width < 1) {
        throw ShapeError("feature map dims must be >= 1");
    }
    const std::size_t expected = static_cast<std::size_t>(channels) * height * width;
    if (values.size() != expected) {
        throw ShapeError("feature map holds " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(expected));
    }
}

void QuantCodebook::validate() const {
    if (wbit < 1 || wbit > 32) {
        throw RangeError("codebook wbit must be in [1,32], got " + std::to_string(wbit));
    }
    const std::size_t expected = std::size_t{1} << wbit;
    if (table.size() != expected) {
        throw ShapeError("codebook table holds " + std::to_string(table.size()) +
                         " entries, expected 2^wbit = " + std::to_string(expected));
    }
    if (table[0] != 0.0) {
        throw EncodingError("codebook entry 0 must map to 0.0");
    }
}

double dequantize(std::uint32_t code, const QuantCodebook& codebook) {
    if (code >= codebook.table.size()) {
        throw RangeError("code " + std::to_string(code) + " out of codebook range (wbit=" +
                         std::to_string(codebook.wbit) + ")");
    }
    return codebook.table[code];
}

FilterBank dequantize_bank(const FilterBank& codes, const QuantCodebook& codebook) {
    codebook.validate();
    FilterBank out;
    out.spec = codes.spec;
    out.values.reserve(codes.values.size());
    for (double v : codes.values) {
        const auto code = static_cast<std::uint32_t>(v);
        out.values.push_back(dequantize(code, codebook));
    }
    return out;
}

FilterBank filter_bank_from_tensor(const Tensor& t, const LayerSpec& spec) {
    spec.validate();
    if (t.dims().size() != 4) {
        throw ShapeError("filter bank tensor must be 4-D, got ndim=" +
                         std::to_string(t.dims().size()));
    }
    const auto& d = t.dims();
    if (d[0] != static_cast<std::uint32_t>(spec.M) || d[1] != static_cast<std::uint32_t>(spec.C) ||
        d[2] != static_cast<std::uint32_t>(spec.K) || d[3] != static_cast<std::uint32_t>(spec.K)) {
        throw ShapeError("filter tensor dims do not match layer spec M,C,K,K");
    }
    FilterBank bank;
    bank.spec = spec;
    bank.values = t.values();
    return bank;
}

FeatureMap feature_map_from_tensor(const Tensor& t) {
    if (t.dims().size() != 3) {
        throw ShapeError("feature map tensor must be 3-D, got ndim=" +
                         std::to_string(t.dims().size()));
    }
    FeatureMap f;
    f.channels = static_cast<int>(t.dims()[0]);
    f.height = static_cast<int>(t.dims()[1]);
    f.width = static_cast<int>(t.dims()[2]);
    f.values = t.values();
    f.validate();
    return f;
}

Tensor tensor_from_filter_bank(const FilterBank& bank, DType dtype, int wbit) {
    bank.validate();
    Tensor t({static_cast<std::uint32_t>(bank.spec.M), static_cast<std::uint32_t>(bank.spec.C),
              static_cast<std::uint32_t>(bank.spec.K), static_cast<std::uint32_t>(bank.spec.K)},
             dtype, wbit);
    t.values() = bank.values;
    return t;
}

Tensor tensor_from_feature_map(const FeatureMap& map, DType dtype, int wbit) {
    map.validate();
    Tensor t({static_cast<std::uint32_t>(map.channels), static_cast<std::uint32_t>(map.height),
              static_cast<std::uint32_t>(map.width)},
             dtype, wbit);
    t.values() = map.values;
    return t;
}

} // namespace sfs
