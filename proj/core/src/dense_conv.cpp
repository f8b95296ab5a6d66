#include "sfscsf/dense_conv.hpp"

#include <cmath>
#include <string>

namespace sfs {

namespace {

void check_conv_shapes(const FilterBank& filters, const FeatureMap& input,
                       const LayerSpec& spec) {
    filters.validate();
    input.validate();
    if (filters.spec != spec) {
        throw ShapeError("filter bank spec does not match layer spec");
    }
    if (input.channels != spec.C || input.height != spec.H || input.width != spec.W) {
        throw ShapeError("input feature map is " + std::to_string(input.channels) + "x" +
                         std::to_string(input.height) + "x" + std::to_string(input.width) +
                         ", spec expects " + std::to_string(spec.C) + "x" +
                         std::to_string(spec.H) + "x" + std::to_string(spec.W));
    }
}

} // namespace

FeatureMap dense_conv(const FilterBank& filters, const FeatureMap& input, const LayerSpec& spec,
                      ArithMode mode) {
    check_conv_shapes(filters, input, spec);
    const OutputDims dims = derive_dims(spec);
    FeatureMap out = FeatureMap::zeros(spec.M, dims.out_h, dims.out_w);

    for (int cho = 0; cho < spec.M; ++cho) {
        for (int y = 0; y < dims.out_h; ++y) {
            for (int x = 0; x < dims.out_w; ++x) {
                if (mode == ArithMode::Integer) {
                    std::int64_t acc = 0;
                    for (int chi = 0; chi < spec.C; ++chi) {
                        for (int r = 0; r < spec.K; ++r) {
                            for (int c = 0; c < spec.K; ++c) {
                                const auto w =
                                    static_cast<std::int64_t>(filters.at(cho, chi, r, c));
                                const auto v = static_cast<std::int64_t>(
                                    input.at(chi, spec.S * y + r, spec.S * x + c));
                                acc += w * v;
                            }
                        }
                    }
                    out.at(cho, y, x) = static_cast<double>(acc);
                } else {
                    double acc = 0.0;
                    for (int chi = 0; chi < spec.C; ++chi) {
                        for (int r = 0; r < spec.K; ++r) {
                            for (int c = 0; c < spec.K; ++c) {
                                acc += filters.at(cho, chi, r, c) *
                                       input.at(chi, spec.S * y + r, spec.S * x + c);
                            }
                        }
                    }
                    out.at(cho, y, x) = acc;
                }
            }
        }
    }
    return out;
}

} // namespace sfs
