#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "sfscsf/dense_conv.hpp"
#include "sfscsf/tensor_io.hpp"

#include "test_util.hpp"

using namespace sfs;

namespace {

// Independent reference: six explicit loops over raw flat arrays, indexing
// by hand. Kept deliberately separate from the library's dense_conv.
std::vector<double> naive_conv(const std::vector<double>& filters,
                               const std::vector<double>& input, int M, int C, int K, int S,
                               int H, int W) {
    const int out_h = (H - K) / S + 1;
    const int out_w = (W - K) / S + 1;
    std::vector<double> out(static_cast<std::size_t>(M) * out_h * out_w, 0.0);
    for (int cho = 0; cho < M; ++cho)
        for (int chi = 0; chi < C; ++chi)
            for (int y = 0; y < out_h; ++y)
                for (int x = 0; x < out_w; ++x)
                    for (int r = 0; r < K; ++r)
                        for (int c = 0; c < K; ++c) {
                            const double w = filters[((cho * C + chi) * K + r) * K + c];
                            const double v =
                                input[(chi * H + (S * y + r)) * W + (S * x + c)];
                            out[(cho * out_h + y) * out_w + x] += w * v;
                        }
    return out;
}

} // namespace

TEST_CASE("derive_dims evaluates the output shape formula") {
    LayerSpec spec{.M = 96, .C = 3, .K = 11, .S = 4, .W = 227, .H = 227, .m = 96};
    const auto d = derive_dims(spec);
    CHECK(d.out_w == 55);
    CHECK(d.out_h == 55);
    CHECK(d.groups == 1);
}

TEST_CASE("derive_dims window exactly covering input gives 1x1") {
    LayerSpec spec{.M = 2, .C = 1, .K = 3, .S = 1, .W = 3, .H = 3, .m = 1};
    const auto d = derive_dims(spec);
    CHECK(d.out_w == 1);
    CHECK(d.out_h == 1);
}

TEST_CASE("derive_dims divisibility rule") {
    LayerSpec ok{.M = 1, .C = 1, .K = 3, .S = 2, .W = 5, .H = 5, .m = 1};
    CHECK(derive_dims(ok).out_w == 2);
    LayerSpec bad{.M = 1, .C = 1, .K = 3, .S = 2, .W = 6, .H = 5, .m = 1};
    CHECK_THROWS_AS(derive_dims(bad), ShapeError);
}

TEST_CASE("LayerSpec validation rejects bad fields") {
    CHECK_THROWS_AS(derive_dims(LayerSpec{.M = 0}), ShapeError);
    CHECK_THROWS_AS(derive_dims(LayerSpec{.M = 4, .C = 1, .K = 5, .S = 1, .W = 3, .H = 3, .m = 1}),
                    ShapeError);
    CHECK_THROWS_AS(derive_dims(LayerSpec{.M = 4, .C = 1, .K = 1, .S = 1, .W = 1, .H = 1, .m = 3}),
                    ShapeError);
}

TEST_CASE("output dims invert to the input extent") {
    testutil::Rng rng(11);
    std::uniform_int_distribution<int> kdist(1, 5), sdist(1, 3), adist(0, 6);
    for (int i = 0; i < 50; ++i) {
        LayerSpec spec;
        spec.K = kdist(rng);
        spec.S = sdist(rng);
        spec.W = spec.K + spec.S * adist(rng);
        spec.H = spec.K + spec.S * adist(rng);
        const auto d = derive_dims(spec);
        CHECK((d.out_w - 1) * spec.S + spec.K == spec.W);
        CHECK((d.out_h - 1) * spec.S + spec.K == spec.H);
    }
}

TEST_CASE("dense_conv scalar scaling") {
    LayerSpec spec{.M = 1, .C = 1, .K = 1, .S = 1, .W = 2, .H = 2, .m = 1};
    FilterBank filters{spec, {2.0}};
    FeatureMap input = FeatureMap::zeros(1, 2, 2);
    input.values = {1, 2, 3, 4};
    const auto out = dense_conv(filters, input, spec);
    CHECK(out.values == std::vector<double>{2, 4, 6, 8});
}

TEST_CASE("dense_conv all-ones 3x3 sums to 9") {
    LayerSpec spec{.M = 1, .C = 1, .K = 3, .S = 1, .W = 3, .H = 3, .m = 1};
    FilterBank filters{spec, std::vector<double>(9, 1.0)};
    FeatureMap input = FeatureMap::zeros(1, 3, 3);
    input.values.assign(9, 1.0);
    const auto out = dense_conv(filters, input, spec);
    REQUIRE(out.values.size() == 1);
    CHECK(out.values[0] == 9.0);
}

TEST_CASE("dense_conv matches the naive six-loop reference") {
    testutil::Rng rng(42);
    LayerSpec spec{.M = 2, .C = 2, .K = 3, .S = 1, .W = 5, .H = 5, .m = 1};
    const auto bank = testutil::random_bank(rng, spec, 4, 0.3);
    const auto input = testutil::random_input(rng, 2, 5, 5);
    const auto got = dense_conv(bank, input, spec, ArithMode::Integer);
    const auto want = naive_conv(bank.values, input.values, 2, 2, 3, 1, 5, 5);
    CHECK(got.values == want);

    const auto got_real = dense_conv(bank, input, spec, ArithMode::Real);
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(got_real.values[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("dense_conv strided case matches the naive reference") {
    testutil::Rng rng(43);
    LayerSpec spec{.M = 3, .C = 2, .K = 3, .S = 2, .W = 7, .H = 9, .m = 1};
    const auto bank = testutil::random_bank(rng, spec, 5, 0.5);
    const auto input = testutil::random_input(rng, 2, 9, 7);
    const auto got = dense_conv(bank, input, spec);
    CHECK(got.values == naive_conv(bank.values, input.values, 3, 2, 3, 2, 9, 7));
}

TEST_CASE("dense_conv with all-zero filters is all-zero") {
    testutil::Rng rng(7);
    LayerSpec spec{.M = 2, .C = 3, .K = 3, .S = 1, .W = 6, .H = 6, .m = 1};
    FilterBank zeros{spec, std::vector<double>(2 * 3 * 3 * 3, 0.0)};
    const auto input = testutil::random_input(rng, 3, 6, 6);
    const auto out = dense_conv(zeros, input, spec);
    for (double v : out.values) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("dense_conv is linear in the filter values") {
    testutil::Rng rng(99);
    LayerSpec spec{.M = 2, .C = 2, .K = 3, .S = 1, .W = 5, .H = 5, .m = 1};
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FilterBank w1{spec, {}}, w2{spec, {}}, combo{spec, {}};
    const double a = 0.75, b = -1.25;
    for (int i = 0; i < 2 * 2 * 3 * 3; ++i) {
        w1.values.push_back(dist(rng));
        w2.values.push_back(dist(rng));
        combo.values.push_back(a * w1.values.back() + b * w2.values.back());
    }
    const auto input = testutil::random_real_input(rng, 2, 5, 5);
    const auto lhs = dense_conv(combo, input, spec, ArithMode::Real);
    const auto r1 = dense_conv(w1, input, spec, ArithMode::Real);
    const auto r2 = dense_conv(w2, input, spec, ArithMode::Real);
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        const double want = a * r1.values[i] + b * r2.values[i];
        CHECK(std::abs(lhs.values[i] - want) <=
              1e-6 * std::max({1.0, std::abs(lhs.values[i]), std::abs(want)}));
    }
}

TEST_CASE("dense_conv rejects mismatched shapes") {
    LayerSpec spec{.M = 1, .C = 2, .K = 3, .S = 1, .W = 5, .H = 5, .m = 1};
    FilterBank filters{spec, std::vector<double>(1 * 2 * 3 * 3, 1.0)};
    const auto bad_input = FeatureMap::zeros(3, 5, 5);
    CHECK_THROWS_AS(dense_conv(filters, bad_input, spec), ShapeError);
}

TEST_CASE("tensor save/load round trip") {
    Tensor t({2, 3});
    t.values() = {1.5, -2.25, 3.0, 0.0, 42.0, -0.125};
    const auto bytes = save_tensor(t);
    const Tensor back = load_tensor(bytes);
    CHECK(back == t);
    CHECK(save_tensor(back) == bytes);
}

TEST_CASE("code tensor round trip keeps dtype and wbit") {
    Tensor t({4}, DType::Code, 5);
    t.values() = {0, 31, 7, 1};
    const auto bytes = save_tensor(t);
    const Tensor back = load_tensor(bytes);
    CHECK(back.dtype() == DType::Code);
    CHECK(back.wbit() == 5);
    CHECK(back.values() == t.values());
    CHECK(save_tensor(back) == bytes);
}

TEST_CASE("truncated payload names the offending field") {
    Tensor t({2, 2});
    t.values() = {1, 2, 3, 4};
    auto bytes = save_tensor(t);
    bytes.pop_back();
    try {
        load_tensor(bytes);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("payload length") != std::string::npos);
    }
}

TEST_CASE("bad magic and version are rejected by name") {
    Tensor t({1});
    t.values() = {1.0};
    auto bytes = save_tensor(t);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    try {
        load_tensor(bad_magic);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
    auto bad_version = bytes;
    bad_version[4] = 9;
    try {
        load_tensor(bad_version);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
}

TEST_CASE("hand-built 4-D header loads as a filter bank") {
    // magic, version 1, dtype 0, ndim 4, dims 4,2,3,3, then 72 doubles
    std::vector<std::uint8_t> bytes = {'S', 'F', 'S', 'T', 1, 0, 0, 0, 4, 0,
                                       4, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 3, 0, 0, 0};
    for (int i = 0; i < 72; ++i) {
        const double v = static_cast<double>(i);
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        for (int b = 0; b < 8; ++b) {
            bytes.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
        }
    }
    const Tensor t = load_tensor(bytes);
    REQUIRE(t.dims() == std::vector<std::uint32_t>{4, 2, 3, 3});
    REQUIRE(t.size() == 72);
    LayerSpec spec{.M = 4, .C = 2, .K = 3, .S = 1, .W = 3, .H = 3, .m = 2};
    const FilterBank bank = filter_bank_from_tensor(t, spec);
    CHECK(bank.at(0, 0, 0, 1) == 1.0);
    CHECK(bank.at(3, 1, 2, 2) == 71.0);
    CHECK(save_tensor(t) == bytes);
}

TEST_CASE("dequantize") {
    QuantCodebook cb{2, {0.0, -0.5, 0.25, 1.0}};
    cb.validate();
    CHECK(dequantize(0, cb) == 0.0);
    CHECK(dequantize(3, cb) == 1.0);
    CHECK_THROWS_AS(dequantize(4, cb), RangeError);
}

TEST_CASE("codebook validation") {
    QuantCodebook wrong_size{2, {0.0, 1.0}};
    CHECK_THROWS_AS(wrong_size.validate(), ShapeError);
    QuantCodebook bad_zero{1, {0.5, 1.0}};
    CHECK_THROWS_AS(bad_zero.validate(), EncodingError);
    QuantCodebook cb{1, {0.0, 2.0}};
    const auto bytes = save_codebook(cb);
    const auto back = load_codebook(bytes);
    CHECK(back.wbit == 1);
    CHECK(back.table == cb.table);
    CHECK(save_codebook(back) == bytes);
}

TEST_CASE("dequantize_bank maps codes through the table") {
    LayerSpec spec{.M = 1, .C = 1, .K = 2, .S = 1, .W = 2, .H = 2, .m = 1};
    FilterBank codes{spec, {0, 3, 1, 2}};
    QuantCodebook cb{2, {0.0, -0.5, 0.25, 1.0}};
    const auto real = dequantize_bank(codes, cb);
    CHECK(real.values == std::vector<double>{0.0, 1.0, -0.5, 0.25});
}
