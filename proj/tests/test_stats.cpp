#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "sfscsf/stats.hpp"

#include "test_util.hpp"

using namespace sfs;

namespace {

std::uint64_t count_nonzeros(const ColumnSequence& seq) {
    std::uint64_t n = 0;
    for (auto c : seq.codes) {
        if (c != 0) {
            ++n;
        }
    }
    return n;
}

// Brute-force storage sweep oracle: actually encode every group at every
// candidate width and take the real minimum.
std::pair<int, std::uint64_t> brute_force_best(const FilterBank& bank, int m, int wbit) {
    int best_bit = 0;
    std::uint64_t best_total = 0;
    for (int bit = 1; bit <= 16; ++bit) {
        std::uint64_t entries = 0;
        for (const auto& g : group_filters(bank, m)) {
            entries += encode(flatten_columns(reshape_group(g)), bit, wbit).entries.size();
        }
        const std::uint64_t total = entries * static_cast<std::uint64_t>(bit + wbit);
        if (best_bit == 0 || total < best_total) {
            best_bit = bit;
            best_total = total;
        }
    }
    return {best_bit, best_total};
}

} // namespace

TEST_CASE("run histograms on a hand-counted sequence") {
    const std::vector<std::uint32_t> codes{0, 0, 5, 0, 7, 0, 0, 0};
    const auto zeros = zero_run_hist(codes);
    CHECK(zeros.counts == std::map<std::uint64_t, std::uint64_t>{{1, 1}, {2, 1}, {3, 1}});
    CHECK(zeros.max == 3);
    const auto nonzeros = nonzero_run_hist(codes);
    CHECK(nonzeros.counts == std::map<std::uint64_t, std::uint64_t>{{1, 2}});
}

TEST_CASE("all-nonzero sequence has an empty zero histogram") {
    const std::vector<std::uint32_t> codes{1, 2, 3};
    CHECK(zero_run_hist(codes).counts.empty());
    CHECK(nonzero_run_hist(codes).counts ==
          std::map<std::uint64_t, std::uint64_t>{{3, 1}});
}

TEST_CASE("histogram conservation identity") {
    testutil::Rng rng(8);
    for (int iter = 0; iter < 40; ++iter) {
        const auto seq =
            testutil::random_sequence(rng, 4, 1 + iter, 4, (iter % 10) / 10.0);
        const auto zeros = zero_run_hist(seq);
        const auto nonzeros = nonzero_run_hist(seq);
        const auto nz = count_nonzeros(seq);
        CHECK(zeros.total_run_positions() + nz == seq.size());
        CHECK(nonzeros.total_run_positions() + (seq.size() - nz) == seq.size());
    }
}

TEST_CASE("optimize_bits on the worked example") {
    ZeroRunHistogram stat;
    stat.counts[5] = 10;
    stat.max = 5;
    const auto result = optimize_bits(stat, 100, 8, 4);
    REQUIRE(result.table.size() == 4);
    CHECK(result.table[0] == 280); // 100*1 + 10*2*9
    CHECK(result.table[1] == 300); // 100*2 + 10*1*10
    CHECK(result.table[2] == 300); // run of 5 < 8, no padding
    CHECK(result.table[3] == 400);
    CHECK(result.bit == 1);
    CHECK(result.total_bits == 280);
}

TEST_CASE("optimize_bits with no zeros picks bit=1") {
    const auto result = optimize_bits(ZeroRunHistogram{}, 50, 8);
    CHECK(result.bit == 1);
    CHECK(result.total_bits == 50);
    for (std::size_t b = 0; b < result.table.size(); ++b) {
        CHECK(result.table[b] == 50 * (b + 1));
    }
}

TEST_CASE("ties break to the smallest bit") {
    // nz = 0, single run shorter than 2: every width costs 0
    ZeroRunHistogram stat;
    stat.counts[1] = 3;
    stat.max = 1;
    const auto result = optimize_bits(stat, 0, 8);
    CHECK(result.bit == 1);
    CHECK(result.total_bits == 0);
}

TEST_CASE("predicted padding matches what the encoder emits") {
    testutil::Rng rng(88);
    const std::vector<std::uint32_t> ms{1, 2, 4, 8};
    for (int iter = 0; iter < 50; ++iter) {
        const auto seq = testutil::random_sequence(rng, ms[iter % ms.size()],
                                                   1 + iter % 40, 4, (iter % 10) / 10.0);
        const auto hist = zero_run_hist(seq);
        for (int bit = 1; bit <= 8; ++bit) {
            CHECK(predicted_padding(hist, bit) == encode(seq, bit, 4).padding_count());
        }
    }
}

TEST_CASE("extra_space formula") {
    CHECK(extra_space(100, 2, 3, 8) == 230);
    CHECK(extra_space(100, 3, 0, 8) == 300);
}

TEST_CASE("the optimized bit never loses to another candidate") {
    testutil::Rng rng(89);
    for (int iter = 0; iter < 20; ++iter) {
        const auto seq = testutil::random_sequence(rng, 4, 10 + iter, 4, 0.7);
        const auto hist = zero_run_hist(seq);
        const auto nz = count_nonzeros(seq);
        const auto best = optimize_bits(hist, nz, 4);
        const auto best_extra =
            extra_space(nz, best.bit, encode(seq, best.bit, 4).padding_count(), 4);
        for (int bit = 1; bit <= 16; ++bit) {
            const auto other = extra_space(nz, bit, encode(seq, bit, 4).padding_count(), 4);
            CHECK(best_extra <= other);
        }
    }
}

TEST_CASE("sweep with m == M reproduces the single-group pipeline") {
    testutil::Rng rng(90);
    LayerSpec spec{.M = 8, .C = 2, .K = 3, .S = 1, .W = 5, .H = 5, .m = 8};
    const auto bank = testutil::random_bank(rng, spec, 4, 0.7);
    const auto rows = batch_size_sweep(bank, 4, {8});
    REQUIRE(rows.size() == 1);
    const auto seq = flatten_columns(reshape_group(group_filters(bank, 8)[0]));
    const auto opt = optimize_bits(zero_run_hist(seq), count_nonzeros(seq), 4);
    CHECK(rows[0].m == 8);
    CHECK(rows[0].best_bit == opt.bit);
    CHECK(rows[0].total_bits == count_nonzeros(seq) * 4 + opt.total_bits);
}

TEST_CASE("dense bank storage is independent of the batch size") {
    testutil::Rng rng(91);
    LayerSpec spec{.M = 8, .C = 2, .K = 3, .S = 1, .W = 5, .H = 5, .m = 1};
    const auto bank = testutil::random_bank(rng, spec, 4, 0.0);
    const auto rows = batch_size_sweep(bank, 4, {1, 2, 4, 8});
    for (const auto& row : rows) {
        CHECK(row.best_bit == 1); // no zeros, cheapest index wins
        CHECK(row.padding == 0);
        CHECK(row.total_bits == rows[0].total_bits);
    }
}

TEST_CASE("sweep minimum matches the brute-force oracle") {
    testutil::Rng rng(92);
    LayerSpec spec{.M = 8, .C = 2, .K = 3, .S = 1, .W = 7, .H = 7, .m = 1};
    // structured sparsity: zero out whole filters so batch size matters
    auto bank = testutil::random_bank(rng, spec, 4, 0.2);
    const std::size_t filter_len = 2 * 3 * 3;
    for (int cho : {1, 3, 4, 7}) {
        for (std::size_t i = 0; i < filter_len; ++i) {
            bank.values[cho * filter_len + i] = 0.0;
        }
    }
    const std::vector<int> candidates{1, 2, 4, 8};
    const auto rows = batch_size_sweep(bank, 4, candidates);
    REQUIRE(rows.size() == candidates.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [bit, total] = brute_force_best(bank, candidates[i], 4);
        CHECK(rows[i].best_bit == bit);
        CHECK(rows[i].total_bits == total);
    }
}

TEST_CASE("sweep rejects non-dividing candidates") {
    testutil::Rng rng(93);
    LayerSpec spec{.M = 8, .C = 1, .K = 1, .S = 1, .W = 1, .H = 1, .m = 1};
    const auto bank = testutil::random_bank(rng, spec, 4, 0.5);
    CHECK_THROWS_AS(batch_size_sweep(bank, 4, {3}), ShapeError);
}
