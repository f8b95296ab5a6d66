#include "sfscsf/stats.hpp"

#include <string>

namespace sfs {

namespace {

ZeroRunHistogram run_hist(std::span<const std::uint32_t> codes, bool count_zeros) {
    ZeroRunHistogram h;
    std::uint64_t run = 0;
    for (auto code : codes) {
        const bool in_run = (code == 0) == count_zeros;
        if (in_run) {
            ++run;
        } else if (run > 0) {
            ++h.counts[run];
            h.max = std::max(h.max, run);
            run = 0;
        }
    }
    if (run > 0) {
        ++h.counts[run];
        h.max = std::max(h.max, run);
    }
    return h;
}

} // namespace

std::uint64_t ZeroRunHistogram::total_run_positions() const {
    std::uint64_t total = 0;
    for (const auto& [len, count] : counts) {
        total += len * count;
    }
    return total;
}

void ZeroRunHistogram::merge(const ZeroRunHistogram& other) {
    for (const auto& [len, count] : other.counts) {
        counts[len] += count;
    }
    max = std::max(max, other.max);
}

ZeroRunHistogram zero_run_hist(std::span<const std::uint32_t> codes) {
    return run_hist(codes, true);
}

ZeroRunHistogram nonzero_run_hist(std::span<const std::uint32_t> codes) {
    return run_hist(codes, false);
}

std::uint64_t predicted_padding(const ZeroRunHistogram& zero_stat, int bit) {
    const std::uint64_t span = std::uint64_t{1} << bit;
    std::uint64_t padding = 0;
    for (const auto& [len, count] : zero_stat.counts) {
        padding += (len / span) * count;
    }
    return padding;
}

std::uint64_t extra_space(std::uint64_t nz_num, int bit, std::uint64_t padding_count, int wbit) {
    return nz_num * static_cast<std::uint64_t>(bit) +
           padding_count * static_cast<std::uint64_t>(wbit + bit);
}

BitOptResult optimize_bits(const ZeroRunHistogram& zero_stat, std::uint64_t nz_num, int wbit,
                           int max_bit) {
    if (max_bit < 1) {
        throw RangeError("max_bit must be >= 1, got " + std::to_string(max_bit));
    }
    BitOptResult result;
    result.table.reserve(max_bit);
    for (int b = 1; b <= max_bit; ++b) {
        const std::uint64_t f = extra_space(nz_num, b, predicted_padding(zero_stat, b), wbit);
        result.table.push_back(f);
        if (b == 1 || f < result.total_bits) {
            result.bit = b;
            result.total_bits = f;
        }
    }
    return result;
}

std::vector<SweepRow> batch_size_sweep(const FilterBank& filters, int wbit,
                                       const std::vector<int>& candidates) {
    filters.validate();
    std::vector<SweepRow> rows;
    rows.reserve(candidates.size());
    for (int m : candidates) {
        if (m < 1 || filters.spec.M % m != 0) {
            throw ShapeError("sweep candidate m=" + std::to_string(m) + " does not divide M=" +
                             std::to_string(filters.spec.M));
        }
        ZeroRunHistogram pooled;
        std::uint64_t nonzeros = 0;
        for (const auto& group : group_filters(filters, m)) {
            const auto seq = flatten_columns(reshape_group(group));
            pooled.merge(zero_run_hist(seq));
            for (auto code : seq.codes) {
                if (code != 0) {
                    ++nonzeros;
                }
            }
        }
        const BitOptResult best = optimize_bits(pooled, nonzeros, wbit);
        SweepRow row;
        row.m = m;
        row.best_bit = best.bit;
        row.nonzeros = nonzeros;
        row.padding = predicted_padding(pooled, best.bit);
        // weight bits for nonzeros + the index/padding term of the objective
        row.total_bits = nonzeros * static_cast<std::uint64_t>(wbit) + best.total_bits;
        rows.push_back(row);
    }
    return rows;
}

} // namespace sfs
