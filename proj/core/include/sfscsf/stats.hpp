#pragma once

// Zero-run statistics over the column-major weight sequence and the storage
// cost model built on them: the total-bit objective
//
//   f(bit) = nz_num * bit
//          + sum over runs i >= 2^bit of count(i) * floor(i / 2^bit) * (wbit + bit)
//
// evaluated exhaustively to pick the index width, plus the per-layer batch
// size sweep derived from the same model.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sfscsf/csf.hpp"
#include "sfscsf/tensor.hpp"

namespace sfs {

// Histogram of maximal runs (of zeros, or of nonzeros) in a flat sequence.
struct ZeroRunHistogram {
    std::map<std::uint64_t, std::uint64_t> counts; // run length -> run count
    std::uint64_t max = 0;                         // largest observed run

    std::uint64_t total_run_positions() const; // sum of length * count
    void merge(const ZeroRunHistogram& other);
};

ZeroRunHistogram zero_run_hist(std::span<const std::uint32_t> codes);
ZeroRunHistogram nonzero_run_hist(std::span<const std::uint32_t> codes);

inline ZeroRunHistogram zero_run_hist(const ColumnSequence& seq) {
    return zero_run_hist(std::span<const std::uint32_t>(seq.codes));
}
inline ZeroRunHistogram nonzero_run_hist(const ColumnSequence& seq) {
    return nonzero_run_hist(std::span<const std::uint32_t>(seq.codes));
}

// Padding entries the encoder will emit at this index width:
// sum of floor(i / 2^bit) * count(i) over all runs.
std::uint64_t predicted_padding(const ZeroRunHistogram& zero_stat, int bit);

// Index + padding storage in bits: nz_num * bit + padding_count * (wbit + bit).
std::uint64_t extra_space(std::uint64_t nz_num, int bit, std::uint64_t padding_count, int wbit);

struct BitOptResult {
    int bit = 1;                      // smallest argmin
    std::uint64_t total_bits = 0;     // objective value at bit
    std::vector<std::uint64_t> table; // table[b-1] = f(b) for b in 1..max_bit
};

// Evaluates the objective for bit in [1, max_bit]; ties break to the
// smallest width.
BitOptResult optimize_bits(const ZeroRunHistogram& zero_stat, std::uint64_t nz_num, int wbit,
                           int max_bit = 16);

struct SweepRow {
    int m = 0;
    int best_bit = 1;
    std::uint64_t total_bits = 0; // weight + index + padding bits at best_bit
    std::uint64_t nonzeros = 0;
    std::uint64_t padding = 0;
};

// Regroups the bank per candidate batch size, pools run statistics over the
// groups, and reports the best single index width per candidate. Bank values
// must be quantization codes.
std::vector<SweepRow> batch_size_sweep(const FilterBank& filters, int wbit,
                                       const std::vector<int>& candidates);

} // namespace sfs
