#pragma once

// Relative indexed compressed sparse filter (CSF) encoding.
//
// A reshaped filter batch is flattened column by column: column i holds the
// m weights at kernel position i (linear over channel, row, col), so one
// feature element multiplies one stored column. Zero weights are dropped;
// each kept entry records how many zero positions were skipped since the
// previous entry (the relative index, `bit` bits wide) plus its weight code
// (`wbit` bits). A gap that no longer fits in `bit` bits is bridged by a
// padding entry: rel = 2^bit - 1, code = 0, consuming 2^bit positions.
// Relative indexing runs continuously across column boundaries; per-column
// entry counts are derived from the stream, never stored.
//
// CSF1 file layout (little-endian):
//   magic "CSF1" | version u16 = 1 | m u32 | num_columns u32
//   | bit u8 | wbit u8 | entry_count u64
//   | packed entries: (rel, code) of bit+wbit bits each, LSB-first,
//     zero-padded to a byte boundary
//   | optional trailing codebook section (magic "SFCB", see tensor_io)

#include <cstdint>
#include <optional>
#include <vector>

#include "sfscsf/errors.hpp"
#include "sfscsf/sfs_flow.hpp"
#include "sfscsf/tensor.hpp"

namespace sfs {

// One filter batch flattened column-major; j ascends fastest within a column.
struct ColumnSequence {
    std::uint32_t m = 0;
    std::uint32_t num_columns = 0;
    std::vector<std::uint32_t> codes; // m * num_columns values

    std::size_t size() const { return codes.size(); }

    bool operator==(const ColumnSequence&) const = default;
};

struct CsfEntry {
    std::uint32_t rel = 0;  // zero positions skipped since the previous entry
    std::uint32_t code = 0; // weight code; 0 marks a padding entry

    bool operator==(const CsfEntry&) const = default;
};

struct CsfBlock {
    std::uint32_t m = 0;
    std::uint32_t num_columns = 0;
    int bit = 0;
    int wbit = 0;
    std::vector<CsfEntry> entries;
    // column_counts[i] == stored entries (padding included) whose absolute
    // position falls in column i; 0 marks an all-zero column. Rebuilt from
    // the stream on load, never serialized.
    std::vector<std::uint32_t> column_counts;

    std::size_t total_len() const {
        return static_cast<std::size_t>(m) * num_columns;
    }
    std::size_t nonzero_count() const;
    std::size_t padding_count() const;

    bool operator==(const CsfBlock&) const = default;
};

// Flattens a reshaped batch into the column-major code sequence. Values must
// already be integral codes; throws EncodingError otherwise.
ColumnSequence flatten_columns(const ReshapedGroup& group);

// Inverse of flatten_columns given the channel/kernel split of the columns.
ReshapedGroup unflatten_columns(const ColumnSequence& seq, int C, int K, int index = 0);

// Encodes a column sequence. bit must be in [1,16], wbit in [1,32], every
// code below 2^wbit. When a codebook is supplied, any nonzero code mapping
// to weight 0.0 raises EncodingError.
CsfBlock encode(const ColumnSequence& seq, int bit, int wbit,
                const QuantCodebook* codebook = nullptr);

// Reconstructs the exact original sequence; positions never named by an
// entry are zero. total_len must equal m * num_columns of the block.
ColumnSequence decode(const CsfBlock& block, std::size_t total_len);

// Assigns each entry to the column containing its absolute position.
std::vector<std::uint32_t> build_column_counts(const std::vector<CsfEntry>& entries,
                                               std::uint32_t m, std::uint32_t num_columns);

// Absolute positions of all entries (strictly increasing); CorruptStream if
// the walk passes total_len.
std::vector<std::size_t> entry_positions(const std::vector<CsfEntry>& entries,
                                         std::size_t total_len);

std::vector<std::uint8_t> serialize(const CsfBlock& block,
                                    const QuantCodebook* codebook = nullptr);
CsfBlock deserialize(const std::vector<std::uint8_t>& bytes,
                     std::optional<QuantCodebook>* codebook_out = nullptr);

} // namespace sfs
