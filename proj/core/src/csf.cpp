#include "sfscsf/csf.hpp"

#include <cmath>
#include <string>

#include "sfscsf/tensor_io.hpp"

#include "byteio.hpp"

namespace sfs {

namespace {

constexpr std::uint16_t kCsfVersion = 1;

void check_widths(int bit, int wbit) {
    if (bit < 1 || bit > 16) {
        throw RangeError("bit must be in [1,16], got " + std::to_string(bit));
    }
    if (wbit < 1 || wbit > 32) {
        throw RangeError("wbit must be in [1,32], got " + std::to_string(wbit));
    }
}

// Appends `width` bits of `value` LSB-first at bit offset `pos`.
void put_bits(std::vector<std::uint8_t>& bytes, std::size_t& pos, std::uint64_t value,
              int width) {
    for (int i = 0; i < width; ++i) {
        const std::size_t byte = (pos + i) / 8;
        if (byte >= bytes.size()) {
            bytes.push_back(0);
        }
        if ((value >> i) & 1u) {
            bytes[byte] |= static_cast<std::uint8_t>(1u << ((pos + i) % 8));
        }
    }
    pos += width;
}

std::uint64_t get_bits(const std::uint8_t* data, std::size_t& pos, int width) {
    std::uint64_t value = 0;
    for (int i = 0; i < width; ++i) {
        const std::size_t byte = (pos + i) / 8;
        if ((data[byte] >> ((pos + i) % 8)) & 1u) {
            value |= std::uint64_t{1} << i;
        }
    }
    pos += width;
    return value;
}

} // namespace

std::size_t CsfBlock::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) {
        if (e.code != 0) {
            ++n;
        }
    }
    return n;
}

std::size_t CsfBlock::padding_count() const {
    return entries.size() - nonzero_count();
}

ColumnSequence flatten_columns(const ReshapedGroup& group) {
    ColumnSequence seq;
    seq.m = static_cast<std::uint32_t>(group.m);
    seq.num_columns = static_cast<std::uint32_t>(group.num_columns());
    seq.codes.reserve(group.values.size());
    // [chi][r][c][j] memory order is already column-major with j innermost.
    for (double v : group.values) {
        if (v < 0.0 || std::floor(v) != v || v > 4294967295.0) {
            throw EncodingError("weight value " + std::to_string(v) +
                                " is not an unsigned quantization code");
        }
        seq.codes.push_back(static_cast<std::uint32_t>(v));
    }
    return seq;
}

ReshapedGroup unflatten_columns(const ColumnSequence& seq, int C, int K, int index) {
    if (static_cast<std::uint32_t>(C) * K * K != seq.num_columns) {
        throw ShapeError("C*K*K = " + std::to_string(C * K * K) +
                         " does not match num_columns = " + std::to_string(seq.num_columns));
    }
    if (seq.codes.size() != static_cast<std::size_t>(seq.m) * seq.num_columns) {
        throw ShapeError("column sequence length mismatch");
    }
    ReshapedGroup g;
    g.index = index;
    g.m = static_cast<int>(seq.m);
    g.C = C;
    g.K = K;
    g.values.reserve(seq.codes.size());
    for (auto code : seq.codes) {
        g.values.push_back(static_cast<double>(code));
    }
    return g;
}

CsfBlock encode(const ColumnSequence& seq, int bit, int wbit, const QuantCodebook* codebook) {
    check_widths(bit, wbit);
    if (seq.codes.size() != static_cast<std::size_t>(seq.m) * seq.num_columns) {
        throw ShapeError("column sequence length mismatch");
    }
    if (codebook != nullptr) {
        codebook->validate();
        if (codebook->wbit != wbit) {
            throw RangeError("codebook wbit " + std::to_string(codebook->wbit) +
                             " does not match encode wbit " + std::to_string(wbit));
        }
    }
    const std::uint64_t code_limit = std::uint64_t{1} << wbit;
    const std::uint32_t max_rel = (std::uint32_t{1} << bit) - 1;

    CsfBlock block;
    block.m = seq.m;
    block.num_columns = seq.num_columns;
    block.bit = bit;
    block.wbit = wbit;

    std::uint32_t gap = 0; // zero positions skipped since the last entry
    for (std::uint32_t code : seq.codes) {
        if (code >= code_limit) {
            throw RangeError("code " + std::to_string(code) + " exceeds wbit " +
                             std::to_string(wbit));
        }
        if (code == 0) {
            if (gap == max_rel) {
                // Gap no longer representable: bridge with a padding entry
                // occupying this position.
                block.entries.push_back({max_rel, 0});
                gap = 0;
            } else {
                ++gap;
            }
        } else {
            if (codebook != nullptr && codebook->table[code] == 0.0) {
                throw EncodingError("zero weight stored under nonzero code " +
                                    std::to_string(code));
            }
            block.entries.push_back({gap, code});
            gap = 0;
        }
    }
    // Trailing zeros that never filled a padding stay implicit; the block
    // length recovers them.
    block.column_counts = build_column_counts(block.entries, block.m, block.num_columns);
    return block;
}

std::vector<std::size_t> entry_positions(const std::vector<CsfEntry>& entries,
                                         std::size_t total_len) {
    std::vector<std::size_t> positions;
    positions.reserve(entries.size());
    std::size_t pos = 0;
    for (const auto& e : entries) {
        pos += e.rel; // skipped zeros
        if (pos >= total_len) {
            throw CorruptStream("entry stream overruns block length " +
                                std::to_string(total_len));
        }
        positions.push_back(pos);
        ++pos; // the entry's own slot
    }
    return positions;
}

ColumnSequence decode(const CsfBlock& block, std::size_t total_len) {
    if (total_len != block.total_len()) {
        throw ShapeError("total_len " + std::to_string(total_len) +
                         " does not match block m*num_columns " +
                         std::to_string(block.total_len()));
    }
    ColumnSequence seq;
    seq.m = block.m;
    seq.num_columns = block.num_columns;
    seq.codes.assign(total_len, 0);
    for (std::size_t i = 0; const auto pos : entry_positions(block.entries, total_len)) {
        seq.codes[pos] = block.entries[i++].code;
    }
    return seq;
}

std::vector<std::uint32_t> build_column_counts(const std::vector<CsfEntry>& entries,
                                               std::uint32_t m, std::uint32_t num_columns) {
    std::vector<std::uint32_t> counts(num_columns, 0);
    const std::size_t total_len = static_cast<std::size_t>(m) * num_columns;
    for (const auto pos : entry_positions(entries, total_len)) {
        ++counts[pos / m];
    }
    return counts;
}

std::vector<std::uint8_t> serialize(const CsfBlock& block, const QuantCodebook* codebook) {
    check_widths(block.bit, block.wbit);
    detail::ByteWriter w;
    w.magic("CSF1");
    w.u16(kCsfVersion);
    w.u32(block.m);
    w.u32(block.num_columns);
    w.u8(static_cast<std::uint8_t>(block.bit));
    w.u8(static_cast<std::uint8_t>(block.wbit));
    w.u64(block.entries.size());

    std::vector<std::uint8_t> stream;
    std::size_t bitpos = 0;
    for (const auto& e : block.entries) {
        put_bits(stream, bitpos, e.rel, block.bit);
        put_bits(stream, bitpos, e.code, block.wbit);
    }
    w.bytes().insert(w.bytes().end(), stream.begin(), stream.end());

    if (codebook != nullptr) {
        const auto cb = save_codebook(*codebook);
        w.bytes().insert(w.bytes().end(), cb.begin(), cb.end());
    }
    return std::move(w.bytes());
}

CsfBlock deserialize(const std::vector<std::uint8_t>& bytes,
                     std::optional<QuantCodebook>* codebook_out) {
    detail::ByteReader r(bytes.data(), bytes.size());
    r.expect_magic("CSF1", "magic");
    const auto version = r.u16("version");
    if (version != kCsfVersion) {
        throw FormatError("bad version " + std::to_string(version));
    }
    CsfBlock block;
    block.m = r.u32("m");
    block.num_columns = r.u32("num_columns");
    block.bit = r.u8("bit");
    block.wbit = r.u8("wbit");
    if (block.m == 0 || block.num_columns == 0) {
        throw FormatError("bad m/num_columns: zero");
    }
    check_widths(block.bit, block.wbit);
    const std::uint64_t entry_count = r.u64("entry_count");
    const std::size_t stream_bits = entry_count * (block.bit + block.wbit);
    const std::size_t stream_bytes = (stream_bits + 7) / 8;
    const std::uint8_t* stream = r.raw(stream_bytes, "entry stream");

    block.entries.reserve(entry_count);
    std::size_t bitpos = 0;
    for (std::uint64_t i = 0; i < entry_count; ++i) {
        CsfEntry e;
        e.rel = static_cast<std::uint32_t>(get_bits(stream, bitpos, block.bit));
        e.code = static_cast<std::uint32_t>(get_bits(stream, bitpos, block.wbit));
        block.entries.push_back(e);
    }
    // Throws CorruptStream if the stream walks past m * num_columns.
    block.column_counts = build_column_counts(block.entries, block.m, block.num_columns);

    if (r.remaining() > 0) {
        // Optional trailing codebook section.
        std::vector<std::uint8_t> tail(bytes.end() - static_cast<std::ptrdiff_t>(r.remaining()),
                                       bytes.end());
        QuantCodebook cb = load_codebook(tail);
        if (cb.wbit != block.wbit) {
            throw FormatError("codebook wbit " + std::to_string(cb.wbit) +
                              " does not match block wbit " + std::to_string(block.wbit));
        }
        if (codebook_out != nullptr) {
            *codebook_out = std::move(cb);
        }
    } else if (codebook_out != nullptr) {
        codebook_out->reset();
    }
    return block;
}

} // namespace sfs
