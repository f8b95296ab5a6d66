#include "sfscsf/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "byteio.hpp"

namespace sfs {

namespace {

constexpr std::uint16_t kTensorVersion = 1;

std::uint32_t code_from_value(double v, int wbit) {
    const double r = std::floor(v);
    if (r != v || v < 0.0 || v >= std::ldexp(1.0, wbit)) {
        throw RangeError("value " + std::to_string(v) + " is not a code below 2^" +
                         std::to_string(wbit));
    }
    return static_cast<std::uint32_t>(r);
}

} // namespace

std::vector<std::uint8_t> save_tensor(const Tensor& t) {
    if (t.dims().empty()) {
        throw FormatError("bad ndim: tensor has no dimensions");
    }
    detail::ByteWriter w;
    w.magic("SFST");
    w.u16(kTensorVersion);
    w.u16(static_cast<std::uint16_t>(t.dtype()));
    if (t.dtype() == DType::Code) {
        w.u16(static_cast<std::uint16_t>(t.wbit()));
    }
    w.u16(static_cast<std::uint16_t>(t.dims().size()));
    for (auto d : t.dims()) {
        w.u32(d);
    }
    if (t.dtype() == DType::Real) {
        for (double v : t.values()) {
            w.f64(v);
        }
    } else {
        for (double v : t.values()) {
            w.u32(code_from_value(v, t.wbit()));
        }
    }
    return std::move(w.bytes());
}

Tensor load_tensor(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes.data(), bytes.size());
    r.expect_magic("SFST", "magic");
    const auto version = r.u16("version");
    if (version != kTensorVersion) {
        throw FormatError("bad version " + std::to_string(version));
    }
    const auto dtype_raw = r.u16("dtype");
    if (dtype_raw > 1) {
        throw FormatError("bad dtype " + std::to_string(dtype_raw));
    }
    const auto dtype = static_cast<DType>(dtype_raw);
    int wbit = 0;
    if (dtype == DType::Code) {
        wbit = r.u16("wbit");
        if (wbit < 1 || wbit > 32) {
            throw FormatError("bad wbit " + std::to_string(wbit));
        }
    }
    const auto ndim = r.u16("ndim");
    if (ndim == 0) {
        throw FormatError("bad ndim 0");
    }
    std::vector<std::uint32_t> dims(ndim);
    std::size_t count = 1;
    for (auto& d : dims) {
        d = r.u32("dims");
        if (d == 0) {
            throw FormatError("bad dims: zero extent");
        }
        count *= d;
    }
    const std::size_t elem_size = dtype == DType::Real ? 8 : 4;
    if (r.remaining() != count * elem_size) {
        throw FormatError("payload length: have " + std::to_string(r.remaining()) +
                          " bytes, header declares " + std::to_string(count * elem_size));
    }
    Tensor t(std::move(dims), dtype, wbit);
    if (dtype == DType::Real) {
        for (auto& v : t.values()) {
            v = r.f64("payload");
        }
    } else {
        const std::uint64_t limit = std::uint64_t{1} << wbit;
        for (auto& v : t.values()) {
            const std::uint32_t code = r.u32("payload");
            if (code >= limit) {
                throw FormatError("payload code " + std::to_string(code) + " exceeds wbit " +
                                  std::to_string(wbit));
            }
            v = static_cast<double>(code);
        }
    }
    return t;
}

std::vector<std::uint8_t> save_codebook(const QuantCodebook& codebook) {
    codebook.validate();
    detail::ByteWriter w;
    w.magic("SFCB");
    w.u16(static_cast<std::uint16_t>(codebook.wbit));
    for (double v : codebook.table) {
        w.f64(v);
    }
    return std::move(w.bytes());
}

QuantCodebook load_codebook(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes.data(), bytes.size());
    r.expect_magic("SFCB", "magic");
    QuantCodebook cb;
    cb.wbit = r.u16("wbit");
    if (cb.wbit < 1 || cb.wbit > 32) {
        throw FormatError("bad wbit " + std::to_string(cb.wbit));
    }
    const std::size_t entries = std::size_t{1} << cb.wbit;
    if (r.remaining() != entries * 8) {
        throw FormatError("payload length: have " + std::to_string(r.remaining()) +
                          " bytes, wbit declares " + std::to_string(entries * 8));
    }
    cb.table.resize(entries);
    for (auto& v : cb.table) {
        v = r.f64("table");
    }
    cb.validate();
    return cb;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open file " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_binary_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open file for writing " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

Tensor load_tensor_file(const std::filesystem::path& path) {
    return load_tensor(read_binary_file(path));
}

void save_tensor_file(const Tensor& t, const std::filesystem::path& path) {
    write_binary_file(path, save_tensor(t));
}

QuantCodebook load_codebook_file(const std::filesystem::path& path) {
    return load_codebook(read_binary_file(path));
}

void save_codebook_file(const QuantCodebook& codebook, const std::filesystem::path& path) {
    write_binary_file(path, save_codebook(codebook));
}

} // namespace sfs
